#pragma once

#include "kerrcat/analysis.hpp"
#include "kerrcat/analytic_q.hpp"
#include "kerrcat/constants.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/kerr_system.hpp"
#include "kerrcat/lindblad.hpp"
#include "kerrcat/metrics.hpp"
#include "kerrcat/phase_grid.hpp"
#include "kerrcat/trap_params.hpp"
#include "kerrcat/version.hpp"
