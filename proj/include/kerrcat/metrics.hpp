#pragma once

// Cat-state observables on a density operator. Used by the integrator to
// annotate trajectories and by the analysis layer.

#include <cmath>
#include <complex>

#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"

namespace kerrcat::analysis {

/// <cat|rho|cat> with the two-branch target built on alpha0. Global phases
/// of the target drop out.
inline double cat_fidelity(const DensityOperator& rho, PhasePoint alpha0) {
  return fidelity(rho, cat_state(alpha0, rho.cutoff(), Truncation::kRenormalize));
}

/// Branch amplitude alpha0 e^{-gamma t/2} of a damped coherent state.
inline std::complex<double> branch_amplitude(std::complex<double> alpha0, double t, double gamma) {
  return alpha0 * std::exp(-0.5 * gamma * t);
}

/// Normalized branch coherence
///   C = |<a_t|rho|-a_t>| / sqrt(<a_t|rho|a_t> <-a_t|rho|-a_t>),  a_t = alpha0 e^{-gamma t/2}.
/// Equals 1 for a pure balanced two-branch state, ~0 for a branch mixture.
inline double coherence_metric(const DensityOperator& rho, PhasePoint alpha0, double t, double gamma) {
  const auto a = branch_amplitude(alpha0.value(), t, gamma);
  const double plus = coherent_matrix_element(rho, a, a).real();
  const double minus = coherent_matrix_element(rho, -a, -a).real();
  if (plus <= 1e-15 || minus <= 1e-15) {
    throw DegenerateBranches("branch populations " + std::to_string(plus) + ", " + std::to_string(minus) +
                             " too small for a coherence ratio");
  }
  return std::abs(coherent_matrix_element(rho, a, -a)) / std::sqrt(plus * minus);
}

}  // namespace kerrcat::analysis
