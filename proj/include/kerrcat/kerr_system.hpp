#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "kerrcat/errors.hpp"

namespace kerrcat {

/// Damped Kerr oscillator started from the coherent state |alpha0>.
/// Time units are whatever mu and gamma are expressed in.
struct KerrSystem {
  std::complex<double> alpha0{0.0, 0.0};
  double mu = 1.0;        // anharmonicity
  double gamma = 0.0;     // energy relaxation rate
  double detuning = 0.0;  // omega_M - omega_p; zero on the validated path

  void validate() const {
    if (!std::isfinite(alpha0.real()) || !std::isfinite(alpha0.imag()))
      throw InvalidArgument("alpha0 must be finite");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be finite and >= 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be finite and >= 0");
    if (!std::isfinite(detuning)) throw InvalidArgument("detuning must be finite");
  }

  // No anharmonicity and no damping: nothing evolves but phases.
  bool is_trivial() const noexcept { return mu == 0.0 && gamma == 0.0; }

  double t_cat() const noexcept {
    return mu > 0.0 ? std::numbers::pi / (2.0 * mu) : std::numeric_limits<double>::infinity();
  }
  double t_revival() const noexcept {
    return mu > 0.0 ? 2.0 * std::numbers::pi / mu : std::numeric_limits<double>::infinity();
  }
};

}  // namespace kerrcat
