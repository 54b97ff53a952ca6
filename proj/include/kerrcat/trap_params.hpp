#pragma once

// Physical parameters of the trapped-electron cyclotron mode from SI trap
// hardware inputs.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kerrcat/constants.hpp"
#include "kerrcat/errors.hpp"

namespace kerrcat::trap {

using cplx = std::complex<double>;

/// Raw trap and drive inputs, SI units throughout.
struct TrapConfig {
  double magnetic_field = 0.0;      // B [T]
  double electrode_potential = 0.0; // V0 [V]
  double trap_dimension = 0.0;      // d [m]
  double temperature = 0.0;         // T [K]
  double drive_amplitude = 0.0;     // epsilon [V/m]
  double drive_duration = 0.0;      // tau [s]
  std::optional<double> pump_frequency;  // omega_p [rad/s]; defaults to omega_M
  std::optional<double> detuning;        // omega_M - omega_p [rad/s]; exclusive with pump_frequency
  double gamma = 0.0;               // energy relaxation rate [1/s]
  std::optional<cplx> alpha0_override;
};

struct DerivedParams {
  double omega_c = 0.0;   // cyclotron angular frequency
  double omega_z = 0.0;   // axial angular frequency
  double omega_M = 0.0;   // thermally averaged cyclotron frequency
  double omega_p = 0.0;   // pump angular frequency
  double detuning = 0.0;  // omega_M - omega_p
  double mu = 0.0;        // relativistic anharmonicity
  double k = 0.0;         // drive coupling, alpha0 = k epsilon tau
  cplx alpha0{0.0, 0.0};
  double gamma = 0.0;
  double t_cat = 0.0;      // pi / (2 mu)
  double t_revival = 0.0;  // 2 pi / mu
  double t_dec = 0.0;      // 1 / (gamma |alpha0|^2); +inf without damping
  double ratio = 0.0;      // mu / gamma; +inf without damping
  std::vector<std::string> warnings;

  double cyclotron_frequency_hz() const { return omega_c / (2.0 * std::numbers::pi); }
  double axial_frequency_hz() const { return omega_z / (2.0 * std::numbers::pi); }
};

inline double cyclotron_angular_frequency(double magnetic_field) {
  return constants::elementary_charge * magnetic_field / constants::electron_mass;
}

/// Inverse of cyclotron_angular_frequency.
inline double field_for_cyclotron(double omega_c) {
  return omega_c * constants::electron_mass / constants::elementary_charge;
}

inline double axial_angular_frequency(double potential, double dimension) {
  return std::sqrt(constants::elementary_charge * potential /
                   (constants::electron_mass * dimension * dimension));
}

/// mu = hbar omega_c^2 / (2 m c^2)
inline double anharmonicity(double omega_c) {
  const double mc2 = constants::electron_mass * constants::speed_of_light * constants::speed_of_light;
  return constants::hbar * omega_c * omega_c / (2.0 * mc2);
}

/// omega_M = omega_c [1 - k_B T/(2 m c^2) - hbar omega_c/(2 m c^2)]
inline double thermal_cyclotron_frequency(double omega_c, double temperature) {
  const double two_mc2 =
      2.0 * constants::electron_mass * constants::speed_of_light * constants::speed_of_light;
  return omega_c * (1.0 - constants::boltzmann * temperature / two_mc2 -
                    constants::hbar * omega_c / two_mc2);
}

/// SI drive coupling k = (e/omega_p) sqrt(omega_c / (2 hbar m)), in
/// (V/m)^-1 s^-1, so that k * epsilon[V/m] * tau[s] is dimensionless. The
/// interaction -(e/m) p.A with A = E/omega_p has the same operator form in SI
/// as in Gaussian units once A carries no factor of c.
inline double drive_coupling(double omega_c, double omega_p) {
  return constants::elementary_charge / omega_p *
         std::sqrt(omega_c / (2.0 * constants::hbar * constants::electron_mass));
}

inline void validate(const TrapConfig& c) {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw NonPositiveInput(std::string(name) + " must be > 0");
  };
  auto require_nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NonPositiveInput(std::string(name) + " must be >= 0");
  };
  require_positive(c.magnetic_field, "magnetic_field");
  require_positive(c.electrode_potential, "electrode_potential");
  require_positive(c.trap_dimension, "trap_dimension");
  require_nonneg(c.temperature, "temperature");
  require_nonneg(c.gamma, "gamma");
  require_nonneg(c.drive_duration, "drive_duration");
  if (!std::isfinite(c.drive_amplitude)) throw NonPositiveInput("drive_amplitude must be finite");
  if (c.pump_frequency && c.detuning)
    throw InvalidArgument("specify at most one of pump_frequency and detuning");
  if (c.pump_frequency) require_positive(*c.pump_frequency, "pump_frequency");
}

namespace detail {

inline double pump_frequency(const TrapConfig& c, double omega_M) {
  if (c.pump_frequency) return *c.pump_frequency;
  if (c.detuning) return omega_M - *c.detuning;
  return omega_M;
}

}  // namespace detail

/// alpha0 = k epsilon tau, or the override verbatim. Appends a warning when
/// the kick is not short against the axial period.
inline cplx kick_amplitude(const TrapConfig& c, std::vector<std::string>* warnings = nullptr) {
  if (c.alpha0_override) return *c.alpha0_override;
  const double omega_c = cyclotron_angular_frequency(c.magnetic_field);
  const double omega_M = thermal_cyclotron_frequency(omega_c, c.temperature);
  const double omega_p = detail::pump_frequency(c, omega_M);
  if (warnings != nullptr && c.drive_duration > 0.0) {
    const double axial_period =
        2.0 * std::numbers::pi / axial_angular_frequency(c.electrode_potential, c.trap_dimension);
    // "much shorter" taken as a factor of ten.
    if (c.drive_duration > 0.1 * axial_period) {
      warnings->push_back("kick duration " + std::to_string(c.drive_duration) +
                          " s is not short against the axial period " +
                          std::to_string(axial_period) + " s");
    }
  }
  return drive_coupling(omega_c, omega_p) * c.drive_amplitude * c.drive_duration;
}

inline DerivedParams derive(const TrapConfig& c) {
  validate(c);
  DerivedParams p;
  p.omega_c = cyclotron_angular_frequency(c.magnetic_field);
  p.omega_z = axial_angular_frequency(c.electrode_potential, c.trap_dimension);
  p.omega_M = thermal_cyclotron_frequency(p.omega_c, c.temperature);
  p.omega_p = detail::pump_frequency(c, p.omega_M);
  if (!(p.omega_p > 0.0)) throw NonPositiveInput("pump frequency must be > 0");
  p.detuning = p.omega_M - p.omega_p;
  p.mu = anharmonicity(p.omega_c);
  p.k = drive_coupling(p.omega_c, p.omega_p);
  p.alpha0 = kick_amplitude(c, &p.warnings);
  p.gamma = c.gamma;
  p.t_cat = std::numbers::pi / (2.0 * p.mu);
  p.t_revival = 2.0 * std::numbers::pi / p.mu;
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double rate = c.gamma * std::norm(p.alpha0);
  p.t_dec = rate > 0.0 ? 1.0 / rate : inf;
  p.ratio = c.gamma > 0.0 ? p.mu / c.gamma : inf;
  return p;
}

}  // namespace kerrcat::trap
