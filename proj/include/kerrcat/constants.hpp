#pragma once

// Physical constants, CODATA 2018 recommended values (SI).
// Pinned here so every derived quantity is reproducible bit-for-bit.

namespace kerrcat::constants {

inline constexpr const char* kTableVersion = "CODATA-2018";

inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double electron_mass = 9.1093837015e-31;     // kg
inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double speed_of_light = 299792458.0;         // m/s (exact)
inline constexpr double boltzmann = 1.380649e-23;             // J/K (exact)

}  // namespace kerrcat::constants
