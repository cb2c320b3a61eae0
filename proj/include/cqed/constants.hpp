#pragma once

#include <numbers>

// Single table of physical constants (CODATA 2018 exact values).
// Everything else in the code derives from these; the run manifest
// echoes them so outputs are self-describing.
namespace cqed::constants {

inline constexpr double planck = 6.62607015e-34;                    // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);   // J s
inline constexpr double k_boltzmann = 1.380649e-23;                 // J / K

}  // namespace cqed::constants
