#pragma once

#include <numbers>

namespace atomflux {

inline constexpr double pi = std::numbers::pi;

/// Reduced Planck constant, CODATA 2018 exact value (J s).
inline constexpr double hbar = 1.054571817e-34;

}  // namespace atomflux
