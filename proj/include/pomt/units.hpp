#pragma once

#include <numbers>

namespace pomt::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double epsilon_0 = 8.8541878128e-12; // F/m

inline constexpr double hz_to_rad(double hz) noexcept { return two_pi * hz; }
inline constexpr double rad_to_hz(double rad) noexcept { return rad / two_pi; }
inline constexpr double rad_to_mhz(double rad) noexcept { return rad / two_pi * 1e-6; }

} // namespace pomt::units
