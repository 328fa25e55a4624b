#pragma once

#include <numbers>

namespace pq {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Frequencies are stored as angular frequencies (rad/s) everywhere inside the
// library. These are the only two conversion points.
constexpr double hz_to_rad(double f_hz) { return kTwoPi * f_hz; }
constexpr double rad_to_hz(double omega) { return omega / kTwoPi; }

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }

}  // namespace pq
