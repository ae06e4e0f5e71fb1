#pragma once

#include <numbers>
#include <span>

namespace synctrans {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce to (-pi, pi].
double wrap_pm_pi(double angle);

/// Reduce to [0, 2pi).
double wrap_two_pi(double angle);

/// Shortest arc length between two angles, in [0, pi].
double circular_distance(double a, double b);

/// Circular distance modulo the exchange symmetry psi -> -psi of two
/// identical oscillators: min(d(a, b), d(a, -b)).
double symmetric_distance(double a, double b);

struct CircularStats {
  double mean;    ///< in [0, 2pi)
  double spread;  ///< circular standard deviation sqrt(-2 ln R), radians
};

CircularStats circular_stats(std::span<const double> angles);

}  // namespace synctrans
