#include "synctrans/angles.hpp"

#include <algorithm>
#include <cmath>

#include "synctrans/error.hpp"

namespace synctrans {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NotABifurcationPoint: return "NotABifurcationPoint";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NoPeaks: return "NoPeaks";
    case ErrorCode::NotLocked: return "NotLocked";
    case ErrorCode::NoCycleFound: return "NoCycleFound";
    case ErrorCode::AdjointNotConverged: return "AdjointNotConverged";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_pm_pi(double angle) {
  double r = wrap_two_pi(angle);
  if (r > kPi) r -= kTwoPi;
  return r;
}

double circular_distance(double a, double b) {
  return std::abs(wrap_pm_pi(a - b));
}

double symmetric_distance(double a, double b) {
  return std::min(circular_distance(a, b), circular_distance(a, -b));
}

CircularStats circular_stats(std::span<const double> angles) {
  if (angles.empty()) throw NumericalError(ErrorCode::InvalidArgument, "circular_stats of empty set");
  double c = 0.0, s = 0.0;
  for (double a : angles) {
    c += std::cos(a);
    s += std::sin(a);
  }
  c /= static_cast<double>(angles.size());
  s /= static_cast<double>(angles.size());
  const double resultant = std::min(1.0, std::hypot(c, s));
  const double spread = resultant >= 1.0 ? 0.0 : resultant > 0.0 ? std::sqrt(-2.0 * std::log(resultant)) : kPi;
  return {wrap_two_pi(std::atan2(s, c)), spread};
}

}  // namespace synctrans
