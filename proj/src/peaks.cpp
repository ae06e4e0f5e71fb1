#include "synctrans/peaks.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "synctrans/angles.hpp"
#include "synctrans/error.hpp"

namespace synctrans {

std::vector<Peak> detect_peaks(const Trajectory& traj, std::size_t component, const PeakOptions& opts) {
  if (component >= traj.dim) throw NumericalError(ErrorCode::InvalidArgument, "component out of range");
  const std::size_t last = std::min(opts.last, traj.samples());
  const std::size_t first = std::min(opts.first, last);
  if (last - first < 3) throw NumericalError(ErrorCode::NoPeaks, "fewer than 3 samples");
  const double sign = opts.kind == PeakOptions::Kind::Maxima ? 1.0 : -1.0;
  auto v = [&](std::size_t i) { return sign * traj.at(i, component); };

  std::vector<Peak> peaks;
  for (std::size_t i = first + 1; i + 1 < last; ++i) {
    const double a = v(i - 1), b = v(i), c = v(i + 1);
    if (!(b > a && b >= c)) continue;
    if (opts.level && sign * b < sign * *opts.level) continue;
    const double denom = a - 2.0 * b + c;
    double offset = 0.0;
    double value = b;
    if (denom < 0.0) {
      offset = 0.5 * (a - c) / denom;
      value = b - 0.25 * (a - c) * offset;
    }
    peaks.push_back({traj.time(i) + offset * traj.dt, sign * value});
  }
  if (peaks.empty()) throw NumericalError(ErrorCode::NoPeaks, "component " + std::to_string(component) + " has no peaks");
  return peaks;
}

SummaryStats summarize_unchecked(const Trajectory& traj, std::size_t i1, std::size_t i2, const SummaryOptions& opts) {
  if (!(opts.window > 0.0 && opts.window <= 1.0))
    throw NumericalError(ErrorCode::InvalidArgument, "window must be in (0, 1]");
  const std::size_t n = traj.samples();
  const auto first = static_cast<std::size_t>(std::floor((1.0 - opts.window) * static_cast<double>(n)));

  double amp[2];
  std::vector<Peak> peaks[2];
  const std::size_t comps[2] = {i1, i2};
  for (int j = 0; j < 2; ++j) {
    double lo = traj.at(first, comps[j]), hi = lo;
    for (std::size_t i = first; i < n; ++i) {
      lo = std::min(lo, traj.at(i, comps[j]));
      hi = std::max(hi, traj.at(i, comps[j]));
    }
    amp[j] = hi - lo;
    PeakOptions po;
    po.first = first;
    po.level = 0.5 * (hi + lo);
    peaks[j] = detect_peaks(traj, comps[j], po);
    if (peaks[j].size() < 3)
      throw NumericalError(ErrorCode::NoPeaks, "fewer than 3 peaks of component " + std::to_string(comps[j]));
  }

  const auto& p1 = peaks[0];
  const auto& p2 = peaks[1];
  const double period = (p1.back().time - p1.front().time) / static_cast<double>(p1.size() - 1);
  std::vector<double> phases;
  for (const auto& a : p1) {
    auto it = std::lower_bound(p2.begin(), p2.end(), a.time, [](const Peak& p, double t) { return p.time < t; });
    if (it == p2.end()) break;
    phases.push_back(kTwoPi * (it->time - a.time) / period);
  }
  if (phases.empty()) throw NumericalError(ErrorCode::NoPeaks, "no peak of the second component follows the first");
  const auto stats = circular_stats(phases);

  SummaryStats out{};
  out.psi = stats.mean;
  out.period = period;
  out.dA_signed = amp[1] - amp[0];
  out.dA_relative = std::abs(amp[0] - amp[1]) / std::min(amp[0], amp[1]);
  out.spread = stats.spread / kTwoPi;
  return out;
}

SummaryStats summarize(const Trajectory& traj, std::size_t i1, std::size_t i2, const SummaryOptions& opts) {
  const auto s = summarize_unchecked(traj, i1, i2, opts);
  if (!(s.spread <= opts.max_spread))
    throw NumericalError(ErrorCode::NotLocked, "peak offsets spread over " + std::to_string(s.spread) + " of a cycle");
  return s;
}

std::string to_json(const SummaryStats& s) {
  nlohmann::json j{{"psi", s.psi},
                   {"period", s.period},
                   {"dA_signed", s.dA_signed},
                   {"dA_relative", s.dA_relative},
                   {"spread", s.spread}};
  return j.dump();
}

}  // namespace synctrans
