#pragma once

#include <optional>
#include <string>
#include <vector>

#include "synctrans/dde.hpp"

namespace synctrans {

struct Peak {
  double time;
  double value;
};

struct PeakOptions {
  enum class Kind { Maxima, Minima } kind = Kind::Maxima;
  /// Maxima below (minima above) this level are dropped.
  std::optional<double> level;
  /// Restrict the search to samples [first, last).
  std::size_t first = 0;
  std::size_t last = static_cast<std::size_t>(-1);
};

/// Local extrema of one component, refined by the parabola through the
/// extremal sample and its two neighbours. Throws NoPeaks when none exist.
std::vector<Peak> detect_peaks(const Trajectory& traj, std::size_t component, const PeakOptions& opts = {});

struct SummaryStats {
  double psi;          ///< lag of i2's peaks behind i1's, as a phase in [0, 2pi)
  double period;       ///< mean spacing of i1's peaks
  double dA_signed;    ///< A2 - A1, peak-to-peak amplitudes
  double dA_relative;  ///< |A1 - A2| / min(A1, A2)
  double spread;       ///< circular std of the peak offsets as a fraction of a cycle
};

struct SummaryOptions {
  double window = 0.1;      ///< final fraction of the trajectory that is analysed
  double max_spread = 0.05; ///< locked iff spread <= max_spread
};

/// Statistics without the lock check. Only maxima above the window's
/// mid-level count as peaks; at least 3 per component are required.
SummaryStats summarize_unchecked(const Trajectory& traj, std::size_t i1, std::size_t i2,
                                 const SummaryOptions& opts = {});

/// As summarize_unchecked, but throws NotLocked when spread > max_spread.
SummaryStats summarize(const Trajectory& traj, std::size_t i1, std::size_t i2, const SummaryOptions& opts = {});

std::string to_json(const SummaryStats& s);

}  // namespace synctrans
