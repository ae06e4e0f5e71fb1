#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "synctrans/phase_model.hpp"

namespace synctrans {

/// Quasi-static protocol: each alpha is integrated for settle_time from the
/// previous end state plus a uniform random kick in [-scale, +scale].
struct SweepProtocol {
  std::vector<double> alpha_grid;
  double settle_time = 5000.0;
  double perturbation_scale = 1e-3;
  std::uint64_t rng_seed = 1;
  double integrator_step = 0.01;

  /// Throws InvalidArgument on a non-monotone grid or nonpositive times.
  void validate() const;
};

struct SweepPoint {
  double alpha;
  double psi_star;  ///< in [0, 2pi)
};

/// Walks alpha_grid in the given order. The first point starts from
/// psi_init without a kick. psi* is the mean over the last 1% of the run.
std::vector<SweepPoint> pseudocontinuation_sweep(const HarmonicCoupling& c, const SweepProtocol& proto,
                                                 double psi_init);

enum class RegionLabel { ZeroContPiDisc, ZeroDiscPiCont, Same, Undetermined };

std::string_view to_string(RegionLabel label);

/// Pure function of the two tags; a missing root or a Degenerate tag gives Undetermined.
RegionLabel combine_criticality(std::optional<Criticality> zero, std::optional<Criticality> pi);

struct CriticalityMap {
  std::vector<double> r_grid;
  std::vector<double> s_grid;
  // Row-major, index = ir * s_grid.size() + is.
  std::vector<std::optional<Criticality>> class0;
  std::vector<std::optional<Criticality>> class_pi;
  std::vector<RegionLabel> combined;

  std::size_t index(std::size_t ir, std::size_t is) const { return ir * s_grid.size() + is; }
};

/// Per cell: the bifurcation nearest pi/2 for each base, classified. Cells run
/// in parallel (OpenMP); results are written by grid index.
CriticalityMap criticality_map(double gamma2, double gamma3, const std::vector<double>& r_grid,
                               const std::vector<double>& s_grid);

/// Single-threaded loop over the same cell kernel; kept for testing.
CriticalityMap criticality_map_reference(double gamma2, double gamma3, const std::vector<double>& r_grid,
                                         const std::vector<double>& s_grid);

}  // namespace synctrans
