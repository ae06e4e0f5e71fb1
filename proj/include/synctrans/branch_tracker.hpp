#pragma once

// Simulation-based tracking of the locked states of two identical Brusselators
// coupled through the engineered delayed feedback:
//   x_i' = ... + K (k1 x_j(t - tau - tau1) + k2 x_j(t - tau - tau2)^2).

#include <cstdint>
#include <string>
#include <vector>

#include "synctrans/brusselator.hpp"
#include "synctrans/engineering.hpp"
#include "synctrans/peaks.hpp"

namespace synctrans {

/// State (x1, y1, x2, y2); lags tau + tau1 and tau + tau2.
DelaySystem make_coupled_system(const BrusselatorParams& p, const EngineeredCoupling& c);

struct InitialCondition {
  enum class Kind { InPhase, AntiPhase, OutOfPhase } kind = Kind::InPhase;
  double alpha = 0.0;

  static InitialCondition in_phase() { return {Kind::InPhase, 0.0}; }
  static InitialCondition anti_phase() { return {Kind::AntiPhase, 0.0}; }
  static InitialCondition out_of_phase(double alpha) { return {Kind::OutOfPhase, alpha}; }

  /// Phase lag of oscillator 2 in the initial history.
  double offset() const;
  std::string label() const;
};

/// Oscillator 1 on the cycle, oscillator 2 on the cycle shifted by alpha.
InitialHistory coupled_history(const LimitCycle& lc, double alpha);

enum class AttractorClass { InPhase, AntiPhase, OutOfPhase, NotLocked };
enum class Direction { Forward, Backward };

std::string_view to_string(AttractorClass c);
std::string_view to_string(Direction d);

/// InPhase / AntiPhase within `band` rad of 0 / pi, OutOfPhase otherwise.
AttractorClass classify_psi(double psi, double band = 0.2);

struct BranchSummary {
  double param;
  SummaryStats stats;
  AttractorClass cls;
  Direction direction;
  bool diverged = false;
};

struct SweepSettings {
  double settle_periods = 100.0;
  double tail_periods = 10.0;
  double steps_per_period = 2000.0;
  bool warm_start = true;
  double perturbation = 1e-3;
  std::uint64_t seed = 1;
  double max_spread = 0.05;
  double band = 0.2;
};

/// Quasi-static sweep of the common delay. Backward sweeps walk the grid from
/// its end; the result is always returned in grid order. With warm_start each
/// point continues the previous history, kicked on oscillator 2 by a uniform
/// offset in [-perturbation, perturbation]; otherwise every point starts
/// from `ic`. Divergent or unlocked points are reported as NotLocked.
std::vector<BranchSummary> tau_sweep(const BrusselatorParams& p, const LimitCycle& lc, const EngineeredCoupling& c,
                                     const std::vector<double>& tau_grid, Direction dir, const InitialCondition& ic,
                                     const SweepSettings& s = {});

struct BistabilityInterval {
  std::size_t first;  ///< grid indices, inclusive
  std::size_t last;
  double lo;
  double hi;
  std::vector<double> psi_forward;
  std::vector<double> psi_backward;
};

struct BistabilityReport {
  double threshold;
  std::vector<BistabilityInterval> intervals;
};

/// Cells where both directions are locked and the exchange-symmetric circular
/// distance of their psi exceeds threshold; adjacent cells are merged.
/// Throws GridMismatch when the two lists do not share a grid.
BistabilityReport detect_bistability(const std::vector<BranchSummary>& forward,
                                     const std::vector<BranchSummary>& backward, double threshold = 0.5);

struct MapCell {
  std::vector<AttractorClass> cls;  ///< one entry per initial condition
  std::vector<double> psi;
  std::vector<double> dA_relative;
  bool bistable = false;
  bool nonfinite = false;
};

struct ParamMap {
  std::vector<double> K_grid;
  std::vector<double> tau_grid;
  std::vector<InitialCondition> ics;
  std::vector<MapCell> cells;  ///< index iK * tau_grid.size() + itau

  const MapCell& at(std::size_t iK, std::size_t itau) const { return cells[iK * tau_grid.size() + itau]; }
};

struct MapSettings {
  double settle_periods = 100.0;
  double tail_periods = 10.0;
  double steps_per_period = 2000.0;
  double max_spread = 0.05;
  double band = 0.2;
  double bistable_threshold = 0.5;
  /// Added to the phase offset of every initial condition. The synchronous
  /// state is invariant, so an exact in-phase start never leaves it.
  double ic_kick = 0.05;
};

/// Every cell is simulated from every initial condition. Rows in K run in
/// parallel (OpenMP).
ParamMap two_param_map(const BrusselatorParams& p, const LimitCycle& lc, const EngineeredCoupling& c,
                       const std::vector<double>& K_grid, const std::vector<double>& tau_grid,
                       const std::vector<InitialCondition>& ics, const MapSettings& s = {});

/// Same cells, one at a time.
ParamMap two_param_map_reference(const BrusselatorParams& p, const LimitCycle& lc, const EngineeredCoupling& c,
                                 const std::vector<double>& K_grid, const std::vector<double>& tau_grid,
                                 const std::vector<InitialCondition>& ics, const MapSettings& s = {});

/// Both x-equations receive K (x1(t - tau) + x2(t - tau) - m(t)), m being the
/// mean of x1 + x2 over the trailing 10 periods. Oscillator 2 starts shifted by alpha.
Trajectory mean_field_feedback_sim(const BrusselatorParams& p, const LimitCycle& lc, double K, double tau,
                                   double t_end, double alpha = 0.0, double steps_per_period = 2000.0);

void write_sweep_csv(const std::string& path, const std::vector<BranchSummary>& rows, double period);
void write_map_csv(const std::string& path, const ParamMap& map, double period);
std::string to_json(const BistabilityReport& r);

}  // namespace synctrans
