#include "synctrans/branch_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "synctrans/angles.hpp"
#include "synctrans/error.hpp"
#include "synctrans/io.hpp"

namespace synctrans {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SummaryStats nan_stats() { return {kNaN, kNaN, kNaN, kNaN, kNaN}; }

struct CellOutcome {
  SummaryStats stats;
  AttractorClass cls;
  bool diverged;
};

CellOutcome assess(const Trajectory& traj, double max_spread, double band) {
  try {
    SummaryOptions so;
    so.window = 1.0;
    const auto stats = summarize_unchecked(traj, 0, 2, so);
    const auto cls = stats.spread <= max_spread ? classify_psi(stats.psi, band) : AttractorClass::NotLocked;
    return {stats, cls, false};
  } catch (const NumericalError& e) {
    if (e.code() != ErrorCode::NoPeaks) throw;
    return {nan_stats(), AttractorClass::NotLocked, false};
  }
}

double retain_for(const EngineeredCoupling& c, double max_tau) { return max_tau + std::max(c.tau1, c.tau2); }

CellOutcome simulate_cell(const BrusselatorParams& p, const LimitCycle& lc, const EngineeredCoupling& c,
                          const InitialCondition& ic, const MapSettings& s) {
  const double T = lc.period;
  const auto sys = make_coupled_system(p, c);
  const double t_end = (s.settle_periods + s.tail_periods) * T;
  IntegrateOptions opts;
  opts.record_from = s.settle_periods * T;
  try {
    const auto res = integrate_dde(sys, coupled_history(lc, ic.offset() + s.ic_kick), t_end, T / s.steps_per_period, opts);
    return assess(res.trajectory, s.max_spread, s.band);
  } catch (const NonFiniteStateError&) {
    return {nan_stats(), AttractorClass::NotLocked, true};
  }
}

MapCell map_cell(const BrusselatorParams& p, const LimitCycle& lc, EngineeredCoupling c, double K, double tau,
                 const std::vector<InitialCondition>& ics, const MapSettings& s) {
  c.K = K;
  c.tau = tau;
  MapCell cell;
  for (const auto& ic : ics) {
    const auto out = simulate_cell(p, lc, c, ic, s);
    cell.cls.push_back(out.cls);
    cell.psi.push_back(out.stats.psi);
    cell.dA_relative.push_back(out.stats.dA_relative);
    cell.nonfinite = cell.nonfinite || out.diverged;
  }
  for (std::size_t a = 0; a < ics.size(); ++a)
    for (std::size_t b = a + 1; b < ics.size(); ++b)
      if (cell.cls[a] != AttractorClass::NotLocked && cell.cls[b] != AttractorClass::NotLocked &&
          symmetric_distance(cell.psi[a], cell.psi[b]) > s.bistable_threshold)
        cell.bistable = true;
  return cell;
}

ParamMap empty_map(const std::vector<double>& K_grid, const std::vector<double>& tau_grid,
                   const std::vector<InitialCondition>& ics, double period) {
  if (K_grid.empty() || tau_grid.empty() || ics.empty())
    throw NumericalError(ErrorCode::InvalidArgument, "map grids and initial conditions must be nonempty");
  for (double tau : tau_grid)
    if (tau < 0.0 || tau > period * (1 + 1e-12))
      throw NumericalError(ErrorCode::InvalidArgument, "tau grid must lie in [0, T]");
  ParamMap map{K_grid, tau_grid, ics, {}};
  map.cells.resize(K_grid.size() * tau_grid.size());
  return map;
}

}  // namespace

DelaySystem make_coupled_system(const BrusselatorParams& p, const EngineeredCoupling& c) {
  const double l1 = c.tau + c.tau1;
  const double l2 = c.tau + c.tau2;
  std::vector<double> lags{std::min(l1, l2), std::max(l1, l2)};
  if (lags[0] == lags[1]) lags.pop_back();
  const std::size_t i1 = l1 == lags[0] ? 0 : 1;
  const std::size_t i2 = l2 == lags[0] ? 0 : 1;
  const double K = c.K, k1 = c.k1, k2 = c.k2;
  return DelaySystem(4, lags,
                     [p, K, k1, k2, i1, i2](double, std::span<const double> s,
                                            std::span<const std::span<const double>> d, std::span<double> out) {
                       for (int i = 0; i < 2; ++i) {
                         const std::size_t self = 2 * i, other = 2 * (1 - i);
                         const auto f = brusselator_rhs(s[self], s[self + 1], p);
                         const double xa = d[i1][other];
                         const double xb = d[i2][other];
                         out[self] = f[0] + K * (k1 * xa + k2 * xb * xb);
                         out[self + 1] = f[1];
                       }
                     });
}

double InitialCondition::offset() const {
  switch (kind) {
    case Kind::InPhase: return 0.0;
    case Kind::AntiPhase: return kPi;
    case Kind::OutOfPhase: return alpha;
  }
  return 0.0;
}

std::string InitialCondition::label() const {
  switch (kind) {
    case Kind::InPhase: return "in_phase";
    case Kind::AntiPhase: return "anti_phase";
    case Kind::OutOfPhase: return "out_of_phase_" + format_double(alpha);
  }
  return "unknown";
}

InitialHistory coupled_history(const LimitCycle& lc, double alpha) {
  const auto a = fourier_shift(lc, 0.0);
  const auto b = fourier_shift(lc, alpha);
  InitialHistory h;
  h.value = [a, b](double t, std::span<double> out) {
    a.value(t, out.subspan(0, 2));
    b.value(t, out.subspan(2, 2));
  };
  h.derivative = [a, b](double t, std::span<double> out) {
    a.derivative(t, out.subspan(0, 2));
    b.derivative(t, out.subspan(2, 2));
  };
  return h;
}

std::string_view to_string(AttractorClass c) {
  switch (c) {
    case AttractorClass::InPhase: return "InPhase";
    case AttractorClass::AntiPhase: return "AntiPhase";
    case AttractorClass::OutOfPhase: return "OutOfPhase";
    case AttractorClass::NotLocked: return "NotLocked";
  }
  return "Unknown";
}

std::string_view to_string(Direction d) { return d == Direction::Forward ? "Forward" : "Backward"; }

AttractorClass classify_psi(double psi, double band) {
  if (!std::isfinite(psi)) return AttractorClass::NotLocked;
  if (circular_distance(psi, 0.0) <= band) return AttractorClass::InPhase;
  if (circular_distance(psi, kPi) <= band) return AttractorClass::AntiPhase;
  return AttractorClass::OutOfPhase;
}

std::vector<BranchSummary> tau_sweep(const BrusselatorParams& p, const LimitCycle& lc, const EngineeredCoupling& c,
                                     const std::vector<double>& tau_grid, Direction dir, const InitialCondition& ic,
                                     const SweepSettings& s) {
  const double T = lc.period;
  if (tau_grid.empty()) throw NumericalError(ErrorCode::InvalidArgument, "empty tau grid");
  if (s.settle_periods < 20.0) throw NumericalError(ErrorCode::InvalidArgument, "settle must be >= 20 periods");
  if (!(s.tail_periods > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "tail must be > 0 periods");
  for (double tau : tau_grid)
    if (tau < 0.0 || tau > T * (1 + 1e-12)) throw NumericalError(ErrorCode::InvalidArgument, "tau grid must lie in [0, T]");

  const double h = T / s.steps_per_period;
  const double retain = retain_for(c, *std::max_element(tau_grid.begin(), tau_grid.end()));
  const double run = (s.settle_periods + s.tail_periods) * T;
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> kick(-s.perturbation, s.perturbation);

  std::vector<std::size_t> order(tau_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = dir == Direction::Forward ? i : order.size() - 1 - i;

  std::vector<BranchSummary> out(tau_grid.size());
  std::optional<HistoryBuffer> history;
  for (std::size_t i : order) {
    EngineeredCoupling ci = c;
    ci.tau = tau_grid[i];
    const auto sys = make_coupled_system(p, ci);
    IntegrateOptions opts;
    opts.retain = retain;
    BranchSummary row{tau_grid[i], nan_stats(), AttractorClass::NotLocked, dir, false};
    try {
      DdeResult res = [&] {
        if (history && s.warm_start) {
          // kick oscillator 2 so that symmetric states do not pin the continuation
          history->shift_component(2, kick(rng));
          history->shift_component(3, kick(rng));
          const double t_end = history->t_last() + run;
          opts.record_from = t_end - s.tail_periods * T;
          return integrate_dde(sys, std::move(*history), t_end, opts);
        }
        opts.record_from = s.settle_periods * T;
        return integrate_dde(sys, coupled_history(lc, ic.offset()), run, h, opts);
      }();
      const auto a = assess(res.trajectory, s.max_spread, s.band);
      row.stats = a.stats;
      row.cls = a.cls;
      history = std::move(res.history);
    } catch (const NonFiniteStateError&) {
      row.diverged = true;
      history.reset();
    }
    out[i] = row;
  }
  return out;
}

BistabilityReport detect_bistability(const std::vector<BranchSummary>& forward,
                                     const std::vector<BranchSummary>& backward, double threshold) {
  if (forward.size() != backward.size())
    throw NumericalError(ErrorCode::GridMismatch, "forward and backward sweeps differ in length");
  BistabilityReport report{threshold, {}};
  std::optional<BistabilityInterval> open;
  for (std::size_t i = 0; i < forward.size(); ++i) {
    const auto& f = forward[i];
    const auto& b = backward[i];
    if (std::abs(f.param - b.param) > 1e-12 * std::max(1.0, std::abs(f.param)))
      throw NumericalError(ErrorCode::GridMismatch, "sweeps use different parameter grids");
    const bool differ = f.cls != AttractorClass::NotLocked && b.cls != AttractorClass::NotLocked &&
                        symmetric_distance(f.stats.psi, b.stats.psi) > threshold;
    if (differ) {
      if (!open) open = BistabilityInterval{i, i, f.param, f.param, {}, {}};
      open->last = i;
      open->hi = f.param;
      open->psi_forward.push_back(f.stats.psi);
      open->psi_backward.push_back(b.stats.psi);
    } else if (open) {
      report.intervals.push_back(std::move(*open));
      open.reset();
    }
  }
  if (open) report.intervals.push_back(std::move(*open));
  return report;
}

ParamMap two_param_map(const BrusselatorParams& p, const LimitCycle& lc, const EngineeredCoupling& c,
                       const std::vector<double>& K_grid, const std::vector<double>& tau_grid,
                       const std::vector<InitialCondition>& ics, const MapSettings& s) {
  auto map = empty_map(K_grid, tau_grid, ics, lc.period);
  const auto nK = static_cast<long>(K_grid.size());
  const std::size_t nt = tau_grid.size();
#pragma omp parallel for schedule(dynamic, 1)
  for (long iK = 0; iK < nK; ++iK)
    for (std::size_t it = 0; it < nt; ++it)
      map.cells[iK * nt + it] = map_cell(p, lc, c, K_grid[iK], tau_grid[it], ics, s);
  return map;
}

ParamMap two_param_map_reference(const BrusselatorParams& p, const LimitCycle& lc, const EngineeredCoupling& c,
                                 const std::vector<double>& K_grid, const std::vector<double>& tau_grid,
                                 const std::vector<InitialCondition>& ics, const MapSettings& s) {
  auto map = empty_map(K_grid, tau_grid, ics, lc.period);
  for (std::size_t iK = 0; iK < K_grid.size(); ++iK)
    for (std::size_t it = 0; it < tau_grid.size(); ++it)
      map.cells[iK * tau_grid.size() + it] = map_cell(p, lc, c, K_grid[iK], tau_grid[it], ics, s);
  return map;
}

Trajectory mean_field_feedback_sim(const BrusselatorParams& p, const LimitCycle& lc, double K, double tau,
                                   double t_end, double alpha, double steps_per_period) {
  const double T = lc.period;
  if (t_end < 50.0 * T * (1 - 1e-9)) throw NumericalError(ErrorCode::InvalidArgument, "t_end must cover >= 50 periods");
  if (tau < 0.0) throw NumericalError(ErrorCode::InvalidArgument, "tau must be >= 0");
  const double window = 10.0 * T;
  const double m0 = 2.0 * lc.fx.coeff(0).real();
  std::vector<double> lags{tau, window};
  const std::size_t i_tau = tau <= window ? 0 : 1;
  const std::size_t i_win = tau <= window ? (tau == window ? 0 : 1) : 0;

  // Augmented with S' = x1 + x2 so the running mean is (S(t) - S(t - W)) / W.
  DelaySystem sys(5, lags,
                  [p, K, window, i_tau, i_win](double, std::span<const double> s,
                                               std::span<const std::span<const double>> d, std::span<double> out) {
                    const double mean = (s[4] - d[i_win][4]) / window;
                    const double force = K * (d[i_tau][0] + d[i_tau][2] - mean);
                    for (int i = 0; i < 2; ++i) {
                      const auto f = brusselator_rhs(s[2 * i], s[2 * i + 1], p);
                      out[2 * i] = f[0] + force;
                      out[2 * i + 1] = f[1];
                    }
                    out[4] = s[0] + s[2];
                  });
  const auto base = coupled_history(lc, alpha);
  InitialHistory init;
  init.value = [base, m0](double t, std::span<double> out) {
    base.value(t, out.subspan(0, 4));
    out[4] = m0 * t;
  };
  init.derivative = [base, m0](double t, std::span<double> out) {
    base.derivative(t, out.subspan(0, 4));
    out[4] = m0;
  };
  const auto res = integrate_dde(sys, init, t_end, T / steps_per_period);
  const auto& full = res.trajectory;
  Trajectory traj{full.t0, full.dt, 4, {}};
  traj.data.reserve(full.samples() * 4);
  for (std::size_t i = 0; i < full.samples(); ++i)
    for (std::size_t c = 0; c < 4; ++c) traj.data.push_back(full.at(i, c));
  return traj;
}

void write_sweep_csv(const std::string& path, const std::vector<BranchSummary>& rows, double period) {
  CsvWriter csv(path, {"tau_over_T", "psi", "period", "dA_signed", "dA_relative", "class", "direction"});
  for (const auto& r : rows)
    csv.row()
        .add(r.param / period)
        .add(r.stats.psi)
        .add(r.stats.period)
        .add(r.stats.dA_signed)
        .add(r.stats.dA_relative)
        .add(to_string(r.cls))
        .add(to_string(r.direction));
}

void write_map_csv(const std::string& path, const ParamMap& map, double period) {
  std::vector<std::string> header{"K", "tau_over_T"};
  for (const auto& ic : map.ics) header.push_back("class_" + ic.label());
  for (const auto& ic : map.ics) header.push_back("psi_" + ic.label());
  header.insert(header.end(), {"bistable", "nonfinite", "dA_relative"});
  CsvWriter csv(path, header);
  for (std::size_t iK = 0; iK < map.K_grid.size(); ++iK) {
    for (std::size_t it = 0; it < map.tau_grid.size(); ++it) {
      const auto& cell = map.at(iK, it);
      auto row = csv.row();
      row.add(map.K_grid[iK]).add(map.tau_grid[it] / period);
      for (auto c : cell.cls) row.add(to_string(c));
      for (double v : cell.psi) row.add(v);
      double dA = kNaN;
      for (std::size_t k = 0; k < cell.cls.size(); ++k)
        if (cell.cls[k] == AttractorClass::OutOfPhase && !(cell.dA_relative[k] <= dA)) dA = cell.dA_relative[k];
      row.add(cell.bistable).add(cell.nonfinite).add(dA);
    }
  }
}

std::string to_json(const BistabilityReport& r) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : r.intervals)
    intervals.push_back({{"first", iv.first},
                         {"last", iv.last},
                         {"lo", iv.lo},
                         {"hi", iv.hi},
                         {"psi_forward", iv.psi_forward},
                         {"psi_backward", iv.psi_backward}});
  nlohmann::json j{{"threshold", r.threshold}, {"intervals", intervals}};
  return j.dump();
}

}  // namespace synctrans
