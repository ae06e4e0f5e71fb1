#pragma once

// Fixed-step RK4 integration of constant-lag delay differential equations.
// Delayed states are read back from a ring buffer of past (state, derivative)
// samples by cubic Hermite interpolation.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace synctrans {

struct DelaySystem {
  using Rhs = std::function<void(double t, std::span<const double> x,
                                 std::span<const std::span<const double>> delayed, std::span<double> dxdt)>;

  /// lags are sorted and deduplicated; a zero lag reads the current stage state.
  DelaySystem(std::size_t dim, std::vector<double> lags, Rhs rhs);

  std::size_t dim() const { return dim_; }
  const std::vector<double>& lags() const { return lags_; }
  double max_lag() const { return lags_.empty() ? 0.0 : lags_.back(); }
  /// Smallest strictly positive lag, or 0 when there is none.
  double min_positive_lag() const;

  void operator()(double t, std::span<const double> x, std::span<const std::span<const double>> delayed,
                  std::span<double> dxdt) const {
    rhs_(t, x, delayed, dxdt);
  }

 private:
  std::size_t dim_;
  std::vector<double> lags_;
  Rhs rhs_;
};

struct InitialHistory {
  using Fn = std::function<void(double t, std::span<double> out)>;
  Fn value;
  /// Optional; a centered finite difference of `value` is used when empty.
  Fn derivative;
};

/// Samples on a uniform grid t_k = t_first + k*step. Each sample keeps the
/// one-sided derivatives at its node, so a derivative jump at t = 0 between
/// the initial history and the solution is represented exactly.
class HistoryBuffer {
 public:
  HistoryBuffer(std::size_t dim, double step, std::size_t capacity);

  std::size_t dim() const { return dim_; }
  double step() const { return step_; }
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return capacity_; }
  double t_first() const;
  double t_last() const { return t_last_; }
  /// Time covered by the stored samples.
  double span() const { return count_ < 2 ? 0.0 : step_ * static_cast<double>(count_ - 1); }

  /// Appends a node at t_last + step (or at t for the first node).
  void push(double t, std::span<const double> x, std::span<const double> d_left);
  void set_right_derivative_of_last(std::span<const double> d_right);

  std::span<const double> last_state() const;

  /// Hermite interpolation; t must lie within [t_first, t_last].
  void interpolate(double t, std::span<double> out) const;

  /// Adds delta to component `comp` of every stored sample.
  void shift_component(std::size_t comp, double delta);

  /// Copy of this buffer with a larger capacity (keeps all samples).
  HistoryBuffer with_capacity(std::size_t capacity) const;

 private:
  std::size_t slot(std::size_t k) const { return (head_ + k) % capacity_; }

  std::size_t dim_;
  double step_;
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  double t_last_ = 0.0;
  // slot-major: [slot * dim + comp]
  std::vector<double> x_;
  std::vector<double> d_left_;
  std::vector<double> d_right_;
};

struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t dim = 0;
  std::vector<double> data;  ///< sample-major

  std::size_t samples() const { return dim == 0 ? 0 : data.size() / dim; }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double at(std::size_t i, std::size_t comp) const { return data[i * dim + comp]; }
  std::vector<double> component(std::size_t comp) const;
};

struct IntegrateOptions {
  /// Samples with t >= record_from are stored (every `stride`-th step).
  double record_from = 0.0;
  std::size_t stride = 1;
  /// Minimum history span kept in the returned buffer; at least max lag.
  double retain = 0.0;
};

struct DdeResult {
  Trajectory trajectory;
  HistoryBuffer history;
};

/// Integrates from t = 0 to t_end. Throws StepTooLarge when step exceeds a
/// quarter of the smallest positive lag and NonFiniteStateError on blow-up.
DdeResult integrate_dde(const DelaySystem& sys, const InitialHistory& init, double t_end, double step,
                        const IntegrateOptions& opts = {});

/// Continues a previous run from history.t_last() to the absolute time t_end
/// with the buffer's step.
DdeResult integrate_dde(const DelaySystem& sys, HistoryBuffer history, double t_end,
                        const IntegrateOptions& opts = {});

/// Header t,<names...> then one row per sample, every `every`-th sample.
void write_trajectory_csv(const std::string& path, const Trajectory& traj, const std::vector<std::string>& names,
                          std::size_t every = 1);

}  // namespace synctrans
