#include "synctrans/dde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "synctrans/error.hpp"
#include "synctrans/io.hpp"

namespace synctrans {

namespace {

constexpr double kPending = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kExtraSteps = 10;

std::size_t steps_covering(double span, double step) {
  return static_cast<std::size_t>(std::ceil(span / step - 1e-9));
}

}  // namespace

DelaySystem::DelaySystem(std::size_t dim, std::vector<double> lags, Rhs rhs)
    : dim_(dim), lags_(std::move(lags)), rhs_(std::move(rhs)) {
  if (dim_ == 0) throw NumericalError(ErrorCode::InvalidArgument, "DelaySystem dimension must be >= 1");
  if (!rhs_) throw NumericalError(ErrorCode::InvalidArgument, "DelaySystem needs a right-hand side");
  for (double lag : lags_)
    if (!(lag >= 0.0) || !std::isfinite(lag))
      throw NumericalError(ErrorCode::InvalidArgument, "lags must be finite and nonnegative");
  std::sort(lags_.begin(), lags_.end());
  lags_.erase(std::unique(lags_.begin(), lags_.end()), lags_.end());
}

double DelaySystem::min_positive_lag() const {
  for (double lag : lags_)
    if (lag > 0.0) return lag;
  return 0.0;
}

HistoryBuffer::HistoryBuffer(std::size_t dim, double step, std::size_t capacity)
    : dim_(dim),
      step_(step),
      capacity_(std::max<std::size_t>(capacity, 2)),
      x_(capacity_ * dim),
      d_left_(capacity_ * dim),
      d_right_(capacity_ * dim) {
  if (!(step > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "history step must be > 0");
}

double HistoryBuffer::t_first() const {
  return t_last_ - step_ * static_cast<double>(count_ == 0 ? 0 : count_ - 1);
}

void HistoryBuffer::push(double t, std::span<const double> x, std::span<const double> d_left) {
  std::size_t s;
  if (count_ < capacity_) {
    s = slot(count_);
    ++count_;
  } else {
    s = head_;
    head_ = (head_ + 1) % capacity_;
  }
  t_last_ = t;
  std::copy(x.begin(), x.end(), x_.begin() + s * dim_);
  if (d_left.empty()) {
    std::fill_n(d_left_.begin() + s * dim_, dim_, kPending);
  } else {
    std::copy(d_left.begin(), d_left.end(), d_left_.begin() + s * dim_);
  }
  std::fill_n(d_right_.begin() + s * dim_, dim_, kPending);
}

void HistoryBuffer::set_right_derivative_of_last(std::span<const double> d_right) {
  const std::size_t s = slot(count_ - 1);
  std::copy(d_right.begin(), d_right.end(), d_right_.begin() + s * dim_);
  if (std::isnan(d_left_[s * dim_])) std::copy(d_right.begin(), d_right.end(), d_left_.begin() + s * dim_);
}

std::span<const double> HistoryBuffer::last_state() const {
  return {x_.data() + slot(count_ - 1) * dim_, dim_};
}

void HistoryBuffer::interpolate(double t, std::span<double> out) const {
  if (count_ == 1) {
    std::copy_n(x_.begin() + slot(0) * dim_, dim_, out.begin());
    return;
  }
  const double u = (t - t_first()) / step_;
  const double n_intervals = static_cast<double>(count_ - 1);
  if (u < -1e-6 || u > n_intervals + 1e-6)
    throw NumericalError(ErrorCode::InvalidArgument,
                         "history lookup at t=" + std::to_string(t) + " outside the stored span");
  auto k = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, n_intervals - 1.0));
  const double s = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = (s3 - 2 * s2 + s) * step_;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = (s3 - s2) * step_;
  const double* x0 = x_.data() + slot(k) * dim_;
  const double* x1 = x_.data() + slot(k + 1) * dim_;
  const double* d0 = d_right_.data() + slot(k) * dim_;
  const double* d1 = d_left_.data() + slot(k + 1) * dim_;
  for (std::size_t c = 0; c < dim_; ++c) out[c] = h00 * x0[c] + h10 * d0[c] + h01 * x1[c] + h11 * d1[c];
}

void HistoryBuffer::shift_component(std::size_t comp, double delta) {
  for (std::size_t k = 0; k < count_; ++k) x_[slot(k) * dim_ + comp] += delta;
}

HistoryBuffer HistoryBuffer::with_capacity(std::size_t capacity) const {
  HistoryBuffer out(dim_, step_, std::max(capacity, count_));
  for (std::size_t k = 0; k < count_; ++k) {
    const std::size_t s = slot(k);
    const std::size_t o = k * dim_;
    std::copy_n(x_.begin() + s * dim_, dim_, out.x_.begin() + o);
    std::copy_n(d_left_.begin() + s * dim_, dim_, out.d_left_.begin() + o);
    std::copy_n(d_right_.begin() + s * dim_, dim_, out.d_right_.begin() + o);
  }
  out.count_ = count_;
  out.t_last_ = t_last_;
  return out;
}

std::vector<double> Trajectory::component(std::size_t comp) const {
  std::vector<double> out(samples());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, comp);
  return out;
}

DdeResult integrate_dde(const DelaySystem& sys, const InitialHistory& init, double t_end, double step,
                        const IntegrateOptions& opts) {
  if (!(step > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "step must be > 0");
  if (!(t_end > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "t_end must be > 0");
  if (!init.value) throw NumericalError(ErrorCode::InvalidArgument, "initial history has no value function");
  const std::size_t dim = sys.dim();
  const double retain = std::max(sys.max_lag(), opts.retain);
  const std::size_t back = steps_covering(sys.max_lag(), step) + 1;
  HistoryBuffer buffer(dim, step, std::max(back + 1, steps_covering(retain, step) + kExtraSteps + 1));

  std::vector<double> x(dim), d(dim), xp(dim), xm(dim);
  const double fd = 6e-6;
  for (std::size_t j = 0; j <= back; ++j) {
    const double t = -step * static_cast<double>(back - j);
    init.value(t, x);
    if (init.derivative) {
      init.derivative(t, d);
    } else {
      init.value(t + fd, xp);
      init.value(t - fd, xm);
      for (std::size_t c = 0; c < dim; ++c) d[c] = (xp[c] - xm[c]) / (2 * fd);
    }
    buffer.push(t, x, d);
    // interior nodes are smooth; the node at t = 0 keeps its left derivative only
    if (j < back) buffer.set_right_derivative_of_last(d);
  }
  return integrate_dde(sys, std::move(buffer), t_end, opts);
}

DdeResult integrate_dde(const DelaySystem& sys, HistoryBuffer history, double t_end, const IntegrateOptions& opts) {
  const std::size_t dim = sys.dim();
  const double h = history.step();
  if (history.dim() != dim) throw NumericalError(ErrorCode::InvalidArgument, "history dimension mismatch");
  if (history.size() == 0) throw NumericalError(ErrorCode::InvalidArgument, "empty history");
  const double min_lag = sys.min_positive_lag();
  if (min_lag > 0.0 && h > min_lag / 4.0 * (1 + 1e-12))
    throw NumericalError(ErrorCode::StepTooLarge,
                         "step " + std::to_string(h) + " exceeds a quarter of the smallest lag " + std::to_string(min_lag));
  if (opts.stride == 0) throw NumericalError(ErrorCode::InvalidArgument, "stride must be >= 1");

  const double retain = std::max(sys.max_lag(), opts.retain);
  const std::size_t need = steps_covering(retain, h) + kExtraSteps + 1;
  if (history.capacity() < need) history = history.with_capacity(need);
  if (history.span() < sys.max_lag() - 1e-9 * h)
    throw NumericalError(ErrorCode::InvalidArgument, "history span shorter than the largest lag");

  const double t_start = history.t_last();
  const double n_real = (t_end - t_start) / h;
  if (!(n_real > 0.5)) throw NumericalError(ErrorCode::InvalidArgument, "t_end must lie beyond the history");
  const auto n = static_cast<std::size_t>(std::llround(n_real));

  const auto& lags = sys.lags();
  const std::size_t nl = lags.size();
  std::vector<double> delayed_store(nl * dim);
  std::vector<std::span<const double>> delayed(nl);
  std::vector<double> x(history.last_state().begin(), history.last_state().end());
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  auto eval = [&](double t, std::span<const double> state, std::span<double> out) {
    for (std::size_t l = 0; l < nl; ++l) {
      if (lags[l] == 0.0) {
        delayed[l] = state;
      } else {
        std::span<double> slot(delayed_store.data() + l * dim, dim);
        history.interpolate(t - lags[l], slot);
        delayed[l] = slot;
      }
    }
    sys(t, state, delayed, out);
  };

  Trajectory traj;
  traj.dim = dim;
  traj.dt = h * static_cast<double>(opts.stride);
  bool recording = false;
  std::size_t since_record = 0;
  auto maybe_record = [&](double t) {
    if (!recording) {
      if (t < opts.record_from - 1e-9 * h) return;
      recording = true;
      traj.t0 = t;
      since_record = 0;
    }
    if (since_record % opts.stride == 0) traj.data.insert(traj.data.end(), x.begin(), x.end());
    ++since_record;
  };

  maybe_record(t_start);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t_start + h * static_cast<double>(k);
    eval(t, x, k1);
    history.set_right_derivative_of_last(k1);
    for (std::size_t c = 0; c < dim; ++c) tmp[c] = x[c] + 0.5 * h * k1[c];
    eval(t + 0.5 * h, tmp, k2);
    for (std::size_t c = 0; c < dim; ++c) tmp[c] = x[c] + 0.5 * h * k2[c];
    eval(t + 0.5 * h, tmp, k3);
    for (std::size_t c = 0; c < dim; ++c) tmp[c] = x[c] + h * k3[c];
    eval(t + h, tmp, k4);
    bool finite = true;
    for (std::size_t c = 0; c < dim; ++c) {
      x[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
      finite = finite && std::isfinite(x[c]);
    }
    const double t_next = t_start + h * static_cast<double>(k + 1);
    if (!finite) throw NonFiniteStateError(t_next, "state became non-finite at t=" + std::to_string(t_next));
    history.push(t_next, x, {});
    maybe_record(t_next);
  }
  return {std::move(traj), std::move(history)};
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, const std::vector<std::string>& names,
                          std::size_t every) {
  if (names.size() != traj.dim) throw NumericalError(ErrorCode::InvalidArgument, "column names do not match dim");
  std::vector<std::string> header{"t"};
  header.insert(header.end(), names.begin(), names.end());
  CsvWriter csv(path, header);
  const std::size_t stride = std::max<std::size_t>(every, 1);
  for (std::size_t i = 0; i < traj.samples(); i += stride) {
    auto row = csv.row();
    row.add(traj.time(i));
    for (std::size_t c = 0; c < traj.dim; ++c) row.add(traj.at(i, c));
  }
}

}  // namespace synctrans
