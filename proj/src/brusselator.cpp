#include "synctrans/brusselator.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "synctrans/angles.hpp"
#include "synctrans/error.hpp"

namespace synctrans {

namespace {

using State = std::array<double, 2>;

State rk4(const State& s, double h, const BrusselatorParams& p) {
  auto f = [&](const State& u) { return brusselator_rhs(u[0], u[1], p); };
  const State k1 = f(s);
  const State k2 = f({s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]});
  const State k3 = f({s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]});
  const State k4 = f({s[0] + h * k3[0], s[1] + h * k3[1]});
  return {s[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          s[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

State advance(State s, double duration, std::size_t steps, const BrusselatorParams& p) {
  const double h = duration / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) s = rk4(s, h, p);
  return s;
}

// Root in [0, 1] of the cubic Hermite interpolant of x over one step.
double hermite_crossing(double x0, double x1, double d0, double d1) {
  auto xs = [&](double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * d1;
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (xs(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

nlohmann::json coeffs_json(const FourierSeries& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (int n = -f.order(); n <= f.order(); ++n) arr.push_back({f.coeff(n).real(), f.coeff(n).imag()});
  return arr;
}

}  // namespace

void BrusselatorParams::validate() const {
  if (!(A > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "Brusselator A must be > 0");
  if (!(B > 1.0 + A * A))
    throw NumericalError(ErrorCode::InvalidArgument, "Brusselator needs B > 1 + A^2 for oscillations");
}

std::array<double, 2> brusselator_rhs(double x, double y, const BrusselatorParams& p) {
  const double f = (p.B / p.A) * x * x + 2.0 * p.A * x * y + x * x * y;
  const double a2 = p.A * p.A;
  return {(p.B - 1.0) * x + a2 * y + f, -p.B * x - a2 * y - f};
}

std::array<double, 4> brusselator_jacobian(double x, double y, const BrusselatorParams& p) {
  const double fx = 2.0 * (p.B / p.A) * x + 2.0 * p.A * y + 2.0 * x * y;
  const double fy = 2.0 * p.A * x + x * x;
  const double a2 = p.A * p.A;
  return {p.B - 1.0 + fx, a2 + fy, -p.B - fx, -a2 - fy};
}

double LimitCycle::omega() const { return kTwoPi / period; }

std::array<double, 2> LimitCycle::state_at(double theta) const { return {fx.at(theta), fy.at(theta)}; }

LimitCycle find_limit_cycle(const BrusselatorParams& p, const LimitCycleOptions& opts) {
  p.validate();
  if (opts.samples < 2 * opts.order + 1)
    throw NumericalError(ErrorCode::InvalidArgument, "need samples >= 2*order+1");
  const double h = opts.step;
  State s{0.1, 0.0};
  double t = 0.0;
  double last_cross = NAN, last_period = NAN, last_y = NAN;
  State cross_state{};
  int crossings = 0;
  bool converged = false;
  const double t_cap = 100.0 * opts.max_crossings;
  while (!converged) {
    const State next = rk4(s, h, p);
    if (s[0] < 0.0 && next[0] >= 0.0) {
      const auto d0 = brusselator_rhs(s[0], s[1], p);
      const auto d1 = brusselator_rhs(next[0], next[1], p);
      const double frac = hermite_crossing(s[0], next[0], d0[0] * h, d1[0] * h);
      const State c = rk4(s, frac * h, p);
      const double tc = t + frac * h;
      if (!std::isnan(last_cross)) {
        const double period = tc - last_cross;
        if (!std::isnan(last_period) && std::abs(period - last_period) < opts.tol &&
            std::abs(c[1] - last_y) < opts.tol)
          converged = true;
        last_period = period;
      }
      last_cross = tc;
      last_y = c[1];
      cross_state = c;
      if (++crossings > opts.max_crossings && !converged)
        throw NumericalError(ErrorCode::NoCycleFound, "section return times did not settle");
    }
    s = next;
    t += h;
    if (t > t_cap && !converged) throw NumericalError(ErrorCode::NoCycleFound, "no recurrent section crossings");
  }

  // Newton on the return time so that x(T) = 0 with the resampling step.
  const std::size_t sub = 16;
  const std::size_t total = static_cast<std::size_t>(opts.samples) * sub;
  double period = last_period;
  for (int it = 0; it < 4; ++it) {
    const State end = advance(cross_state, period, total, p);
    period -= end[0] / brusselator_rhs(end[0], end[1], p)[0];
  }

  LimitCycle lc;
  lc.period = period;
  lc.x.resize(opts.samples);
  lc.y.resize(opts.samples);
  State u = cross_state;
  const double hs = period / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) {
    if (i % sub == 0) {
      lc.x[i / sub] = u[0];
      lc.y[i / sub] = u[1];
    }
    u = rk4(u, hs, p);
  }
  lc.closure = std::hypot(u[0] - cross_state[0], u[1] - cross_state[1]);
  lc.fx = fourier_coeffs(lc.x, opts.order);
  lc.fy = fourier_coeffs(lc.y, opts.order);
  return lc;
}

PhaseResponseCurve compute_prc(const LimitCycle& lc, const BrusselatorParams& p, double tol, int max_periods) {
  const std::size_t n = lc.x.size();
  const std::size_t sub = 16;
  const std::size_t steps = n * sub;
  const double T = lc.period;
  const double h = T / static_cast<double>(steps);
  const double omega = lc.omega();

  // Orbit at half steps: index 2j is t = j h.
  std::vector<State> orbit(2 * steps + 1);
  orbit[0] = {lc.x[0], lc.y[0]};
  for (std::size_t i = 0; i < 2 * steps; ++i) orbit[i + 1] = rk4(orbit[i], 0.5 * h, p);

  auto adj = [&](std::size_t idx, const State& z) -> State {
    const auto J = brusselator_jacobian(orbit[idx][0], orbit[idx][1], p);
    // dZ/dt = -J^T Z; stepping backward in t flips the sign.
    return {J[0] * z[0] + J[2] * z[1], J[1] * z[0] + J[3] * z[1]};
  };
  const auto f0 = brusselator_rhs(orbit[0][0], orbit[0][1], p);
  const double f0sq = f0[0] * f0[0] + f0[1] * f0[1];
  State z{omega * f0[0] / f0sq, omega * f0[1] / f0sq};

  std::vector<double> zx(n), zy(n), prev_x(n), prev_y(n);
  PhaseResponseCurve prc;
  prc.omega = omega;
  bool converged = false;
  int period_count = 0;
  while (!converged) {
    if (++period_count > max_periods)
      throw NumericalError(ErrorCode::AdjointNotConverged,
                           "adjoint did not settle within " + std::to_string(max_periods) + " periods");
    for (std::size_t j = steps; j > 0; --j) {
      if (j % sub == 0 && j < steps) {
        zx[j / sub] = z[0];
        zy[j / sub] = z[1];
      }
      const std::size_t i = 2 * j;
      const State k1 = adj(i, z);
      const State k2 = adj(i - 1, {z[0] + 0.5 * h * k1[0], z[1] + 0.5 * h * k1[1]});
      const State k3 = adj(i - 1, {z[0] + 0.5 * h * k2[0], z[1] + 0.5 * h * k2[1]});
      const State k4 = adj(i - 2, {z[0] + h * k3[0], z[1] + h * k3[1]});
      z = {z[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
           z[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
    }
    zx[0] = z[0];
    zy[0] = z[1];
    const double scale = omega / (z[0] * f0[0] + z[1] * f0[1]);
    z = {z[0] * scale, z[1] * scale};
    for (std::size_t k = 0; k < n; ++k) {
      zx[k] *= scale;
      zy[k] *= scale;
    }
    if (period_count >= 2) {
      double diff = 0.0, mag = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        diff = std::max({diff, std::abs(zx[k] - prev_x[k]), std::abs(zy[k] - prev_y[k])});
        mag = std::max({mag, std::abs(zx[k]), std::abs(zy[k])});
      }
      converged = diff <= tol * mag;
    }
    prev_x = zx;
    prev_y = zy;
  }

  double residual = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& u = orbit[2 * sub * k];
    const auto f = brusselator_rhs(u[0], u[1], p);
    residual = std::max(residual, std::abs(zx[k] * f[0] + zy[k] * f[1] - omega) / omega);
  }
  prc.zx = std::move(zx);
  prc.zy = std::move(zy);
  prc.fzx = fourier_coeffs(prc.zx, lc.fx.order());
  prc.fzy = fourier_coeffs(prc.zy, lc.fx.order());
  prc.normalization_residual = residual;
  prc.periods = period_count;
  return prc;
}

InitialHistory fourier_shift(const LimitCycle& lc, double alpha) {
  const FourierSeries fx = lc.fx.shifted(alpha);
  const FourierSeries fy = lc.fy.shifted(alpha);
  const double omega = lc.omega();
  InitialHistory h;
  h.value = [fx, fy, omega](double t, std::span<double> out) {
    out[0] = fx.at(omega * t);
    out[1] = fy.at(omega * t);
  };
  h.derivative = [fx, fy, omega](double t, std::span<double> out) {
    out[0] = omega * fx.derivative_at(omega * t);
    out[1] = omega * fy.derivative_at(omega * t);
  };
  return h;
}

std::string to_json(const LimitCycle& lc) {
  nlohmann::json j{{"period", lc.period},
                   {"closure", lc.closure},
                   {"order", lc.fx.order()},
                   {"x", lc.x},
                   {"y", lc.y},
                   {"fourier_x", coeffs_json(lc.fx)},
                   {"fourier_y", coeffs_json(lc.fy)}};
  return j.dump();
}

std::string to_json(const PhaseResponseCurve& prc) {
  nlohmann::json j{{"omega", prc.omega},
                   {"normalization_residual", prc.normalization_residual},
                   {"periods", prc.periods},
                   {"order", prc.fzx.order()},
                   {"zx", prc.zx},
                   {"zy", prc.zy},
                   {"fourier_zx", coeffs_json(prc.fzx)},
                   {"fourier_zy", coeffs_json(prc.fzy)}};
  return j.dump();
}

}  // namespace synctrans
