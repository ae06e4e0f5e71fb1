#include "synctrans/engineering.hpp"

#include <cmath>
#include <optional>

#include <Eigen/Core>
#include <json.hpp>
#include <unsupported/Eigen/NonLinearOptimization>

#include "synctrans/angles.hpp"
#include "synctrans/error.hpp"

namespace synctrans {

namespace {

using cd = std::complex<double>;
constexpr cd kI(0.0, 1.0);

struct HarmonicFit {
  const InteractionKernel& kernel;
  cd g1, g2;

  int inputs() const { return 4; }
  int values() const { return 4; }

  EngineeredCoupling unpack(const Eigen::VectorXd& p) const {
    EngineeredCoupling c;
    c.k1 = p[0];
    c.tau1 = p[1];
    c.k2 = p[2];
    c.tau2 = p[3];
    return c;
  }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    const auto c = unpack(p);
    const cd e1 = kernel.gamma(1, c) - g1;
    const cd e2 = kernel.gamma(2, c) - g2;
    r << e1.real(), e1.imag(), e2.real(), e2.imag();
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
    const double w = kernel.omega;
    for (int n = 1; n <= 2; ++n) {
      const cd e1 = std::polar(1.0, -n * w * p[1]);
      const cd e2 = std::polar(1.0, -n * w * p[3]);
      const cd d_k1 = kernel.lin[n] * e1;
      const cd d_t1 = p[0] * kernel.lin[n] * (-kI * double(n) * w) * e1;
      const cd d_k2 = kernel.quad[n] * e2;
      const cd d_t2 = p[2] * kernel.quad[n] * (-kI * double(n) * w) * e2;
      const int row = 2 * (n - 1);
      jac.row(row) << d_k1.real(), d_t1.real(), d_k2.real(), d_t2.real();
      jac.row(row + 1) << d_k1.imag(), d_t1.imag(), d_k2.imag(), d_t2.imag();
    }
    return 0;
  }
};

double reduce(double v, double m) {
  double r = std::fmod(v, m);
  if (r < 0.0) r += m;
  return r >= m ? 0.0 : r;
}

}  // namespace

double HmmTarget::operator()(double theta) const {
  const double u = theta - shift;
  return amplitude * (std::sin(u) - r * std::sin(2.0 * u));
}

cd HmmTarget::coeff(int n) const {
  // sin(n u) = (e^{i n u} - e^{-i n u}) / 2i
  const int m = std::abs(n);
  if (m != 1 && m != 2) return {0.0, 0.0};
  const double weight = m == 1 ? amplitude : -amplitude * r;
  const cd c = weight / (2.0 * kI) * std::polar(1.0, -m * shift);
  return n > 0 ? c : std::conj(c);
}

InteractionKernel InteractionKernel::build(const PhaseResponseCurve& prc, const LimitCycle& lc) {
  const int order = std::min(prc.fzx.order(), lc.fx.order());
  std::vector<double> x2(lc.x.size());
  for (std::size_t k = 0; k < x2.size(); ++k) x2[k] = lc.x[k] * lc.x[k];
  const auto fx2 = fourier_coeffs(x2, order);
  InteractionKernel kernel{lc.omega(), {}, {}};
  for (int n = 0; n <= order; ++n) {
    const cd z = std::conj(prc.fzx.coeff(n));
    kernel.lin.push_back(z * lc.fx.coeff(n));
    kernel.quad.push_back(z * fx2.coeff(n));
  }
  return kernel;
}

cd InteractionKernel::gamma(int n, const EngineeredCoupling& c) const {
  const int m = std::abs(n);
  if (m >= static_cast<int>(lin.size())) return {0.0, 0.0};
  const cd v = c.k1 * lin[m] * std::polar(1.0, -m * omega * c.tau1) + c.k2 * quad[m] * std::polar(1.0, -m * omega * c.tau2);
  return n >= 0 ? v : std::conj(v);
}

EngineeredCoupling engineer_coupling(const PhaseResponseCurve& prc, const LimitCycle& lc, const HmmTarget& target,
                                     const EngineeringOptions& opts) {
  const cd g1 = target.coeff(1);
  const cd g2 = target.coeff(2);
  const double g_norm = std::sqrt(std::norm(g1) + std::norm(g2));
  if (g_norm == 0.0) return {};

  const auto kernel = InteractionKernel::build(prc, lc);
  if (kernel.lin.size() < 3 || std::abs(kernel.lin[1]) == 0.0 || std::abs(kernel.quad[2]) == 0.0)
    throw NumericalError(ErrorCode::FitFailed, "first or second response harmonic vanishes");
  const double w = kernel.omega;
  const double T = lc.period;

  // literal per-harmonic relation; a missing target harmonic leaves that gain at zero
  const double k1 = std::abs(g1) / std::abs(kernel.lin[1]);
  const double t1 = k1 > 0 ? reduce(-(std::arg(g1) - std::arg(kernel.lin[1])) / w, T) : 0.0;
  const double k2 = std::abs(g2) / std::abs(kernel.quad[2]);
  const double t2 = k2 > 0 ? reduce(-(std::arg(g2) - std::arg(kernel.quad[2])) / (2 * w), T / 2) : 0.0;

  const HarmonicFit fit{kernel, g1, g2};
  std::vector<std::optional<EngineeredCoupling>> found(opts.starts);
  std::vector<double> leakage(opts.starts, 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < opts.starts; ++j) {
    Eigen::VectorXd p(4);
    p << k1, t1, k2, t2 + j * T / 16.0;
    HarmonicFit local = fit;
    Eigen::LevenbergMarquardt<HarmonicFit> lm(local);
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 2000;
    lm.minimize(p);
    auto c = fit.unpack(p);
    const double err =
        std::sqrt(std::norm(kernel.gamma(1, c) - g1) + std::norm(kernel.gamma(2, c) - g2)) / g_norm;
    if (!(err <= opts.max_relative_residual)) continue;
    c.tau1 = reduce(c.tau1, T);
    c.tau2 = reduce(c.tau2, T);
    double leak = 0.0;
    for (int n = 3; n < static_cast<int>(kernel.lin.size()); ++n) leak += std::norm(kernel.gamma(n, c));
    found[j] = c;
    leakage[j] = leak;
  }

  std::optional<EngineeredCoupling> best;
  double best_leak = 0.0;
  for (int j = 0; j < opts.starts; ++j) {
    if (!found[j]) continue;
    if (!best || leakage[j] < best_leak) {
      best = found[j];
      best_leak = leakage[j];
    }
  }
  if (!best) throw NumericalError(ErrorCode::FitFailed, "no start reached the residual threshold");
  return *best;
}

std::vector<double> validate_interaction(const PhaseResponseCurve& prc, const LimitCycle& lc,
                                         const EngineeredCoupling& c, std::size_t points) {
  if (points < 3) throw NumericalError(ErrorCode::InvalidArgument, "need at least 3 quadrature points");
  const double w = lc.omega();
  std::vector<double> z(points), g(points);
  for (std::size_t m = 0; m < points; ++m) {
    const double theta = kTwoPi * static_cast<double>(m) / static_cast<double>(points);
    z[m] = prc.fzx.at(theta);
    const double xa = lc.fx.at(theta - w * c.tau1);
    const double xb = lc.fx.at(theta - w * c.tau2);
    g[m] = c.k1 * xa + c.k2 * xb * xb;
  }
  std::vector<double> gamma(points);
  for (std::size_t j = 0; j < points; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < points; ++k) sum += z[k] * g[(k + j) % points];
    gamma[j] = sum / static_cast<double>(points);
  }
  return gamma;
}

InteractionError interaction_error(const std::vector<double>& gamma_samples, const HmmTarget& target) {
  const auto f = fourier_coeffs(gamma_samples, 3);
  double num = 0.0, den = 0.0;
  for (int n = 1; n <= 2; ++n) {
    num += std::norm(f.coeff(n) - target.coeff(n));
    den += std::norm(target.coeff(n));
  }
  InteractionError e{};
  e.relative_l2 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  const double first = std::norm(f.coeff(1));
  e.third_to_first = first > 0.0 ? std::norm(f.coeff(3)) / first : 0.0;
  return e;
}

std::string to_json(const EngineeredCoupling& c) {
  nlohmann::json j{{"k1", c.k1}, {"k2", c.k2}, {"tau1", c.tau1}, {"tau2", c.tau2}, {"tau", c.tau}, {"K", c.K}};
  return j.dump();
}

EngineeredCoupling engineered_coupling_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("coupling JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("coupling JSON must be an object");
  EngineeredCoupling c;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError("coupling key '" + key + "' must be a number");
    const double v = value.get<double>();
    if (key == "k1") c.k1 = v;
    else if (key == "k2") c.k2 = v;
    else if (key == "tau1") c.tau1 = v;
    else if (key == "tau2") c.tau2 = v;
    else if (key == "tau") c.tau = v;
    else if (key == "K") c.K = v;
    else throw ConfigError("coupling JSON: unknown key '" + key + "'");
  }
  return c;
}

}  // namespace synctrans
