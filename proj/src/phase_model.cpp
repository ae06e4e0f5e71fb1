#include "synctrans/phase_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>
#include <json.hpp>

#include "synctrans/angles.hpp"
#include "synctrans/error.hpp"

namespace synctrans {

namespace {

constexpr double kIllConditionedSlope = 1e-8;
constexpr double kBifurcationResidual = 1e-8;

double base_sign(Base base, int m) {
  return (base == Base::Pi && (m % 2 != 0)) ? -1.0 : 1.0;
}

// sum_m w_m m^p a_m cos(m alpha + gamma_m), w_m = +-1 by base.
double moment(const HarmonicCoupling& c, Base base, double alpha, int power) {
  double sum = 0.0;
  for (const auto& h : c.harmonics()) {
    const double mp = std::pow(static_cast<double>(h.m), power);
    sum += base_sign(base, h.m) * mp * h.a * std::cos(h.m * alpha + h.gamma);
  }
  return sum;
}

double d1_slope(const HarmonicCoupling& c, Base base, double alpha) {
  double sum = 0.0;
  for (const auto& h : c.harmonics())
    sum += base_sign(base, h.m) * h.m * h.m * h.a * std::sin(h.m * alpha + h.gamma);
  return sum;
}

BifurcationRoot refine_root(const HarmonicCoupling& c, Base base, double lo, double hi, double flo,
                            double fhi) {
  auto f = [&](double a) { return d1(c, base, a); };
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
  std::uintmax_t max_iter = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
  const double alpha = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
  return {alpha, std::abs(d1_slope(c, base, alpha)) < kIllConditionedSlope};
}

}  // namespace

std::string_view to_string(Base base) { return base == Base::Zero ? "0" : "pi"; }

std::string_view to_string(Criticality tag) {
  switch (tag) {
    case Criticality::Continuous: return "Continuous";
    case Criticality::Discontinuous: return "Discontinuous";
    case Criticality::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

HarmonicCoupling::HarmonicCoupling(std::vector<Harmonic> harmonics, Normalize normalize)
    : harmonics_(std::move(harmonics)) {
  if (harmonics_.empty())
    throw NumericalError(ErrorCode::InvalidArgument, "coupling needs at least one harmonic");
  std::sort(harmonics_.begin(), harmonics_.end(),
            [](const Harmonic& l, const Harmonic& r) { return l.m < r.m; });
  for (std::size_t i = 0; i < harmonics_.size(); ++i) {
    const auto& h = harmonics_[i];
    if (h.m < 1) throw NumericalError(ErrorCode::InvalidArgument, "harmonic index must be >= 1");
    if (i > 0 && harmonics_[i - 1].m == h.m)
      throw NumericalError(ErrorCode::InvalidArgument, "duplicate harmonic m=" + std::to_string(h.m));
    if (!std::isfinite(h.a) || !std::isfinite(h.gamma))
      throw NumericalError(ErrorCode::InvalidArgument, "non-finite harmonic coefficient");
  }
  if (normalize == Normalize::Yes) {
    const double a1 = amplitude(1);
    if (a1 == 0.0)
      throw NumericalError(ErrorCode::InvalidArgument, "cannot normalize without a first harmonic");
    const double shift = phase_shift(1) + (a1 < 0.0 ? kPi : 0.0);
    for (auto& h : harmonics_) {
      h.a /= std::abs(a1);
      h.gamma -= h.m * shift;
    }
    harmonics_.front().a = 1.0;
    harmonics_.front().gamma = 0.0;
  }
  for (auto& h : harmonics_) h.gamma = wrap_pm_pi(h.gamma);
}

HarmonicCoupling HarmonicCoupling::three_harmonic(double r, double s, double gamma2, double gamma3) {
  return HarmonicCoupling({{1, 1.0, 0.0}, {2, r, gamma2}, {3, s, gamma3}});
}

double HarmonicCoupling::amplitude(int m) const {
  for (const auto& h : harmonics_)
    if (h.m == m) return h.a;
  return 0.0;
}

double HarmonicCoupling::phase_shift(int m) const {
  for (const auto& h : harmonics_)
    if (h.m == m) return h.gamma;
  return 0.0;
}

double eval_phase_diff_rhs(const HarmonicCoupling& c, double psi, double alpha) {
  double sum = 0.0;
  for (const auto& h : c.harmonics()) sum += h.a * std::cos(h.m * alpha + h.gamma) * std::sin(h.m * psi);
  return -sum;
}

double eval_phase_diff_slope(const HarmonicCoupling& c, double psi, double alpha) {
  double sum = 0.0;
  for (const auto& h : c.harmonics())
    sum += h.m * h.a * std::cos(h.m * alpha + h.gamma) * std::cos(h.m * psi);
  return -sum;
}

double d1(const HarmonicCoupling& c, Base base, double alpha) { return -moment(c, base, alpha, 1); }

double d3(const HarmonicCoupling& c, Base base, double alpha) { return moment(c, base, alpha, 3) / 6.0; }

BifurcationRoot find_bifurcation_alpha(const HarmonicCoupling& c, Base base, double lo, double hi) {
  const double flo = d1(c, base, lo);
  const double fhi = d1(c, base, hi);
  if (flo == 0.0) return {lo, std::abs(d1_slope(c, base, lo)) < kIllConditionedSlope};
  if (fhi == 0.0) return {hi, std::abs(d1_slope(c, base, hi)) < kIllConditionedSlope};
  if ((flo < 0.0) == (fhi < 0.0))
    throw NumericalError(ErrorCode::NoSignChange, "D1 has the same sign at both bracket ends");
  return refine_root(c, base, lo, hi, flo, fhi);
}

std::vector<BifurcationRoot> find_all_bifurcations(const HarmonicCoupling& c, Base base, double lo,
                                                   double hi, int subintervals) {
  std::vector<BifurcationRoot> roots;
  const double width = (hi - lo) / subintervals;
  double a_prev = lo;
  double f_prev = d1(c, base, lo);
  if (f_prev == 0.0) roots.push_back({lo, std::abs(d1_slope(c, base, lo)) < kIllConditionedSlope});
  for (int i = 1; i <= subintervals; ++i) {
    const double a = (i == subintervals) ? hi : lo + i * width;
    const double f = d1(c, base, a);
    if (f == 0.0) {
      roots.push_back({a, std::abs(d1_slope(c, base, a)) < kIllConditionedSlope});
    } else if (f_prev != 0.0 && ((f < 0.0) != (f_prev < 0.0))) {
      roots.push_back(refine_root(c, base, a_prev, a, f_prev, f));
    }
    a_prev = a;
    f_prev = f;
  }
  return roots;
}

std::optional<BifurcationRoot> find_central_bifurcation(const HarmonicCoupling& c, Base base, int subintervals) {
  std::optional<BifurcationRoot> best;
  for (const auto& root : find_all_bifurcations(c, base, 0.0, kPi, subintervals)) {
    if (root.alpha <= 0.0 || root.alpha >= kPi) continue;
    if (!best || std::abs(root.alpha - kPi / 2) < std::abs(best->alpha - kPi / 2)) best = root;
  }
  return best;
}

CriticalityClass classify_criticality(const HarmonicCoupling& c, Base base, double alpha_star, double tol_c) {
  const double lin = d1(c, base, alpha_star);
  if (!(std::abs(lin) <= kBifurcationResidual))
    throw NumericalError(ErrorCode::NotABifurcationPoint,
                         "|D1| = " + std::to_string(std::abs(lin)) + " at alpha = " + std::to_string(alpha_star));
  const double cubic = d3(c, base, alpha_star);
  Criticality tag = Criticality::Degenerate;
  if (cubic < -tol_c) tag = Criticality::Continuous;
  else if (cubic > tol_c) tag = Criticality::Discontinuous;
  return {tag, lin, cubic, alpha_star};
}

ApproxBifurcation approx_bifurcation(double r, double s, double /*gamma2*/, double gamma3) {
  if (std::abs(3.0 * s - 1.0) <= 1e-6)
    throw NumericalError(ErrorCode::DegenerateDenominator, "3s - 1 vanishes");
  ApproxBifurcation out{};
  const double beta0 = (r - s * gamma3) / (1.0 - 3.0 * s);
  out.alpha0 = kPi / 2 - beta0;
  out.c0 = 9.0 * r - 27.0 * s * gamma3 + (81.0 * s - 1.0) * beta0;
  const double beta_pi = (r + s * gamma3) / (3.0 * s - 1.0);
  out.alpha_pi = kPi / 2 - beta_pi;
  out.c_pi = 9.0 * r + 27.0 * s * gamma3 + (1.0 - 81.0 * s) * beta_pi;
  return out;
}

std::string to_json(const HarmonicCoupling& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& h : c.harmonics()) arr.push_back({{"m", h.m}, {"a", h.a}, {"gamma", h.gamma}});
  return arr.dump();
}

HarmonicCoupling harmonic_coupling_from_json(std::string_view text, HarmonicCoupling::Normalize normalize) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("harmonics JSON: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("harmonics JSON must be an array of {m, a, gamma}");
  std::vector<Harmonic> hs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_object()) throw ConfigError("harmonics[" + std::to_string(i) + "] is not an object");
    for (const auto& [key, _] : e.items())
      if (key != "m" && key != "a" && key != "gamma")
        throw ConfigError("harmonics[" + std::to_string(i) + "]: unknown key '" + key + "'");
    if (!e.contains("m") || !e.contains("a"))
      throw ConfigError("harmonics[" + std::to_string(i) + "]: 'm' and 'a' are required");
    try {
      hs.push_back({e.at("m").get<int>(), e.at("a").get<double>(), e.value("gamma", 0.0)});
    } catch (const nlohmann::json::type_error& err) {
      throw ConfigError("harmonics[" + std::to_string(i) + "]: " + err.what());
    }
  }
  try {
    return HarmonicCoupling(std::move(hs), normalize);
  } catch (const NumericalError& err) {
    throw ConfigError(err.what());
  }
}

std::string to_json(const CriticalityClass& cls, Base base) {
  nlohmann::json j{{"base", std::string(to_string(base))},
                   {"tag", std::string(to_string(cls.tag))},
                   {"alpha_star", cls.alpha_star},
                   {"d1", cls.d1},
                   {"d3", cls.d3}};
  return j.dump();
}

}  // namespace synctrans
