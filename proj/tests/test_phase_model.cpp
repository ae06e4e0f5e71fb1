#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"
#include "synctrans/angles.hpp"
#include "synctrans/error.hpp"
#include "synctrans/phase_model.hpp"

using namespace synctrans;
using testing_support::Gen;

namespace {

// F built from its definition g(-psi + alpha) - g(psi + alpha),
// g(phi) = 1/2 sum a_m sin(m phi + gamma_m), rather than the closed sum.
double rhs_from_g(const HarmonicCoupling& c, double psi, double alpha) {
  auto g = [&](double phi) {
    double s = 0.0;
    for (const auto& h : c.harmonics()) s += 0.5 * h.a * std::sin(h.m * phi + h.gamma);
    return s;
  };
  return g(-psi + alpha) - g(psi + alpha);
}

double base_psi(Base b) { return b == Base::Zero ? 0.0 : kPi; }

// Fourth-order central stencils around the base point.
double fd_first(const HarmonicCoupling& c, Base b, double alpha, double h) {
  auto f = [&](double d) { return eval_phase_diff_rhs(c, base_psi(b) + d, alpha); };
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

double fd_third(const HarmonicCoupling& c, Base b, double alpha, double h) {
  auto f = [&](double d) { return eval_phase_diff_rhs(c, base_psi(b) + d, alpha); };
  return (-f(3 * h) + 8 * f(2 * h) - 13 * f(h) + 13 * f(-h) - 8 * f(-2 * h) + f(-3 * h)) / (8 * h * h * h);
}

// Bisection on a dense grid, independent of the library's root finder.
std::vector<double> grid_roots(const std::function<double(double)>& f, double lo, double hi, int n) {
  std::vector<double> roots;
  double a = lo, fa = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double b = lo + (hi - lo) * i / n;
    const double fb = f(b);
    if ((fa < 0) != (fb < 0)) {
      double l = a, r = b, fl = fa;
      for (int k = 0; k < 200 && r - l > 1e-16; ++k) {
        const double m = 0.5 * (l + r);
        const double fm = f(m);
        if ((fm < 0) == (fl < 0)) {
          l = m;
          fl = fm;
        } else {
          r = m;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

Criticality branch_tag(double r, double s, double g2, double g3, Base b) {
  const auto c = HarmonicCoupling::three_harmonic(r, s, g2, g3);
  const double target = oracles::continued_root(r, s, g2, g3, b);
  const auto roots = find_all_bifurcations(c, b, 0.0, kPi);
  const BifurcationRoot* hit = nullptr;
  for (const auto& root : roots)
    if (std::abs(root.alpha - target) < 1e-8) hit = &root;
  REQUIRE(hit != nullptr);
  return classify_criticality(c, b, hit->alpha).tag;
}

const HarmonicCoupling kSingle({{1, 1.0, 0.0}});
const HarmonicCoupling kFig = HarmonicCoupling::three_harmonic(0.12, -0.12, 0.2, 0.5);

}  // namespace

TEST_CASE("rhs of the single harmonic") {
  CHECK(eval_phase_diff_rhs(kSingle, kPi / 2, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(eval_phase_diff_rhs(kSingle, 0.0, 1.234) == 0.0);
}

TEST_CASE("rhs agrees with term-by-term evaluation of g") {
  CHECK(eval_phase_diff_rhs(kFig, 1.0, 1.5) == doctest::Approx(rhs_from_g(kFig, 1.0, 1.5)).epsilon(1e-14));
  Gen gen(11);
  for (int i = 0; i < 500; ++i) {
    const auto c = gen.coupling(6);
    const double psi = gen.uniform(-7, 7), alpha = gen.uniform(-7, 7);
    CHECK(std::abs(eval_phase_diff_rhs(c, psi, alpha) - rhs_from_g(c, psi, alpha)) < 1e-13);
  }
}

TEST_CASE("d1 and d3 of the single harmonic") {
  CHECK(d1(kSingle, Base::Zero, 0.0) == doctest::Approx(-1.0));
  CHECK(std::abs(d1(kSingle, Base::Zero, kPi / 2)) < 1e-15);
  CHECK(d3(kSingle, Base::Zero, 0.0) == doctest::Approx(1.0 / 6.0));
  CHECK(std::abs(d3(kSingle, Base::Zero, kPi / 2)) < 1e-15);
}

TEST_CASE("d1 matches a finite difference in psi") {
  const double h = 1e-6;
  const double fd = (eval_phase_diff_rhs(kFig, h, kPi / 2) - eval_phase_diff_rhs(kFig, -h, kPi / 2)) / (2 * h);
  const double exact = d1(kFig, Base::Zero, kPi / 2);
  CHECK(std::abs(fd - exact) <= 1e-6 * std::abs(exact));
}

TEST_CASE("slope agrees with d1 at the base points") {
  Gen gen(5);
  for (int i = 0; i < 200; ++i) {
    const auto c = gen.coupling(6);
    const double alpha = gen.uniform(0, kPi);
    CHECK(eval_phase_diff_slope(c, 0.0, alpha) == doctest::Approx(d1(c, Base::Zero, alpha)).epsilon(1e-12));
    CHECK(eval_phase_diff_slope(c, kPi, alpha) == doctest::Approx(d1(c, Base::Pi, alpha)).epsilon(1e-12));
  }
}

TEST_CASE("bifurcation of the single harmonic sits at pi/2") {
  const auto root = find_bifurcation_alpha(kSingle, Base::Zero, 0.0, kPi);
  CHECK(root.alpha == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(std::abs(d1(kSingle, Base::Zero, root.alpha)) <= 1e-12);
  CHECK_FALSE(root.ill_conditioned);
  const auto cls = classify_criticality(kSingle, Base::Zero, root.alpha);
  CHECK(cls.tag == Criticality::Degenerate);
}

TEST_CASE("bracketed root against a dense bisection oracle") {
  const HarmonicCoupling c({{1, 1.0, 0.0}, {2, 0.12, 0.0}, {3, -0.12, 0.0}});
  auto f = [](double a) { return std::cos(a) + 0.24 * std::cos(2 * a) - 0.36 * std::cos(3 * a); };
  const auto oracle = grid_roots(f, 0.0, kPi, 1000000);
  REQUIRE(oracle.size() == 1);
  const auto root = find_bifurcation_alpha(c, Base::Zero, 0.0, kPi);
  CHECK(root.alpha == doctest::Approx(oracle[0]).epsilon(1e-12));
  CHECK(std::abs(d1(c, Base::Zero, root.alpha)) <= 1e-12);
}

TEST_CASE("without a second harmonic both bases bifurcate at the same alpha") {
  for (double s : {-0.2, -0.05, 0.07, 0.15}) {
    const auto c = HarmonicCoupling::three_harmonic(0.0, s, 0.0, 0.0);
    const auto a0 = find_bifurcation_alpha(c, Base::Zero, 0.0, kPi);
    const auto api = find_bifurcation_alpha(c, Base::Pi, 0.0, kPi);
    CHECK(a0.alpha == doctest::Approx(api.alpha).epsilon(1e-12));
  }
}

TEST_CASE("bracketing errors") {
  CHECK_THROWS_AS(find_bifurcation_alpha(kSingle, Base::Zero, 0.0, 0.5), NumericalError);
  try {
    find_bifurcation_alpha(kSingle, Base::Zero, 0.0, 0.5);
  } catch (const NumericalError& e) {
    CHECK(e.code() == ErrorCode::NoSignChange);
  }
  try {
    classify_criticality(kSingle, Base::Zero, 0.3);
    FAIL("expected NotABifurcationPoint");
  } catch (const NumericalError& e) {
    CHECK(e.code() == ErrorCode::NotABifurcationPoint);
  }
}

TEST_CASE("criticality at the r = -s = 0.12 point") {
  const auto r0 = find_central_bifurcation(kFig, Base::Zero);
  const auto rpi = find_central_bifurcation(kFig, Base::Pi);
  REQUIRE(r0);
  REQUIRE(rpi);
  const auto c0 = classify_criticality(kFig, Base::Zero, r0->alpha);
  const auto cpi = classify_criticality(kFig, Base::Pi, rpi->alpha);
  CHECK(c0.tag == Criticality::Continuous);
  CHECK(cpi.tag == Criticality::Discontinuous);
  CHECK(cpi.d3 > 0.0);
  // independent sum over the harmonics
  double oracle = 0.0;
  for (const auto& h : kFig.harmonics()) oracle += std::pow(-1.0, h.m) * std::pow(h.m, 3) * h.a * std::cos(h.m * rpi->alpha + h.gamma);
  CHECK(cpi.d3 == doctest::Approx(oracle / 6.0).epsilon(1e-12));
}

TEST_CASE("all roots are found and refined") {
  const HarmonicCoupling c({{1, 1.0, 0.0}, {3, 0.8, 0.4}});
  const auto roots = find_all_bifurcations(c, Base::Zero, 0.0, kPi);
  const auto oracle = grid_roots([&](double a) { return d1(c, Base::Zero, a); }, 0.0, kPi, 200000);
  REQUIRE(roots.size() == oracle.size());
  for (std::size_t i = 0; i < roots.size(); ++i) CHECK(roots[i].alpha == doctest::Approx(oracle[i]).epsilon(1e-10));
}

TEST_CASE("approximate bifurcation formulas") {
  SUBCASE("unperturbed") {
    const auto a = approx_bifurcation(0.0, 0.0, 0.3, 0.7);
    CHECK(a.alpha0 == kPi / 2);
    CHECK(a.alpha_pi == kPi / 2);
    CHECK(a.c0 == 0.0);
    CHECK(a.c_pi == 0.0);
  }
  SUBCASE("r = 0, s = 0.1") {
    const double s = 0.1, g3 = 0.5;
    const auto a = approx_bifurcation(0.0, s, 0.0, g3);
    const double closed = ((81 * s - 1) / (3 * s - 1) - 27) * g3 * s;
    CHECK(a.c0 == doctest::Approx(closed).epsilon(1e-14));
    CHECK(a.c0 == doctest::Approx(-1.8571).epsilon(1e-4));
    CHECK(a.c_pi == doctest::Approx(1.8571).epsilon(1e-4));
    // opposite sign convention to d3 at the located roots
    const auto c = HarmonicCoupling::three_harmonic(0.0, s, 0.0, g3);
    const auto r0 = find_central_bifurcation(c, Base::Zero);
    const auto rpi = find_central_bifurcation(c, Base::Pi);
    CHECK(a.c0 * d3(c, Base::Zero, r0->alpha) < 0.0);
    CHECK(a.c_pi * d3(c, Base::Pi, rpi->alpha) < 0.0);
  }
  SUBCASE("close to the exact roots at r = -s = 0.12") {
    const auto a = approx_bifurcation(0.12, -0.12, 0.2, 0.5);
    CHECK(std::abs(a.alpha0 - find_central_bifurcation(kFig, Base::Zero)->alpha) < 0.1);
    CHECK(std::abs(a.alpha_pi - find_central_bifurcation(kFig, Base::Pi)->alpha) < 0.1);
  }
  SUBCASE("degenerate denominator") {
    try {
      approx_bifurcation(0.1, 1.0 / 3.0, 0.0, 0.0);
      FAIL("expected DegenerateDenominator");
    } catch (const NumericalError& e) {
      CHECK(e.code() == ErrorCode::DegenerateDenominator);
    }
  }
}

TEST_CASE("property: zero sets and odd symmetry") {
  Gen gen(21);
  for (int i = 0; i < 1000; ++i) {
    const auto c = gen.coupling(6);
    const double alpha = gen.uniform(-10, 10), psi = gen.uniform(-10, 10);
    CHECK(eval_phase_diff_rhs(c, 0.0, alpha) == 0.0);
    CHECK(std::abs(eval_phase_diff_rhs(c, kPi, alpha)) < 1e-14);
    CHECK(eval_phase_diff_rhs(c, -psi, alpha) == doctest::Approx(-eval_phase_diff_rhs(c, psi, alpha)).epsilon(1e-13));
  }
}

TEST_CASE("property: parameter symmetry for zero phase shifts") {
  Gen gen(3);
  for (int i = 0; i < 10000; ++i) {
    const auto c = gen.coupling(6, true);
    const double psi = gen.uniform(-kPi, kPi), alpha = gen.uniform(0, kPi);
    const double lhs = eval_phase_diff_rhs(c, kPi - psi, kPi - alpha);
    CHECK(std::abs(lhs + eval_phase_diff_rhs(c, psi, alpha)) <= 1e-12);
  }
}

TEST_CASE("property: d1 and d3 against finite differences") {
  Gen gen(17);
  const double h = 1e-3;
  for (int i = 0; i < 1000; ++i) {
    const auto c = gen.coupling(6);
    double scale1 = 0.0, scale3 = 0.0;
    for (const auto& hm : c.harmonics()) {
      scale1 += hm.m * std::abs(hm.a);
      scale3 += std::pow(hm.m, 3) * std::abs(hm.a) / 6.0;
    }
    const double alpha = gen.uniform(0, kPi);
    for (Base b : {Base::Zero, Base::Pi}) {
      const double e1 = d1(c, b, alpha), e3 = d3(c, b, alpha);
      // relative to the value, floored at 1e-3 of the coefficient's natural scale
      CHECK(std::abs(fd_first(c, b, alpha, h) - e1) <= 1e-5 * std::max(std::abs(e1), 1e-3 * scale1));
      CHECK(std::abs(fd_third(c, b, alpha, h) / 6.0 - e3) <= 1e-5 * std::max(std::abs(e3), 1e-3 * scale3));
    }
  }
}

TEST_CASE("property: equal criticality of the paired roots for zero phase shifts") {
  Gen gen(8);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const double r = gen.uniform(-0.25, 0.25), s = gen.uniform(-0.25, 0.25);
    const auto c = HarmonicCoupling::three_harmonic(r, s, 0.0, 0.0);
    const auto z = find_all_bifurcations(c, Base::Zero, 0.0, kPi);
    const auto p = find_all_bifurcations(c, Base::Pi, 0.0, kPi);
    if (z.size() != 1 || p.size() != 1) continue;
    ++checked;
    CHECK(p[0].alpha == doctest::Approx(kPi - z[0].alpha).epsilon(1e-10));
    const auto tz = classify_criticality(c, Base::Zero, z[0].alpha).tag;
    const auto tp = classify_criticality(c, Base::Pi, p[0].alpha).tag;
    CHECK(tz == tp);
  }
  CHECK(checked > 100);
}

TEST_CASE("property: tags swap as s crosses zero when r = 0") {
  Gen gen(99);
  for (int i = 0; i < 50; ++i) {
    const double s = gen.uniform(0.01, 0.2), g3 = gen.uniform(0.05, 1.0);
    auto tags = [&](double sv) {
      return std::pair{branch_tag(0.0, sv, 0.0, g3, Base::Zero), branch_tag(0.0, sv, 0.0, g3, Base::Pi)};
    };
    const auto plus = tags(s), minus = tags(-s);
    CHECK(plus.first != plus.second);
    CHECK(plus.first == minus.second);
    CHECK(plus.second == minus.first);
  }
}

TEST_CASE("normalization") {
  const HarmonicCoupling c({{2, 0.4, 0.1}, {1, -2.0, 0.3}}, HarmonicCoupling::Normalize::Yes);
  CHECK(c.amplitude(1) == 1.0);
  CHECK(c.phase_shift(1) == 0.0);
  CHECK(c.amplitude(2) == doctest::Approx(0.2));
  // g is shifted in phase and rescaled in time: F(psi; alpha) of the original
  // equals |a1| F(psi; alpha + shift) of the normalized one
  const HarmonicCoupling raw({{1, -2.0, 0.3}, {2, 0.4, 0.1}});
  const double shift = 0.3 + kPi;
  for (double psi : {0.3, 1.1, 2.5})
    CHECK(eval_phase_diff_rhs(raw, psi, 0.7) == doctest::Approx(2.0 * eval_phase_diff_rhs(c, psi, 0.7 + shift)).epsilon(1e-12));
  CHECK_THROWS_AS(HarmonicCoupling({{1, 1.0, 0.0}, {1, 0.5, 0.0}}), NumericalError);
  CHECK_THROWS_AS(HarmonicCoupling({{0, 1.0, 0.0}}), NumericalError);
  CHECK_THROWS_AS(HarmonicCoupling({{2, 1.0, 0.0}}, HarmonicCoupling::Normalize::Yes), NumericalError);
}

TEST_CASE("phases are stored in (-pi, pi]") {
  const HarmonicCoupling c({{1, 1.0, 7.0}, {2, 0.5, -kPi}});
  CHECK(c.phase_shift(1) == doctest::Approx(7.0 - kTwoPi));
  CHECK(c.phase_shift(2) == doctest::Approx(kPi));
}

TEST_CASE("json round trip and unknown keys") {
  const auto c = harmonic_coupling_from_json(to_json(kFig));
  REQUIRE(c.harmonics().size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(c.harmonics()[i].a == kFig.harmonics()[i].a);
    CHECK(c.harmonics()[i].gamma == kFig.harmonics()[i].gamma);
  }
  CHECK_THROWS_AS(harmonic_coupling_from_json(R"([{"m":1,"a":1,"phase":0}])"), ConfigError);
  CHECK_THROWS_AS(harmonic_coupling_from_json("{"), ConfigError);
}
