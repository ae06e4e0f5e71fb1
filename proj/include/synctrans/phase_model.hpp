#pragma once

// Closed-form analysis of the phase-difference equation of two identical
// oscillators with a multi-harmonic coupling function
//
//   g(phi) = 1/2 sum_m a_m sin(m phi + gamma_m),
//   dpsi/dt = F(psi; alpha) = g(-psi + alpha) - g(psi + alpha)
//           = -sum_m a_m cos(m alpha + gamma_m) sin(m psi).
//
// psi = 0 (in-phase) and psi = pi (anti-phase) are equilibria for every
// alpha. Their pitchfork bifurcations in alpha are located by the linear
// Taylor coefficient D1 and classified by the cubic coefficient D3.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synctrans {

enum class Base { Zero, Pi };

std::string_view to_string(Base base);

struct Harmonic {
  int m;
  double a;
  double gamma;  ///< radians, stored in (-pi, pi]
};

class HarmonicCoupling {
 public:
  enum class Normalize { No, Yes };

  /// Harmonics may be given in any order; m must be >= 1 and unique.
  /// With Normalize::Yes the coupling is rescaled so that a_1 = 1 and
  /// gamma_1 = 0: amplitudes are divided by |a_1| (a time rescaling) and
  /// gamma_m -> gamma_m - m*gamma_1' where gamma_1' absorbs the sign of a_1
  /// (a shift of alpha). Requires a nonzero first harmonic.
  explicit HarmonicCoupling(std::vector<Harmonic> harmonics, Normalize normalize = Normalize::No);

  /// a_1 = 1, a_2 = r, a_3 = s with phase shifts gamma_2, gamma_3.
  static HarmonicCoupling three_harmonic(double r, double s, double gamma2, double gamma3);

  std::span<const Harmonic> harmonics() const { return harmonics_; }
  int max_order() const { return harmonics_.back().m; }

  /// Amplitude of harmonic m (0 when absent).
  double amplitude(int m) const;
  double phase_shift(int m) const;

 private:
  std::vector<Harmonic> harmonics_;
};

/// F(psi; alpha), exact finite sum.
double eval_phase_diff_rhs(const HarmonicCoupling& c, double psi, double alpha);

/// dF/dpsi at an arbitrary psi.
double eval_phase_diff_slope(const HarmonicCoupling& c, double psi, double alpha);

/// Linear coefficient of F about the base equilibrium.
double d1(const HarmonicCoupling& c, Base base, double alpha);

/// Cubic coefficient of F about the base equilibrium.
double d3(const HarmonicCoupling& c, Base base, double alpha);

struct BifurcationRoot {
  double alpha;
  bool ill_conditioned;  ///< |dD1/dalpha| below tolerance near the root
};

/// Bracketing root of D1(base; .) on [lo, hi]. Throws NoSignChange.
BifurcationRoot find_bifurcation_alpha(const HarmonicCoupling& c, Base base, double lo, double hi);

/// Every sign change of D1 on [lo, hi] found by scanning `subintervals`
/// uniform cells, each refined to a root. Exact zeros at grid nodes count.
std::vector<BifurcationRoot> find_all_bifurcations(const HarmonicCoupling& c, Base base,
                                                   double lo, double hi, int subintervals = 720);

/// The root in (0, pi) nearest pi/2, if any.
std::optional<BifurcationRoot> find_central_bifurcation(const HarmonicCoupling& c, Base base,
                                                        int subintervals = 720);

enum class Criticality { Continuous, Discontinuous, Degenerate };

std::string_view to_string(Criticality tag);

struct CriticalityClass {
  Criticality tag;
  double d1;
  double d3;
  double alpha_star;
};

inline constexpr double kDefaultCriticalityTol = 1e-9;

/// Requires |D1(base; alpha_star)| <= 1e-8 (throws NotABifurcationPoint).
/// Continuous iff D3 < -tol_c, Discontinuous iff D3 > tol_c.
CriticalityClass classify_criticality(const HarmonicCoupling& c, Base base, double alpha_star,
                                      double tol_c = kDefaultCriticalityTol);

/// First-order approximations around the unperturbed vertical branch at
/// alpha = pi/2 for a coupling with a_2 = r, a_3 = s. The criticality
/// coefficients follow the sign convention of the expansion of
/// +sum a_m cos(m alpha + gamma_m) sin(m psi), i.e. they carry the opposite
/// sign of d3 for the implemented F.
struct ApproxBifurcation {
  double alpha0;
  double alpha_pi;
  double c0;
  double c_pi;
};

/// gamma2 does not enter at first order. Throws DegenerateDenominator when
/// |3s - 1| <= 1e-6.
ApproxBifurcation approx_bifurcation(double r, double s, double gamma2, double gamma3);

// JSON: [{"m": int, "a": float, "gamma": float}, ...]
std::string to_json(const HarmonicCoupling& c);
HarmonicCoupling harmonic_coupling_from_json(std::string_view json,
                                             HarmonicCoupling::Normalize normalize = HarmonicCoupling::Normalize::No);
std::string to_json(const CriticalityClass& cls, Base base);

}  // namespace synctrans
