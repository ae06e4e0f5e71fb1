#pragma once

// Design of the delayed polynomial feedback G = k1 x(t - tau1) + k2 x(t - tau2)^2
// so that the first-order phase interaction
//   Gamma(d) = (1/2pi) int Z_x(theta) G(x(theta + d)) dtheta
// matches a two-harmonic target in its first two harmonics.

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "synctrans/brusselator.hpp"

namespace synctrans {

/// g(theta) = amplitude * (sin(theta - shift) - r sin(2 (theta - shift))).
/// The default amplitude of -1 is the orientation for which both pitchforks
/// of the weakly coupled pair are supercritical at r = 0.5.
struct HmmTarget {
  double r = 0.5;
  double shift = 0.0;
  double amplitude = -1.0;

  double operator()(double theta) const;
  /// Coefficient of e^{i n theta}; nonzero only for |n| in {1, 2}.
  std::complex<double> coeff(int n) const;
};

struct EngineeredCoupling {
  double k1 = 0.0;
  double k2 = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double tau = 0.0;  ///< common coupling delay
  double K = 0.0;    ///< overall strength
};

/// Per-harmonic building blocks: Gamma_n = k1 lin_n e^{-i n w tau1} + k2 quad_n e^{-i n w tau2}.
struct InteractionKernel {
  double omega;
  std::vector<std::complex<double>> lin;   ///< conj(Zx_n) x_n, n = 0..order
  std::vector<std::complex<double>> quad;  ///< conj(Zx_n) (x^2)_n

  static InteractionKernel build(const PhaseResponseCurve& prc, const LimitCycle& lc);
  std::complex<double> gamma(int n, const EngineeredCoupling& c) const;
};

struct EngineeringOptions {
  int starts = 8;
  /// Fit accepted when |Gamma_{1,2} - g_{1,2}| / |g_{1,2}| stays below this.
  double max_relative_residual = 1e-6;
};

/// Least-squares fit of (k1, tau1, k2, tau2) seeded from the per-harmonic
/// relation k_n conj(Zx_n)(x^n)_n e^{-i n w tau_n} = g_n, with tau2 offset by
/// j T/16 across the starts. Among accepted fits the one with the least
/// energy in harmonics >= 3 wins. Delays are reduced to [0, T). Throws FitFailed.
EngineeredCoupling engineer_coupling(const PhaseResponseCurve& prc, const LimitCycle& lc, const HmmTarget& target,
                                     const EngineeringOptions& opts = {});

/// Gamma sampled at d_j = 2pi j / points by direct quadrature of the
/// convolution with the Fourier reconstructions of Zx and x.
std::vector<double> validate_interaction(const PhaseResponseCurve& prc, const LimitCycle& lc,
                                         const EngineeredCoupling& c, std::size_t points = 256);

struct InteractionError {
  double relative_l2;          ///< over harmonics 1 and 2
  double third_to_first;       ///< |Gamma_3|^2 / |Gamma_1|^2
};

InteractionError interaction_error(const std::vector<double>& gamma_samples, const HmmTarget& target);

std::string to_json(const EngineeredCoupling& c);
/// Keys k1, k2, tau1, tau2, tau, K; unknown keys are rejected (ConfigError).
EngineeredCoupling engineered_coupling_from_json(std::string_view text);

}  // namespace synctrans
