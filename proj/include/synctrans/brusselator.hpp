#pragma once

// Brusselator in coordinates centred on its fixed point (A, B/A):
//   x' = (B - 1) x + A^2 y + f(x, y)
//   y' = -B x - A^2 y - f(x, y),    f = (B/A) x^2 + 2 A x y + x^2 y.
// The origin is an unstable focus when B > 1 + A^2.

#include <array>
#include <string>
#include <vector>

#include "synctrans/dde.hpp"
#include "synctrans/fourier.hpp"

namespace synctrans {

struct BrusselatorParams {
  double A = 0.9;
  double B = 2.3;

  /// Throws InvalidArgument unless A > 0 and B > 1 + A^2.
  void validate() const;
};

std::array<double, 2> brusselator_rhs(double x, double y, const BrusselatorParams& p);

/// Row-major 2x2 Jacobian of brusselator_rhs.
std::array<double, 4> brusselator_jacobian(double x, double y, const BrusselatorParams& p);

/// Phase 0 is the upward crossing of x = 0. Samples sit at theta_k = 2pi k/N.
struct LimitCycle {
  double period = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  FourierSeries fx;
  FourierSeries fy;
  double closure = 0.0;  ///< |state(T) - state(0)| of the resampling run

  double omega() const;
  std::array<double, 2> state_at(double theta) const;
};

struct LimitCycleOptions {
  double tol = 1e-9;
  int samples = 256;
  int order = 32;
  double step = 1e-3;
  int max_crossings = 2000;
};

/// Throws NoCycleFound when successive section return times fail to settle.
LimitCycle find_limit_cycle(const BrusselatorParams& p, const LimitCycleOptions& opts = {});

struct PhaseResponseCurve {
  double omega = 0.0;
  std::vector<double> zx;
  std::vector<double> zy;
  FourierSeries fzx;
  FourierSeries fzy;
  double normalization_residual = 0.0;  ///< max_theta |Z.F - omega| / omega
  int periods = 0;                      ///< backward periods until convergence
};

/// Adjoint equation Z' = -J^T Z integrated backward around the cycle,
/// renormalised to Z.F = omega once per period. Throws AdjointNotConverged.
PhaseResponseCurve compute_prc(const LimitCycle& lc, const BrusselatorParams& p, double tol = 1e-10,
                               int max_periods = 50);

/// History t -> (x, y)(omega t - alpha) built from the shifted Fourier series.
InitialHistory fourier_shift(const LimitCycle& lc, double alpha);

std::string to_json(const LimitCycle& lc);
std::string to_json(const PhaseResponseCurve& prc);

}  // namespace synctrans
