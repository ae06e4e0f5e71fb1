#pragma once

#include <complex>
#include <span>
#include <vector>

namespace synctrans {

/// Truncated complex Fourier series of a real 2pi-periodic function,
/// f(theta) = sum_{|n| <= N} c_n e^{i n theta}.
class FourierSeries {
 public:
  FourierSeries() = default;
  /// coeffs[n + order] holds c_n for n = -order..order.
  FourierSeries(int order, std::vector<std::complex<double>> coeffs);

  int order() const { return order_; }
  std::complex<double> coeff(int n) const;
  /// Real part of the series at theta.
  double at(double theta) const;
  double derivative_at(double theta) const;
  /// Series of f(theta - alpha): c_n -> c_n e^{-i n alpha}.
  FourierSeries shifted(double alpha) const;
  const std::vector<std::complex<double>>& coeffs() const { return c_; }

 private:
  int order_ = 0;
  std::vector<std::complex<double>> c_;
};

/// Discrete projection of samples taken at theta_k = 2pi k / N onto
/// harmonics |n| <= order. Requires N >= 2 order + 1.
FourierSeries fourier_coeffs(std::span<const double> samples, int order);

}  // namespace synctrans
