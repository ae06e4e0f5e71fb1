#include "synctrans/fourier.hpp"

#include <cmath>

#include "synctrans/angles.hpp"
#include "synctrans/error.hpp"

namespace synctrans {

FourierSeries::FourierSeries(int order, std::vector<std::complex<double>> coeffs)
    : order_(order), c_(std::move(coeffs)) {
  if (order < 0 || c_.size() != static_cast<std::size_t>(2 * order + 1))
    throw NumericalError(ErrorCode::InvalidArgument, "Fourier coefficient count does not match order");
}

std::complex<double> FourierSeries::coeff(int n) const {
  if (n < -order_ || n > order_) return {0.0, 0.0};
  return c_[static_cast<std::size_t>(n + order_)];
}

double FourierSeries::at(double theta) const {
  // c_{-n} = conj(c_n) for the real signals stored here, but both halves are
  // summed so that complex-valued inputs are handled too.
  double sum = coeff(0).real();
  for (int n = 1; n <= order_; ++n) {
    const std::complex<double> e(std::cos(n * theta), std::sin(n * theta));
    sum += (coeff(n) * e).real() + (coeff(-n) * std::conj(e)).real();
  }
  return sum;
}

double FourierSeries::derivative_at(double theta) const {
  double sum = 0.0;
  const std::complex<double> i(0.0, 1.0);
  for (int n = 1; n <= order_; ++n) {
    const std::complex<double> e(std::cos(n * theta), std::sin(n * theta));
    sum += (i * double(n) * coeff(n) * e).real() - (i * double(n) * coeff(-n) * std::conj(e)).real();
  }
  return sum;
}

FourierSeries FourierSeries::shifted(double alpha) const {
  auto c = c_;
  for (int n = -order_; n <= order_; ++n) c[static_cast<std::size_t>(n + order_)] *= std::polar(1.0, -n * alpha);
  return {order_, std::move(c)};
}

FourierSeries fourier_coeffs(std::span<const double> samples, int order) {
  const std::size_t n_samples = samples.size();
  if (order < 0 || n_samples < static_cast<std::size_t>(2 * order + 1))
    throw NumericalError(ErrorCode::InvalidArgument, "need at least 2*order+1 samples");
  std::vector<std::complex<double>> c(static_cast<std::size_t>(2 * order + 1));
  for (int n = -order; n <= order; ++n) {
    std::complex<double> sum(0.0, 0.0);
    for (std::size_t k = 0; k < n_samples; ++k) {
      const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(n_samples);
      sum += samples[k] * std::polar(1.0, -n * theta);
    }
    c[static_cast<std::size_t>(n + order)] = sum / static_cast<double>(n_samples);
  }
  return {order, std::move(c)};
}

}  // namespace synctrans
