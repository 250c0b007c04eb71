#include "iriseg/kernels.hpp"

#include <stdexcept>

namespace iriseg {

int kernel_size(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  return static_cast<int>(std::floor(3.0 * sigma)) * 2 + 1;
}

Image log_kernel(double sigma, bool scale_normalized, bool dc_correct) {
  const int n = kernel_size(sigma);
  const int c = n / 2;
  const double s2 = sigma * sigma;
  const double scale = 1.0 / (kPi * s2 * s2);

  Image k(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double r2 = static_cast<double>((x - c) * (x - c) + (y - c) * (y - c));
      double tap = -scale * (1.0 - r2 / (2.0 * s2)) * std::exp(-r2 / (2.0 * s2));
      if (scale_normalized) tap *= s2;  // exactly sigma^2 x the plain tap
      k(y, x) = tap;
    }
  }
  if (dc_correct) k -= k.mean();
  return k;
}

Eigen::ArrayXd gaussian_taps(double sigma) {
  const int n = kernel_size(sigma);
  const int c = n / 2;
  Eigen::ArrayXd taps(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i - c);
    taps(i) = std::exp(-t * t / (2.0 * sigma * sigma));
  }
  return taps / taps.sum();
}

}  // namespace iriseg
