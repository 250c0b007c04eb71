#include "iriseg/filters.hpp"

#include "iriseg/kernels.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace iriseg {

namespace {

inline Eigen::Index clampi(Eigen::Index v, Eigen::Index hi) {
  return v < 0 ? 0 : (v > hi ? hi : v);
}

void check_kernel_fits(const Image& img, Eigen::Index kh, Eigen::Index kw) {
  if (kh > img.rows() || kw > img.cols())
    throw std::invalid_argument("kernel larger than image");
  if (kh % 2 == 0 || kw % 2 == 0)
    throw std::invalid_argument("kernel size must be odd");
}

/// Horizontal pass of a separable convolution, replicate padding.
Image convolve_rows(const Image& img, const Eigen::ArrayXd& taps) {
  const Eigen::Index h = img.rows(), w = img.cols();
  const Eigen::Index n = taps.size(), c = n / 2;
  Image out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    const double* row = img.data() + y * w;
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      if (x >= c && x + c < w) {
        const double* p = row + x - c;
        for (Eigen::Index i = 0; i < n; ++i) acc += taps(n - 1 - i) * p[i];
      } else {
        for (Eigen::Index i = 0; i < n; ++i)
          acc += taps(i) * row[clampi(x - (i - c), w - 1)];
      }
      out(y, x) = acc;
    }
  }
  return out;
}

/// Vertical pass, replicate padding.
Image convolve_cols(const Image& img, const Eigen::ArrayXd& taps) {
  const Eigen::Index h = img.rows(), w = img.cols();
  const Eigen::Index n = taps.size(), c = n / 2;
  Image out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    double* orow = out.data() + y * w;
    std::fill(orow, orow + w, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index sy = clampi(y - (i - c), h - 1);
      const double tap = taps(i);
      const double* srow = img.data() + sy * w;
      for (Eigen::Index x = 0; x < w; ++x) orow[x] += tap * srow[x];
    }
  }
  return out;
}

}  // namespace

Image convolve(const Image& img, const Image& kernel) {
  check_kernel_fits(img, kernel.rows(), kernel.cols());
  const Eigen::Index h = img.rows(), w = img.cols();
  const Eigen::Index kh = kernel.rows(), kw = kernel.cols();
  const Eigen::Index cy = kh / 2, cx = kw / 2;

  Image out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < kh; ++j) {
        const Eigen::Index sy = clampi(y - (j - cy), h - 1);
        const double* srow = img.data() + sy * w;
        for (Eigen::Index i = 0; i < kw; ++i)
          acc += kernel(j, i) * srow[clampi(x - (i - cx), w - 1)];
      }
      out(y, x) = acc;
    }
  }
  return out;
}

Image separable_convolve(const Image& img, const Eigen::ArrayXd& col_taps,
                         const Eigen::ArrayXd& row_taps) {
  check_kernel_fits(img, col_taps.size(), row_taps.size());
  return convolve_cols(convolve_rows(img, row_taps), col_taps);
}

Image log_response(const Image& img, double sigma, bool scale_normalized) {
  const int n = kernel_size(sigma);
  check_kernel_fits(img, n, n);
  const int c = n / 2;
  const double s2 = sigma * sigma;
  const double scale = (scale_normalized ? s2 : 1.0) / (kPi * s2 * s2);

  // Exact rank-2 split of the sampled kernel:
  //   k(u,v) = q(u) g(v) + g(u) p(v)
  // with g the unnormalized Gaussian, q = -scale*(1 - u^2/2s^2)*g and
  // p = scale*(v^2/2s^2)*g.
  Eigen::ArrayXd g(n), q(n), p(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i - c);
    g(i) = std::exp(-t * t / (2.0 * s2));
    q(i) = -scale * (1.0 - t * t / (2.0 * s2)) * g(i);
    p(i) = scale * (t * t / (2.0 * s2)) * g(i);
  }
  Image response = separable_convolve(img, q, g) + separable_convolve(img, g, p);

  // DC correction: subtracting the tap mean from the kernel is a box-sum
  // term on the image side.
  const double mean = log_kernel(sigma, scale_normalized, false).mean();
  const Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(n);
  response -= mean * separable_convolve(img, ones, ones);
  return response;
}

Image gaussian_smooth(const Image& img, double sigma) {
  const Eigen::ArrayXd taps = gaussian_taps(sigma);
  return separable_convolve(img, taps, taps);
}

Image rescale01(const Image& field) {
  const double lo = field.minCoeff();
  const double hi = field.maxCoeff();
  if (hi == lo) return Image::Constant(field.rows(), field.cols(), 0.5);
  return (field - lo) / (hi - lo);
}

namespace {

/// Half-widths of the disc footprint per row offset.
std::vector<int> disc_chords(int radius) {
  std::vector<int> half(2 * radius + 1);
  for (int dy = -radius; dy <= radius; ++dy)
    half[dy + radius] = static_cast<int>(
        std::floor(std::sqrt(static_cast<double>(radius * radius - dy * dy))));
  return half;
}

template <class Compare>
Image morph_apply(const Image& img, int radius, Compare better, double worst) {
  const Eigen::Index h = img.rows(), w = img.cols();
  const std::vector<int> half = disc_chords(radius);
  Image out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double best = worst;
      for (int dy = -radius; dy <= radius; ++dy) {
        const Eigen::Index sy = clampi(y + dy, h - 1);
        const int hw = half[dy + radius];
        const double* srow = img.data() + sy * w;
        for (int dx = -hw; dx <= hw; ++dx) {
          const double v = srow[clampi(x + dx, w - 1)];
          if (better(v, best)) best = v;
        }
      }
      out(y, x) = best;
    }
  }
  return out;
}

void check_se(const Image& img, const StructuringElement& se) {
  if (se.radius < 1) throw std::invalid_argument("structuring element radius must be >= 1");
  if (se.radius >= std::min(img.rows(), img.cols()) / 2)
    throw std::invalid_argument("structuring element larger than image");
}

}  // namespace

Image morph_erode(const Image& img, const StructuringElement& se) {
  check_se(img, se);
  return morph_apply(img, se.radius, std::less<double>(),
                     std::numeric_limits<double>::infinity());
}

Image morph_dilate(const Image& img, const StructuringElement& se) {
  check_se(img, se);
  return morph_apply(img, se.radius, std::greater<double>(),
                     -std::numeric_limits<double>::infinity());
}

Image morph_open(const Image& img, const StructuringElement& se) {
  return morph_dilate(morph_erode(img, se), se);
}

Image morph_close(const Image& img, const StructuringElement& se) {
  return morph_erode(morph_dilate(img, se), se);
}

}  // namespace iriseg
