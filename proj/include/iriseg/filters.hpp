#ifndef IRISEG_FILTERS_HPP
#define IRISEG_FILTERS_HPP

#include "iriseg/core.hpp"

namespace iriseg {

/// Flat disc footprint {(dx,dy) : dx^2+dy^2 <= radius^2} for grayscale
/// morphology.
struct StructuringElement {
  int radius = 1;
};

/// Linear 2-D convolution with replicate-edge padding. Output has the input's
/// dimensions and is not clamped. Direct evaluation; this is the correctness
/// reference every optimized path is tested against.
/// Throws std::invalid_argument if the kernel does not fit in the image.
Image convolve(const Image& img, const Image& kernel);

/// Convolution with a separable kernel col_taps * row_taps^T (outer product),
/// replicate-edge padding. Both tap vectors must have odd length.
Image separable_convolve(const Image& img, const Eigen::ArrayXd& col_taps,
                         const Eigen::ArrayXd& row_taps);

/// LoG response via the exact rank-2 separable decomposition of the sampled
/// kernel plus a box-sum term for the DC correction. Agrees with
/// convolve(img, log_kernel(sigma, scale_normalized)) to ~1e-12.
Image log_response(const Image& img, double sigma,
                   bool scale_normalized = true);

/// Gaussian smoothing, separable, replicate-edge padding.
Image gaussian_smooth(const Image& img, double sigma);

/// Affine map of [min,max] onto [0,1]. A constant field maps to all 0.5.
Image rescale01(const Image& field);

Image morph_erode(const Image& img, const StructuringElement& se);
Image morph_dilate(const Image& img, const StructuringElement& se);

/// Grayscale opening: dilation of erosion with a flat disc. Anti-extensive
/// and idempotent; replicate-edge padding.
/// Throws std::invalid_argument if se.radius >= min(width,height)/2.
Image morph_open(const Image& img, const StructuringElement& se);

/// Grayscale closing, the dual of opening: erosion of dilation. Extensive
/// and idempotent. Removes dark specks smaller than the disc the way the
/// opening removes bright ones.
Image morph_close(const Image& img, const StructuringElement& se);

}  // namespace iriseg

#endif  // IRISEG_FILTERS_HPP
