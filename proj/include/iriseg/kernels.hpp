#ifndef IRISEG_KERNELS_HPP
#define IRISEG_KERNELS_HPP

#include "iriseg/core.hpp"

namespace iriseg {

/// Filter side length for scale sigma: floor(3*sigma)*2 + 1. Always odd.
int kernel_size(double sigma);

/// Samples the Laplacian-of-Gaussian
///   h(x,y) = -1/(pi*sigma^4) * (1 - (x^2+y^2)/(2*sigma^2)) * exp(-(x^2+y^2)/(2*sigma^2))
/// on an n x n grid of integer offsets, n = kernel_size(sigma).
///
/// scale_normalized multiplies every tap by sigma^2 so responses are
/// comparable across scales. dc_correct subtracts the tap mean afterwards so
/// the kernel sums to zero and constant regions map to exactly zero response.
Image log_kernel(double sigma, bool scale_normalized = true,
                 bool dc_correct = true);

/// 1-D Gaussian taps of length kernel_size(sigma), normalized to unit sum.
Eigen::ArrayXd gaussian_taps(double sigma);

}  // namespace iriseg

#endif  // IRISEG_KERNELS_HPP
