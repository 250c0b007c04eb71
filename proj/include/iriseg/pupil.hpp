#ifndef IRISEG_PUPIL_HPP
#define IRISEG_PUPIL_HPP

#include "iriseg/core.hpp"

#include <Eigen/Geometry>

#include <vector>

namespace iriseg {

/// Stage-1 parameters. Defaults follow the reference tuning for 320x240
/// near-infrared eye images.
struct PupilParams {
  double t1 = 0.2;              ///< lower tri-level threshold
  double t2 = 0.5;              ///< upper tri-level threshold
  double r_avg = 26.0;          ///< expected pupil radius, the coarse LoG scale
  double lambda_a = 0.6;        ///< seed-mask threshold on the [0,1] response
  double grow_tolerance = 0.05; ///< region-growing intensity tolerance
  int open_radius = 5;          ///< disc radius of the smoothing opening

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Quantizes an intensity image into the three levels used by the coarse
/// blob detector: v < t1 -> 0 (pupil), t1 <= v <= t2 -> 1 (band around the
/// pupil), v > t2 -> 0.5 (background). Throws if t1 >= t2.
Image to_trilevel(const Image& img, double t1, double t2);

/// Scale-normalized LoG response of the tri-level image at sigma = r_avg,
/// rescaled to [0,1]. The maximum sits in pupil-like dark blobs.
Image coarse_log_response(const Image& tri, double r_avg);

/// Pixels of the [0,1] response strictly above lambda_a.
Mask seed_mask(const Image& response, double lambda_a);

/// Seed for region growing: the member pixel of the mask's largest
/// 8-connected component closest to that component's centroid. Throws
/// StageError("pupil", "no pupil candidate") on an empty mask.
Eigen::Vector2i seed_point(const Mask& mask);

/// 8-connected pixel set produced by region growing.
struct PixelRegion {
  std::vector<Eigen::Vector2i> pixels;  ///< (x,y), scan order
  Eigen::AlignedBox2i bbox;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();

  int area() const { return static_cast<int>(pixels.size()); }
};

/// Breadth-first flood from seed. A pixel joins iff its intensity differs
/// from the seed's by at most grow_tolerance (fraction of the [0,1] range).
PixelRegion region_grow(const Image& smooth, const Eigen::Vector2i& seed,
                        double grow_tolerance);

/// Coarse pupil circle: region centroid and the equivalent-area radius
/// sqrt(area/pi). Throws StageError("pupil", "pupil not found") for regions
/// under 9 pixels.
Circle pupil_estimate(const PixelRegion& region);

}  // namespace iriseg

#endif  // IRISEG_PUPIL_HPP
