#ifndef IRISEG_BOUNDARY_HPP
#define IRISEG_BOUNDARY_HPP

#include "iriseg/core.hpp"
#include "iriseg/edges.hpp"
#include "iriseg/pupil.hpp"

#include <string>
#include <utility>
#include <vector>

namespace iriseg {

struct RadialSample {
  double angle = 0.0;   ///< ray direction, radians
  double radius = 0.0;  ///< hit distance from the scan center; valid iff hit
  bool hit = false;
};

struct RadialProfile {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::vector<RadialSample> samples;  ///< angles uniform over [0, 2*pi)

  int hit_count() const;
  /// Cartesian positions of the hit samples.
  std::vector<Eigen::Vector2d> hit_points() const;
};

/// Marches n_angles uniformly spaced rays outward from center over
/// [r_min, r_max] in 0.5 px steps and records the first edge hit per ray
/// (bilinear membership, locally refined to the strongest response).
/// Throws std::invalid_argument if the center lies outside the image or
/// r_min >= r_max.
RadialProfile radial_scan(const Mask& edges, const Eigen::Vector2d& center,
                          double r_min, double r_max, int n_angles);

/// Algebraic least-squares circle through the given points (Kasa fit).
/// Throws StageError("fit", "boundary not recoverable") for fewer than 3
/// points or a degenerate (collinear) configuration.
Circle fit_circle_points(const std::vector<Eigen::Vector2d>& points);

/// Kasa fit over the profile's hits followed by one re-fit over the inliers
/// within inlier_tol of the first circle. Misses are thereby interpolated:
/// the returned circle defines the boundary across gap angles. Requires at
/// least 3 hits spanning more than 90 degrees.
Circle fit_circle(const RadialProfile& profile, double inlier_tol);

struct OrientationEstimate {
  double angle = 0.0;          ///< major-axis angle in (-pi/2, pi/2]
  bool low_confidence = false; ///< near-isotropic mask or no component found
  Mask eye_mask;               ///< the component the moments were taken from
};

/// Eye orientation from the coarse-scale LoG response: positive responses in
/// the top 70% are kept, the largest 8-connected component overlapping (or
/// nearest to) the pupil is selected, and the principal axis of its second
/// central moments gives the angle.
OrientationEstimate eye_orientation(const Image& smooth, const Circle& pupil,
                                    double r_avg);

enum class Zone { RightStable, LeftStable, UpperOcclusion, LowerOcclusion };

/// Four angular sectors around the eye's major axis. Stable sectors are
/// orientation +/- halfwidth and the diametral opposites; remaining angles
/// split into upper/lower occlusion sectors by the sign of the cross-axis
/// component (y grows downward, so "upper" means negative cross component).
struct ZonePartition {
  double orientation = 0.0;
  double halfwidth = kPi / 6.0;

  Zone classify(double angle) const;
  bool stable(double angle) const;
};

/// Throws unless 0 < stable_halfwidth < pi/4.
ZonePartition partition_zones(double orientation, double stable_halfwidth);

struct LimbicResult {
  Circle iris;
  std::vector<double> gap_angles;  ///< ray angles with no boundary evidence
  double angular_step = 0.0;       ///< spacing of the scan rays, radians
};

/// Limbic boundary from the cleaned edge map: stable-zone radial scan over
/// [1.2*r_p, 4*r_p] (hits within 3 px of the pupillary circle excluded), the
/// trimmed mean of stable hits as the iris radius, an occlusion-zone search
/// in the band radius +/- 15%, and a final circle fit over all accepted
/// hits. Throws StageError("limbic", "limbic boundary not found") when the
/// stable zones yield under 25% hit coverage.
LimbicResult locate_limbic(const Mask& edges, const Circle& pupil,
                           const ZonePartition& zones,
                           double inlier_tol = 2.5);

/// Merges a set of scan angles into maximal contiguous angular runs
/// (start, end), end >= start, possibly extending past 2*pi for wrap.
std::vector<std::pair<double, double>> merge_gap_runs(
    const std::vector<double>& gap_angles, double angular_step);

/// Flags iris-annulus pixels whose angle about the iris center falls in the
/// contiguous runs grown from gap_angles.
Mask occlusion_mask(const Mask& edges, const Circle& iris, const Circle& pupil,
                    const std::vector<double>& gap_angles,
                    double angular_step);

struct RefinedPupil {
  Circle circle;
  bool refined = false;  ///< false when the fit failed and coarse was kept
};

/// Snaps the coarse pupil circle to the zero-crossing edges: radial scan
/// over [0.5*r, 1.5*r] around the coarse center, then a circle fit. Falls
/// back to the coarse circle when the fit is not recoverable.
RefinedPupil refine_pupil(const Mask& edges, const Circle& coarse,
                          double inlier_tol = 2.5);

struct BoundaryParams {
  double stable_halfwidth = kPi / 6.0;
  double inlier_tol = 2.5;  ///< inlier distance for the circle re-fit, px

  void validate() const;
};

struct PipelineParams {
  PupilParams pupil;
  EdgeParams edges;
  BoundaryParams boundary;

  void validate() const;
};

struct StageTiming {
  std::string name;
  double ms = 0.0;
};

struct SegmentationResult {
  Circle pupil;
  Circle iris;
  double orientation = 0.0;
  bool orientation_low_confidence = false;
  bool pupil_refined = false;
  std::vector<std::pair<double, double>> gap_runs;  ///< radians
  Mask occlusion;
  std::vector<StageTiming> timings;
};

/// Full two-stage pipeline: opening, coarse pupil localization, zero-crossing
/// edges, pupil refinement, orientation, zone partition, limbic localization,
/// occlusion marking. Any stage failure surfaces as a StageError naming the
/// stage; per-stage wall times are recorded in the result.
SegmentationResult segment(const Image& img, const PipelineParams& params);

}  // namespace iriseg

#endif  // IRISEG_BOUNDARY_HPP
