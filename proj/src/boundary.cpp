#include "iriseg/boundary.hpp"

#include "iriseg/components.hpp"
#include "iriseg/filters.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace iriseg {

namespace {

constexpr int kNumRays = 360;       // 1-degree angular resolution
constexpr double kRadialStep = 0.5; // marching step, px

/// Bilinear sample of a binary map; everything outside the image reads 0.
double bilinear(const Mask& m, double x, double y) {
  const Eigen::Index h = m.rows(), w = m.cols();
  const double fx = std::floor(x), fy = std::floor(y);
  const Eigen::Index x0 = static_cast<Eigen::Index>(fx);
  const Eigen::Index y0 = static_cast<Eigen::Index>(fy);
  const double ax = x - fx, ay = y - fy;
  auto at = [&](Eigen::Index yy, Eigen::Index xx) -> double {
    if (yy < 0 || yy >= h || xx < 0 || xx >= w) return 0.0;
    return m(yy, xx) ? 1.0 : 0.0;
  };
  return (1.0 - ay) * ((1.0 - ax) * at(y0, x0) + ax * at(y0, x0 + 1)) +
         ay * ((1.0 - ax) * at(y0 + 1, x0) + ax * at(y0 + 1, x0 + 1));
}

bool nearest_set(const Mask& m, double x, double y) {
  const Eigen::Index xi = static_cast<Eigen::Index>(std::lround(x));
  const Eigen::Index yi = static_cast<Eigen::Index>(std::lround(y));
  if (yi < 0 || yi >= m.rows() || xi < 0 || xi >= m.cols()) return false;
  return m(yi, xi) != 0;
}

/// First edge hit along one ray, or a miss. The 0.5 px march is followed by
/// a fine argmax pass so the recorded radius tracks the edge-pixel mass
/// rather than the sampling grid. Rasterized one-pixel contours leave
/// sub-half-pixel holes on diagonals, so the membership trigger accepts a
/// quarter of interpolated mass or the nearest pixel.
RadialSample march_ray(const Mask& edges, const Eigen::Vector2d& center,
                       double angle, double r_min, double r_max) {
  RadialSample s;
  s.angle = angle;
  const double ux = std::cos(angle), uy = std::sin(angle);
  for (double t = r_min; t <= r_max + 1e-9; t += kRadialStep) {
    const double x = center.x() + t * ux, y = center.y() + t * uy;
    if (bilinear(edges, x, y) >= 0.25 || nearest_set(edges, x, y)) {
      double best_v = -1.0, best_t = t;
      for (int k = -5; k <= 5; ++k) {
        const double tt = t + 0.1 * k;
        if (tt < r_min || tt > r_max) continue;
        const double v = bilinear(edges, center.x() + tt * ux, center.y() + tt * uy);
        if (v > best_v) {
          best_v = v;
          best_t = tt;
        }
      }
      s.hit = true;
      s.radius = best_t;
      return s;
    }
  }
  return s;
}

}  // namespace

int RadialProfile::hit_count() const {
  int n = 0;
  for (const auto& s : samples) n += s.hit ? 1 : 0;
  return n;
}

std::vector<Eigen::Vector2d> RadialProfile::hit_points() const {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(samples.size());
  for (const auto& s : samples)
    if (s.hit)
      pts.emplace_back(center.x() + s.radius * std::cos(s.angle),
                       center.y() + s.radius * std::sin(s.angle));
  return pts;
}

RadialProfile radial_scan(const Mask& edges, const Eigen::Vector2d& center,
                          double r_min, double r_max, int n_angles) {
  if (center.x() < 0 || center.x() >= edges.cols() || center.y() < 0 ||
      center.y() >= edges.rows())
    throw std::invalid_argument("scan center outside image");
  if (!(r_min >= 0.0 && r_min < r_max))
    throw std::invalid_argument("require 0 <= r_min < r_max");
  if (n_angles < 1) throw std::invalid_argument("n_angles must be >= 1");

  RadialProfile profile;
  profile.center = center;
  profile.samples.reserve(n_angles);
  for (int k = 0; k < n_angles; ++k) {
    const double angle = 2.0 * kPi * k / n_angles;
    profile.samples.push_back(march_ray(edges, center, angle, r_min, r_max));
  }
  return profile;
}

Circle fit_circle_points(const std::vector<Eigen::Vector2d>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw StageError("fit", "boundary not recoverable");

  // Kasa: x^2 + y^2 + D x + E y + F = 0, linear least squares in (D,E,F).
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = points[i].x();
    a(i, 1) = points[i].y();
    a(i, 2) = 1.0;
    b(i) = -(points[i].x() * points[i].x() + points[i].y() * points[i].y());
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw StageError("fit", "boundary not recoverable");
  const Eigen::Vector3d sol = qr.solve(b);

  Circle c;
  c.cx = -sol(0) / 2.0;
  c.cy = -sol(1) / 2.0;
  const double r2 = c.cx * c.cx + c.cy * c.cy - sol(2);
  if (!(r2 > 0.0) || !std::isfinite(r2))
    throw StageError("fit", "boundary not recoverable");
  c.r = std::sqrt(r2);
  return c;
}

namespace {

double angular_span(std::vector<double> angles) {
  std::sort(angles.begin(), angles.end());
  double max_gap = angles.front() + 2.0 * kPi - angles.back();
  for (size_t i = 1; i < angles.size(); ++i)
    max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  return 2.0 * kPi - max_gap;
}

}  // namespace

Circle fit_circle(const RadialProfile& profile, double inlier_tol) {
  std::vector<Eigen::Vector2d> pts;
  std::vector<double> angles;
  for (const auto& s : profile.samples)
    if (s.hit) {
      pts.emplace_back(profile.center.x() + s.radius * std::cos(s.angle),
                       profile.center.y() + s.radius * std::sin(s.angle));
      angles.push_back(s.angle);
    }
  if (pts.size() < 3 || angular_span(angles) <= kPi / 2.0)
    throw StageError("fit", "boundary not recoverable");

  const Circle first = fit_circle_points(pts);

  std::vector<Eigen::Vector2d> inliers;
  for (const auto& p : pts) {
    const double d = std::hypot(p.x() - first.cx, p.y() - first.cy);
    if (std::abs(d - first.r) <= inlier_tol) inliers.push_back(p);
  }
  if (inliers.size() < 3 || inliers.size() == pts.size()) return first;
  try {
    return fit_circle_points(inliers);
  } catch (const StageError&) {
    return first;  // inlier set degenerate; keep the full fit
  }
}

OrientationEstimate eye_orientation(const Image& smooth, const Circle& pupil,
                                    double r_avg) {
  const Image resp = log_response(smooth, r_avg, true);

  std::vector<double> positives;
  positives.reserve(static_cast<size_t>(resp.size()) / 4);
  for (Eigen::Index i = 0; i < resp.size(); ++i)
    if (resp.data()[i] > 0.0) positives.push_back(resp.data()[i]);

  OrientationEstimate est;
  if (positives.empty()) {
    est.low_confidence = true;
    est.eye_mask = Mask::Zero(smooth.rows(), smooth.cols());
    return est;
  }

  // Keep the top 70% of positive responses: cut at the 30th percentile.
  const size_t cut = static_cast<size_t>(0.30 * (positives.size() - 1));
  std::nth_element(positives.begin(), positives.begin() + cut, positives.end());
  const double tau = positives[cut];

  Mask mask(smooth.rows(), smooth.cols());
  for (Eigen::Index i = 0; i < resp.size(); ++i)
    mask.data()[i] = resp.data()[i] > 0.0 && resp.data()[i] >= tau ? 1 : 0;

  const ComponentLabels cc = label_components(mask, 8);
  if (cc.count() == 0) {
    est.low_confidence = true;
    est.eye_mask = Mask::Zero(smooth.rows(), smooth.cols());
    return est;
  }

  // Prefer the largest component overlapping the pupil disc; otherwise the
  // component nearest the pupil center.
  std::vector<char> overlaps(cc.sizes.size(), 0);
  std::vector<double> min_d2(cc.sizes.size(), std::numeric_limits<double>::infinity());
  for (Eigen::Index y = 0; y < mask.rows(); ++y)
    for (Eigen::Index x = 0; x < mask.cols(); ++x) {
      const int label = cc.labels(y, x);
      if (label == 0) continue;
      const double d2 = (x - pupil.cx) * (x - pupil.cx) + (y - pupil.cy) * (y - pupil.cy);
      if (d2 <= pupil.r * pupil.r) overlaps[label - 1] = 1;
      min_d2[label - 1] = std::min(min_d2[label - 1], d2);
    }
  int chosen = 0;
  int chosen_size = -1;
  for (size_t k = 0; k < cc.sizes.size(); ++k)
    if (overlaps[k] && cc.sizes[k] > chosen_size) {
      chosen = static_cast<int>(k) + 1;
      chosen_size = cc.sizes[k];
    }
  if (chosen == 0) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < cc.sizes.size(); ++k)
      if (min_d2[k] < best) {
        best = min_d2[k];
        chosen = static_cast<int>(k) + 1;
      }
    est.low_confidence = true;
  }

  est.eye_mask = Mask::Zero(smooth.rows(), smooth.cols());
  double sx = 0.0, sy = 0.0;
  int n = 0;
  for (Eigen::Index y = 0; y < mask.rows(); ++y)
    for (Eigen::Index x = 0; x < mask.cols(); ++x)
      if (cc.labels(y, x) == chosen) {
        est.eye_mask(y, x) = 1;
        sx += static_cast<double>(x);
        sy += static_cast<double>(y);
        ++n;
      }
  const double mx = sx / n, my = sy / n;
  double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
  for (Eigen::Index y = 0; y < mask.rows(); ++y)
    for (Eigen::Index x = 0; x < mask.cols(); ++x)
      if (cc.labels(y, x) == chosen) {
        const double dx = x - mx, dy = y - my;
        mu20 += dx * dx;
        mu02 += dy * dy;
        mu11 += dx * dy;
      }

  double theta = 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);
  if (theta <= -kPi / 2.0) theta += kPi;
  if (theta > kPi / 2.0) theta -= kPi;
  est.angle = theta;

  // Near-equal principal moments mean the axis is ill-defined.
  const double tr = mu20 + mu02;
  const double det = std::sqrt((mu20 - mu02) * (mu20 - mu02) + 4.0 * mu11 * mu11);
  const double l1 = (tr + det) / 2.0, l2 = (tr - det) / 2.0;
  if (!(l1 > 0.0) || (l1 - l2) <= 0.05 * l1) est.low_confidence = true;
  return est;
}

Zone ZonePartition::classify(double angle) const {
  const double d = angle_diff(angle, orientation);
  if (std::abs(d) <= halfwidth) return Zone::RightStable;
  if (std::abs(angle_diff(angle, orientation + kPi)) <= halfwidth)
    return Zone::LeftStable;
  // Image y grows downward: negative cross-axis component points up.
  return std::sin(d) < 0.0 ? Zone::UpperOcclusion : Zone::LowerOcclusion;
}

bool ZonePartition::stable(double angle) const {
  const Zone z = classify(angle);
  return z == Zone::RightStable || z == Zone::LeftStable;
}

ZonePartition partition_zones(double orientation, double stable_halfwidth) {
  if (!(stable_halfwidth > 0.0 && stable_halfwidth < kPi / 4.0))
    throw std::invalid_argument("stable_halfwidth must lie in (0, pi/4)");
  ZonePartition zp;
  zp.orientation = orientation;
  zp.halfwidth = stable_halfwidth;
  return zp;
}

LimbicResult locate_limbic(const Mask& edges, const Circle& pupil,
                           const ZonePartition& zones, double inlier_tol) {
  const double r_min = std::max(1.2 * pupil.r, pupil.r + 3.0);
  const double r_max = 4.0 * pupil.r;
  const Eigen::Vector2d center(pupil.cx, pupil.cy);

  const RadialProfile stable_scan = radial_scan(edges, center, r_min, r_max, kNumRays);

  std::vector<double> stable_hits;
  int stable_total = 0;
  for (const auto& s : stable_scan.samples) {
    if (!zones.stable(s.angle)) continue;
    ++stable_total;
    if (s.hit) stable_hits.push_back(s.radius);
  }
  if (stable_total == 0 ||
      static_cast<double>(stable_hits.size()) / stable_total < 0.25)
    throw StageError("limbic", "limbic boundary not found");

  // Iris radius: trimmed mean (middle 80%) over the consensus cluster of
  // stable-zone distances. The cluster is the densest +/-15% radius window
  // (the same width the occlusion search uses); near-pupil clutter, e.g.
  // the LoG's secondary zero-ring lit up by impulse noise, can cover half
  // the stable angles and would drag a plain trimmed mean off the limbic
  // ring. Ties go outward: the contaminant is always the inner structure.
  std::sort(stable_hits.begin(), stable_hits.end());
  size_t best_begin = 0, best_end = 0;
  for (size_t i = 0; i < stable_hits.size(); ++i) {
    const auto lo = std::lower_bound(stable_hits.begin(), stable_hits.end(),
                                     0.85 * stable_hits[i]);
    const auto hi = std::upper_bound(stable_hits.begin(), stable_hits.end(),
                                     1.15 * stable_hits[i]);
    if (static_cast<size_t>(hi - lo) >= best_end - best_begin) {
      best_begin = static_cast<size_t>(lo - stable_hits.begin());
      best_end = static_cast<size_t>(hi - stable_hits.begin());
    }
  }
  const size_t cluster_n = best_end - best_begin;
  const size_t drop = cluster_n / 10;
  const double iris_radius =
      std::accumulate(stable_hits.begin() + best_begin + drop,
                      stable_hits.begin() + best_end - drop, 0.0) /
      static_cast<double>(cluster_n - 2 * drop);

  // Extend the search into the occlusion zones inside the +/-15% band; an
  // angle with no boundary evidence there is a gap.
  const double band_lo = std::max(0.85 * iris_radius, pupil.r + 3.0);
  const double band_hi = 1.15 * iris_radius;
  LimbicResult result;
  result.angular_step = 2.0 * kPi / kNumRays;
  if (band_lo >= band_hi) throw StageError("limbic", "limbic boundary not found");

  const RadialProfile band_scan = radial_scan(edges, center, band_lo, band_hi, kNumRays);
  for (const auto& s : band_scan.samples)
    if (!s.hit) result.gap_angles.push_back(s.angle);

  try {
    result.iris = fit_circle(band_scan, inlier_tol);
  } catch (const StageError&) {
    throw StageError("limbic", "limbic boundary not found");
  }
  return result;
}

std::vector<std::pair<double, double>> merge_gap_runs(
    const std::vector<double>& gap_angles, double angular_step) {
  std::vector<std::pair<double, double>> runs;
  if (gap_angles.empty()) return runs;
  std::vector<double> sorted(gap_angles);
  for (double& a : sorted) a = wrap_angle(a);
  std::sort(sorted.begin(), sorted.end());

  const double joinable = 1.5 * angular_step;
  runs.emplace_back(sorted.front(), sorted.front());
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] - runs.back().second <= joinable)
      runs.back().second = sorted[i];
    else
      runs.emplace_back(sorted[i], sorted[i]);
  }
  // Merge across the 0/2pi seam.
  if (runs.size() > 1 &&
      sorted.front() + 2.0 * kPi - runs.back().second <= joinable) {
    runs.front().first = runs.back().first - 2.0 * kPi;
    runs.pop_back();
  }
  // Each ray represents a bin of one angular step.
  for (auto& r : runs) {
    r.first -= angular_step / 2.0;
    r.second += angular_step / 2.0;
  }
  return runs;
}

Mask occlusion_mask(const Mask& edges, const Circle& iris, const Circle& pupil,
                    const std::vector<double>& gap_angles,
                    double angular_step) {
  const auto runs = merge_gap_runs(gap_angles, angular_step);
  Mask out = Mask::Zero(edges.rows(), edges.cols());
  if (runs.empty()) return out;

  auto in_runs = [&](double angle) {
    for (const auto& r : runs) {
      if (angle >= r.first && angle <= r.second) return true;
      if (angle - 2.0 * kPi >= r.first && angle - 2.0 * kPi <= r.second) return true;
      if (angle + 2.0 * kPi >= r.first && angle + 2.0 * kPi <= r.second) return true;
    }
    return false;
  };

  for (Eigen::Index y = 0; y < out.rows(); ++y)
    for (Eigen::Index x = 0; x < out.cols(); ++x) {
      const double dix = x - iris.cx, diy = y - iris.cy;
      if (dix * dix + diy * diy >= iris.r * iris.r) continue;
      const double dpx = x - pupil.cx, dpy = y - pupil.cy;
      if (dpx * dpx + dpy * dpy <= pupil.r * pupil.r) continue;
      if (in_runs(wrap_angle(std::atan2(diy, dix)))) out(y, x) = 1;
    }
  return out;
}

RefinedPupil refine_pupil(const Mask& edges, const Circle& coarse,
                          double inlier_tol) {
  RefinedPupil out{coarse, false};
  try {
    const RadialProfile profile =
        radial_scan(edges, Eigen::Vector2d(coarse.cx, coarse.cy),
                    std::max(0.5 * coarse.r, 1.0), 1.5 * coarse.r, kNumRays);
    const Circle fitted = fit_circle(profile, inlier_tol);
    // Discard wild fits; the coarse estimate is already in the ballpark.
    if (std::hypot(fitted.cx - coarse.cx, fitted.cy - coarse.cy) > coarse.r)
      return out;
    out.circle = fitted;
    out.refined = true;
  } catch (const std::exception&) {
    // keep coarse
  }
  return out;
}

void BoundaryParams::validate() const {
  if (!(stable_halfwidth > 0.0 && stable_halfwidth < kPi / 4.0))
    throw std::invalid_argument("stable_halfwidth must lie in (0, pi/4)");
  if (!(inlier_tol > 0.0)) throw std::invalid_argument("inlier_tol must be positive");
}

void PipelineParams::validate() const {
  pupil.validate();
  edges.validate();
  boundary.validate();
}

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& out) : out_(out) { reset(); }
  void reset() { t0_ = std::chrono::steady_clock::now(); }
  void record(const char* name) {
    const auto t1 = std::chrono::steady_clock::now();
    out_.push_back({name, std::chrono::duration<double, std::milli>(t1 - t0_).count()});
    t0_ = t1;
  }

 private:
  std::vector<StageTiming>& out_;
  std::chrono::steady_clock::time_point t0_;
};

[[noreturn]] void rethrow_as(const char* stage_name) {
  try {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage_name, e.what());
  }
}

}  // namespace

SegmentationResult segment(const Image& img, const PipelineParams& params) {
  params.validate();
  SegmentationResult result;
  StageClock clock(result.timings);

  // The opening strips bright impulse noise; its dual pass strips the dark
  // impulses a lone opening provably preserves, which otherwise seed edge
  // clutter across the iris.
  Image smooth;
  try {
    const StructuringElement se{params.pupil.open_radius};
    smooth = morph_close(morph_open(img, se), se);
  } catch (...) {
    rethrow_as("preprocess");
  }
  clock.record("preprocess");

  Circle coarse;
  try {
    const Image tri = to_trilevel(smooth, params.pupil.t1, params.pupil.t2);
    const Image resp = coarse_log_response(tri, params.pupil.r_avg);
    const Mask mask = seed_mask(resp, params.pupil.lambda_a);
    const Eigen::Vector2i seed = seed_point(mask);
    const PixelRegion region = region_grow(smooth, seed, params.pupil.grow_tolerance);
    coarse = pupil_estimate(region);
  } catch (...) {
    rethrow_as("pupil");
  }
  clock.record("pupil");

  Mask cleaned;
  try {
    cleaned = clean_components(zero_crossings(smooth, params.edges),
                               params.edges.min_component);
  } catch (...) {
    rethrow_as("edges");
  }
  clock.record("edges");

  const RefinedPupil refined =
      refine_pupil(cleaned, coarse, params.boundary.inlier_tol);
  result.pupil = refined.circle;
  result.pupil_refined = refined.refined;
  clock.record("refine");

  OrientationEstimate orient;
  try {
    orient = eye_orientation(smooth, refined.circle, params.pupil.r_avg);
  } catch (...) {
    rethrow_as("orientation");
  }
  // An eye's major axis is near-horizontal; a steeper estimate means the
  // mask was contaminated (lids, clutter), and trusting it would swing the
  // stable zones into the occlusion region.
  const bool unusable =
      orient.low_confidence || std::abs(orient.angle) > kPi / 4.0;
  result.orientation = unusable ? 0.0 : orient.angle;
  result.orientation_low_confidence = unusable;
  clock.record("orientation");

  LimbicResult limbic;
  try {
    const ZonePartition zones =
        partition_zones(result.orientation, params.boundary.stable_halfwidth);
    limbic = locate_limbic(cleaned, refined.circle, zones,
                           params.boundary.inlier_tol);
  } catch (...) {
    rethrow_as("limbic");
  }
  result.iris = limbic.iris;
  result.gap_runs = merge_gap_runs(limbic.gap_angles, limbic.angular_step);
  clock.record("limbic");

  try {
    result.occlusion = occlusion_mask(cleaned, result.iris, result.pupil,
                                      limbic.gap_angles, limbic.angular_step);
  } catch (...) {
    rethrow_as("occlusion");
  }
  clock.record("occlusion");

  const double center_gap =
      std::hypot(result.pupil.cx - result.iris.cx, result.pupil.cy - result.iris.cy);
  if (!(result.pupil.r < result.iris.r) || center_gap >= result.pupil.r)
    throw StageError("limbic", "implausible boundary geometry");
  return result;
}

}  // namespace iriseg
