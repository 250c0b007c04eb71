#include "iriseg/pupil.hpp"

#include "iriseg/components.hpp"
#include "iriseg/filters.hpp"

#include <deque>
#include <limits>
#include <stdexcept>

namespace iriseg {

void PupilParams::validate() const {
  if (!(t1 > 0.0 && t1 < t2 && t2 < 1.0))
    throw std::invalid_argument("require 0 < t1 < t2 < 1");
  if (!(r_avg >= 2.0)) throw std::invalid_argument("r_avg must be >= 2");
  if (!(lambda_a > 0.5 && lambda_a < 1.0))
    throw std::invalid_argument("lambda_a must lie in (0.5, 1)");
  if (!(grow_tolerance > 0.0 && grow_tolerance < 1.0))
    throw std::invalid_argument("grow_tolerance must lie in (0, 1)");
  if (open_radius < 1) throw std::invalid_argument("open_radius must be >= 1");
}

Image to_trilevel(const Image& img, double t1, double t2) {
  if (!(t1 < t2)) throw std::invalid_argument("require t1 < t2");
  Image out(img.rows(), img.cols());
  const double* src = img.data();
  double* dst = out.data();
  for (Eigen::Index i = 0; i < img.size(); ++i) {
    const double v = src[i];
    dst[i] = v < t1 ? 0.0 : (v <= t2 ? 1.0 : 0.5);
  }
  return out;
}

Image coarse_log_response(const Image& tri, double r_avg) {
  return rescale01(log_response(tri, r_avg, true));
}

Mask seed_mask(const Image& response, double lambda_a) {
  return (response > lambda_a).cast<std::uint8_t>();
}

Eigen::Vector2i seed_point(const Mask& mask) {
  const ComponentLabels cc = label_components(mask, 8);
  const int label = largest_component(cc);
  if (label == 0) throw StageError("pupil", "no pupil candidate");

  double sx = 0.0, sy = 0.0;
  int n = 0;
  for (Eigen::Index y = 0; y < mask.rows(); ++y)
    for (Eigen::Index x = 0; x < mask.cols(); ++x)
      if (cc.labels(y, x) == label) {
        sx += static_cast<double>(x);
        sy += static_cast<double>(y);
        ++n;
      }
  const double cx = sx / n, cy = sy / n;

  // Snap to the member pixel nearest the centroid so region growing starts
  // in-region even on concave masks. Ties resolve in scan order.
  Eigen::Vector2i best(0, 0);
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index y = 0; y < mask.rows(); ++y)
    for (Eigen::Index x = 0; x < mask.cols(); ++x)
      if (cc.labels(y, x) == label) {
        const double d = (cx - x) * (cx - x) + (cy - y) * (cy - y);
        if (d < best_d) {
          best_d = d;
          best = Eigen::Vector2i(static_cast<int>(x), static_cast<int>(y));
        }
      }
  return best;
}

PixelRegion region_grow(const Image& smooth, const Eigen::Vector2i& seed,
                        double grow_tolerance) {
  const Eigen::Index h = smooth.rows(), w = smooth.cols();
  if (seed.x() < 0 || seed.x() >= w || seed.y() < 0 || seed.y() >= h)
    throw std::invalid_argument("seed outside image");

  const double ref = smooth(seed.y(), seed.x());
  Mask visited = Mask::Zero(h, w);
  PixelRegion region;
  region.bbox.setEmpty();

  static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};

  std::deque<Eigen::Vector2i> frontier;
  visited(seed.y(), seed.x()) = 1;
  frontier.push_back(seed);
  double sx = 0.0, sy = 0.0;
  while (!frontier.empty()) {
    const Eigen::Vector2i p = frontier.front();
    frontier.pop_front();
    region.pixels.push_back(p);
    region.bbox.extend(p);
    sx += p.x();
    sy += p.y();
    for (int k = 0; k < 8; ++k) {
      const Eigen::Index nx = p.x() + dx8[k], ny = p.y() + dy8[k];
      if (nx < 0 || nx >= w || ny < 0 || ny >= h || visited(ny, nx)) continue;
      if (std::abs(smooth(ny, nx) - ref) <= grow_tolerance) {
        visited(ny, nx) = 1;
        frontier.push_back(Eigen::Vector2i(static_cast<int>(nx), static_cast<int>(ny)));
      }
    }
  }
  region.centroid = Eigen::Vector2d(sx / region.area(), sy / region.area());
  return region;
}

Circle pupil_estimate(const PixelRegion& region) {
  if (region.area() < 9) throw StageError("pupil", "pupil not found");
  Circle c;
  c.cx = region.centroid.x();
  c.cy = region.centroid.y();
  c.r = std::sqrt(region.area() / kPi);
  return c;
}

}  // namespace iriseg
