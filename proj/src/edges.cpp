#include "iriseg/edges.hpp"

#include "iriseg/components.hpp"
#include "iriseg/filters.hpp"

#include <stdexcept>

namespace iriseg {

void EdgeParams::validate() const {
  if (!(sigma_zc > 0.0)) throw std::invalid_argument("sigma_zc must be positive");
  if (lambda_c < 0.0) throw std::invalid_argument("lambda_c must be >= 0");
  if (min_component < 1) throw std::invalid_argument("min_component must be >= 1");
}

Mask zero_crossings(const Image& smooth, const EdgeParams& params) {
  params.validate();
  const Eigen::Index h = smooth.rows(), w = smooth.cols();
  const Image response = log_response(smooth, params.sigma_zc, false);

  // First-order differential strength on a Gaussian-smoothed copy: central
  // neighbor differences over their two-pixel baseline. The edge itself
  // lies between the two pixels of a sign change, so a crossing is scored
  // by the stronger side of its pair; weak crossings are spurious and
  // dropped.
  const Image blurred = gaussian_smooth(smooth, params.sigma_zc);
  Image grad(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index xl = x > 0 ? x - 1 : 0, xr = x + 1 < w ? x + 1 : w - 1;
      const Eigen::Index yu = y > 0 ? y - 1 : 0, yd = y + 1 < h ? y + 1 : h - 1;
      const double gx = blurred(y, xr) - blurred(y, xl);
      const double gy = blurred(yd, x) - blurred(yu, x);
      grad(y, x) = std::sqrt(gx * gx + gy * gy);
    }
  }

  // A sign change between 4-neighbors marks the pixel with the smaller
  // |response|, which keeps contours at most one pixel thick. An exact zero
  // next to a nonzero neighbor is itself a crossing.
  Mask edges = Mask::Zero(h, w);
  auto mark_pair = [&](Eigen::Index y, Eigen::Index x, Eigen::Index ny,
                       Eigen::Index nx) {
    const double a = response(y, x), b = response(ny, nx);
    if ((a > 0.0) == (b > 0.0)) return;
    if (std::max(grad(y, x), grad(ny, nx)) < params.lambda_c) return;
    if (std::abs(a) <= std::abs(b))
      edges(y, x) = 1;
    else
      edges(ny, nx) = 1;
  };
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const double a = response(y, x);
      if (a == 0.0) {
        bool nonzero_neighbor = false;
        double best = grad(y, x);
        if (x + 1 < w && response(y, x + 1) != 0.0) {
          nonzero_neighbor = true;
          best = std::max(best, grad(y, x + 1));
        }
        if (x > 0 && response(y, x - 1) != 0.0) {
          nonzero_neighbor = true;
          best = std::max(best, grad(y, x - 1));
        }
        if (y + 1 < h && response(y + 1, x) != 0.0) {
          nonzero_neighbor = true;
          best = std::max(best, grad(y + 1, x));
        }
        if (y > 0 && response(y - 1, x) != 0.0) {
          nonzero_neighbor = true;
          best = std::max(best, grad(y - 1, x));
        }
        if (nonzero_neighbor && best >= params.lambda_c) edges(y, x) = 1;
        continue;
      }
      if (x + 1 < w && response(y, x + 1) != 0.0) mark_pair(y, x, y, x + 1);
      if (y + 1 < h && response(y + 1, x) != 0.0) mark_pair(y, x, y + 1, x);
    }
  }
  return edges;
}

Mask clean_components(const Mask& edges, int min_component) {
  if (min_component < 1) throw std::invalid_argument("min_component must be >= 1");
  const ComponentLabels cc = label_components(edges, 8);
  Mask out = Mask::Zero(edges.rows(), edges.cols());
  for (Eigen::Index y = 0; y < edges.rows(); ++y)
    for (Eigen::Index x = 0; x < edges.cols(); ++x) {
      const int label = cc.labels(y, x);
      if (label != 0 && cc.sizes[label - 1] >= min_component) out(y, x) = 1;
    }
  return out;
}

}  // namespace iriseg
