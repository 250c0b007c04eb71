#include "iriseg/components.hpp"

#include <stdexcept>

namespace iriseg {

ComponentLabels label_components(const Mask& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connectivity must be 4 or 8");

  const Eigen::Index h = mask.rows(), w = mask.cols();
  ComponentLabels cc;
  cc.labels = LabelMap::Zero(h, w);

  static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};

  std::vector<Eigen::Index> stack;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (!mask(y, x) || cc.labels(y, x) != 0) continue;
      const int label = static_cast<int>(cc.sizes.size()) + 1;
      int size = 0;
      cc.labels(y, x) = label;
      stack.push_back(y * w + x);
      while (!stack.empty()) {
        const Eigen::Index idx = stack.back();
        stack.pop_back();
        ++size;
        const Eigen::Index cy = idx / w, cx = idx % w;
        for (int k = 0; k < connectivity; ++k) {
          const Eigen::Index ny = cy + dy8[k], nx = cx + dx8[k];
          if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
          if (!mask(ny, nx) || cc.labels(ny, nx) != 0) continue;
          cc.labels(ny, nx) = label;
          stack.push_back(ny * w + nx);
        }
      }
      cc.sizes.push_back(size);
    }
  }
  return cc;
}

int largest_component(const ComponentLabels& cc) {
  int best = 0, best_size = 0;
  for (int k = 0; k < cc.count(); ++k) {
    if (cc.sizes[k] > best_size) {
      best_size = cc.sizes[k];
      best = k + 1;
    }
  }
  return best;
}

}  // namespace iriseg
