#ifndef IRISEG_EDGES_HPP
#define IRISEG_EDGES_HPP

#include "iriseg/core.hpp"

namespace iriseg {

struct EdgeParams {
  double sigma_zc = 2.0;   ///< LoG scale of the zero-crossing detector
  double lambda_c = 0.15;  ///< gradient-magnitude threshold
  int min_component = 50;  ///< components below this size are removed

  void validate() const;
};

/// Zero-crossing edge map of the LoG response at sigma_zc.
///
/// A sign change between 4-neighbors marks the pixel with the smaller
/// absolute response; an exactly-zero response with a nonzero 4-neighbor is
/// a crossing itself. Each crossing is scored by the first-order
/// differential strength of a Gaussian-smoothed copy of the input (same
/// sigma, central neighbor differences) on the stronger side of the pair;
/// crossings under lambda_c are dropped.
Mask zero_crossings(const Image& smooth, const EdgeParams& params);

/// Removes 8-connected components with fewer than min_component pixels.
Mask clean_components(const Mask& edges, int min_component);

}  // namespace iriseg

#endif  // IRISEG_EDGES_HPP
