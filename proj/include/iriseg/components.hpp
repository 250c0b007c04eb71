#ifndef IRISEG_COMPONENTS_HPP
#define IRISEG_COMPONENTS_HPP

#include "iriseg/core.hpp"

#include <vector>

namespace iriseg {

/// Result of connected-component labeling. Labels start at 1; 0 is
/// background. sizes[k] is the pixel count of label k+1.
struct ComponentLabels {
  LabelMap labels;
  std::vector<int> sizes;

  int count() const { return static_cast<int>(sizes.size()); }
};

/// Labels connected components of the set pixels. connectivity is 4 or 8.
ComponentLabels label_components(const Mask& mask, int connectivity = 8);

/// Label of the largest component (ties broken by smaller label), or 0 if
/// there are none.
int largest_component(const ComponentLabels& cc);

}  // namespace iriseg

#endif  // IRISEG_COMPONENTS_HPP
