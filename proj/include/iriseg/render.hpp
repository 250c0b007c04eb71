#ifndef IRISEG_RENDER_HPP
#define IRISEG_RENDER_HPP

#include "iriseg/boundary.hpp"
#include "iriseg/imageio.hpp"

namespace iriseg {

/// Draws the segmentation on top of the input: pupil circle green, iris
/// circle red, orientation axis cyan, occluded angular runs yellow.
RgbImage render_overlay(const Image& img, const SegmentationResult& result);

/// Serializes a result to a single JSON object (circles, orientation, gap
/// runs in degrees, timings in ms).
std::string result_to_json(const std::string& image_id,
                           const SegmentationResult& result);

}  // namespace iriseg

#endif  // IRISEG_RENDER_HPP
