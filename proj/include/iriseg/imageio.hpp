#ifndef IRISEG_IMAGEIO_HPP
#define IRISEG_IMAGEIO_HPP

#include "iriseg/core.hpp"

#include <string>

namespace iriseg {

/// 8-bit RGB raster for overlay output.
struct RgbImage {
  PlaneT<std::uint8_t> r, g, b;

  RgbImage() = default;
  RgbImage(Eigen::Index height, Eigen::Index width)
      : r(height, width), g(height, width), b(height, width) {}
  Eigen::Index rows() const { return r.rows(); }
  Eigen::Index cols() const { return r.cols(); }
};

/// Loads an 8-bit grayscale PGM (P2/P5) or PNG image and rescales intensities
/// to [0,1] by the format's max value. Color PNGs are converted to luminance
/// (Rec.601) before rescale. Throws std::runtime_error on unreadable files,
/// unsupported formats, and zero-dimension images.
Image load_image(const std::string& path);

/// Writes an intensity image as binary (P5) 8-bit PGM; values are clamped to
/// [0,1] and quantized by round(v*255).
void save_pgm(const std::string& path, const Image& img);

/// Writes an intensity image as 8-bit grayscale PNG, same quantization as
/// save_pgm.
void save_png_gray(const std::string& path, const Image& img);

/// Writes a binary mask as 8-bit grayscale PNG, set pixels white.
void save_png_mask(const std::string& path, const Mask& mask);

void save_png_rgb(const std::string& path, const RgbImage& img);

}  // namespace iriseg

#endif  // IRISEG_IMAGEIO_HPP
