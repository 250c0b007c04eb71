#include "iriseg/imageio.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace iriseg {

namespace {

std::uint8_t quantize8(double v) {
  if (v <= 0.0) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(v * 255.0 + 0.5);
}

/// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (!std::isspace(ch)) {
      tok.push_back(static_cast<char>(ch));
      while ((ch = in.get()) != EOF && !std::isspace(ch) && ch != '#')
        tok.push_back(static_cast<char>(ch));
      if (ch == '#') in.unget();
      break;
    }
  }
  if (tok.empty()) throw std::runtime_error("truncated PGM header");
  return tok;
}

long pgm_int(std::istream& in) {
  const std::string tok = pgm_token(in);
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("malformed PGM header token '" + tok + "'");
  }
  if (pos != tok.size())
    throw std::runtime_error("malformed PGM header token '" + tok + "'");
  return v;
}

Image load_pgm(std::istream& in, const std::string& path) {
  const std::string magic = pgm_token(in);
  const bool binary = magic == "P5";
  if (!binary && magic != "P2")
    throw std::runtime_error(path + ": unsupported PGM variant " + magic);

  const long w = pgm_int(in);
  const long h = pgm_int(in);
  const long maxval = pgm_int(in);
  if (w <= 0 || h <= 0)
    throw std::runtime_error(path + ": zero-dimension image");
  if (maxval <= 0 || maxval > 255)
    throw std::runtime_error(path + ": only 8-bit PGM is supported");

  Image img(h, w);
  if (binary) {
    // Single whitespace byte separates the header from the raster.
    std::vector<unsigned char> buf(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw std::runtime_error(path + ": truncated PGM raster");
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x)
        img(y, x) = buf[static_cast<size_t>(y) * w + x] / static_cast<double>(maxval);
  } else {
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x) {
        const long v = pgm_int(in);
        if (v < 0 || v > maxval)
          throw std::runtime_error(path + ": PGM sample out of range");
        img(y, x) = v / static_cast<double>(maxval);
      }
  }
  return img;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error(path + ": cannot open file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> pixels;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": PNG decode error");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  if (w == 0 || h == 0) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": zero-dimension image");
  }

  // Normalize everything to 8-bit RGB or gray.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE)
    png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY &&
      png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": unsupported PNG layout");
  }

  const size_t stride = static_cast<size_t>(w) * channels;
  pixels.resize(stride * h);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = pixels.data() + y * stride;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(h, w);
  for (png_uint_32 y = 0; y < h; ++y) {
    const png_byte* row = pixels.data() + y * stride;
    for (png_uint_32 x = 0; x < w; ++x) {
      double v;
      if (channels == 1) {
        v = row[x] / 255.0;
      } else {
        const png_byte* px = row + 3 * x;
        v = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) / 255.0;
      }
      img(y, x) = v;
    }
  }
  return img;
}

void write_png(const std::string& path, Eigen::Index h, Eigen::Index w,
               int color_type, const std::vector<png_byte>& pixels) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error(path + ": cannot open file for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::vector<png_bytep> row_ptrs(h);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error(path + ": PNG encode error");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h),
               8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const size_t stride = pixels.size() / static_cast<size_t>(h);
  for (Eigen::Index y = 0; y < h; ++y)
    row_ptrs[y] = const_cast<png_bytep>(pixels.data() + y * stride);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Image load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2) throw std::runtime_error(path + ": not a raster file");
  in.seekg(0);
  if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5'))
    return load_pgm(in, path);
  if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
    in.close();
    return load_png(path);
  }
  throw std::runtime_error(path + ": unsupported format (want 8-bit PGM or PNG)");
}

void save_pgm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  std::vector<unsigned char> buf(static_cast<size_t>(img.size()));
  for (Eigen::Index y = 0; y < img.rows(); ++y)
    for (Eigen::Index x = 0; x < img.cols(); ++x)
      buf[static_cast<size_t>(y) * img.cols() + x] = quantize8(img(y, x));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

void save_png_gray(const std::string& path, const Image& img) {
  std::vector<png_byte> pixels(static_cast<size_t>(img.size()));
  for (Eigen::Index y = 0; y < img.rows(); ++y)
    for (Eigen::Index x = 0; x < img.cols(); ++x)
      pixels[static_cast<size_t>(y) * img.cols() + x] = quantize8(img(y, x));
  write_png(path, img.rows(), img.cols(), PNG_COLOR_TYPE_GRAY, pixels);
}

void save_png_mask(const std::string& path, const Mask& mask) {
  std::vector<png_byte> pixels(static_cast<size_t>(mask.size()));
  for (Eigen::Index y = 0; y < mask.rows(); ++y)
    for (Eigen::Index x = 0; x < mask.cols(); ++x)
      pixels[static_cast<size_t>(y) * mask.cols() + x] = mask(y, x) ? 255 : 0;
  write_png(path, mask.rows(), mask.cols(), PNG_COLOR_TYPE_GRAY, pixels);
}

void save_png_rgb(const std::string& path, const RgbImage& img) {
  const Eigen::Index h = img.rows(), w = img.cols();
  std::vector<png_byte> pixels(static_cast<size_t>(h) * w * 3);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      const size_t o = (static_cast<size_t>(y) * w + x) * 3;
      pixels[o] = img.r(y, x);
      pixels[o + 1] = img.g(y, x);
      pixels[o + 2] = img.b(y, x);
    }
  write_png(path, h, w, PNG_COLOR_TYPE_RGB, pixels);
}

}  // namespace iriseg
