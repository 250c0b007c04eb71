#include "iriseg/render.hpp"

#include <json.hpp>

#include <cmath>

namespace iriseg {

namespace {

struct Color {
  std::uint8_t r, g, b;
};

void put(RgbImage& img, double x, double y, Color c) {
  const Eigen::Index xi = static_cast<Eigen::Index>(std::lround(x));
  const Eigen::Index yi = static_cast<Eigen::Index>(std::lround(y));
  if (xi < 0 || xi >= img.cols() || yi < 0 || yi >= img.rows()) return;
  img.r(yi, xi) = c.r;
  img.g(yi, xi) = c.g;
  img.b(yi, xi) = c.b;
}

void draw_circle(RgbImage& img, const Circle& c, Color color) {
  const int steps = std::max(64, static_cast<int>(2.0 * kPi * c.r * 2.0));
  for (int k = 0; k < steps; ++k) {
    const double a = 2.0 * kPi * k / steps;
    put(img, c.cx + c.r * std::cos(a), c.cy + c.r * std::sin(a), color);
  }
}

void draw_arc(RgbImage& img, const Circle& c, double a0, double a1, Color color) {
  const int steps = std::max(8, static_cast<int>((a1 - a0) * c.r * 2.0));
  for (int k = 0; k <= steps; ++k) {
    const double a = a0 + (a1 - a0) * k / steps;
    put(img, c.cx + c.r * std::cos(a), c.cy + c.r * std::sin(a), color);
  }
}

void draw_segment(RgbImage& img, double x0, double y0, double x1, double y1,
                  Color color) {
  const double len = std::hypot(x1 - x0, y1 - y0);
  const int steps = std::max(2, static_cast<int>(len * 2.0));
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    put(img, x0 + (x1 - x0) * t, y0 + (y1 - y0) * t, color);
  }
}

}  // namespace

RgbImage render_overlay(const Image& img, const SegmentationResult& result) {
  RgbImage out(img.rows(), img.cols());
  for (Eigen::Index y = 0; y < img.rows(); ++y)
    for (Eigen::Index x = 0; x < img.cols(); ++x) {
      const double v = img(y, x);
      const std::uint8_t g =
          v <= 0.0 ? 0 : (v >= 1.0 ? 255 : static_cast<std::uint8_t>(v * 255.0 + 0.5));
      out.r(y, x) = g;
      out.g(y, x) = g;
      out.b(y, x) = g;
    }

  const Color green{0, 220, 0}, red{230, 30, 30}, yellow{240, 220, 0},
      cyan{0, 200, 220};

  // Orientation axis through the iris center.
  const double ax = std::cos(result.orientation), ay = std::sin(result.orientation);
  draw_segment(out, result.iris.cx - result.iris.r * ax,
               result.iris.cy - result.iris.r * ay,
               result.iris.cx + result.iris.r * ax,
               result.iris.cy + result.iris.r * ay, cyan);

  draw_circle(out, result.pupil, green);
  draw_circle(out, result.iris, red);
  for (const auto& run : result.gap_runs)
    draw_arc(out, result.iris, run.first, run.second, yellow);
  return out;
}

std::string result_to_json(const std::string& image_id,
                           const SegmentationResult& result) {
  nlohmann::ordered_json j;
  j["image"] = image_id;
  j["pupil"] = {{"cx", result.pupil.cx}, {"cy", result.pupil.cy}, {"r", result.pupil.r}};
  j["iris"] = {{"cx", result.iris.cx}, {"cy", result.iris.cy}, {"r", result.iris.r}};
  j["orientation_rad"] = result.orientation;
  j["orientation_low_confidence"] = result.orientation_low_confidence;
  j["pupil_refined"] = result.pupil_refined;
  auto runs = nlohmann::ordered_json::array();
  for (const auto& run : result.gap_runs)
    runs.push_back({run.first * 180.0 / kPi, run.second * 180.0 / kPi});
  j["gap_runs_deg"] = runs;
  auto timings = nlohmann::ordered_json::object();
  for (const auto& t : result.timings) timings[t.name] = t.ms;
  j["timings_ms"] = timings;
  return j.dump(2);
}

}  // namespace iriseg
