#ifndef IRISEG_CORE_HPP
#define IRISEG_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace iriseg {

/// Dense 2-D raster, row-major so (row, col) walks memory like scanlines.
template <class Scalar>
using PlaneT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Grayscale image or filter response. Pipeline inputs hold intensities in
/// [0,1]; filter responses are signed and unclamped.
using Image = PlaneT<double>;

/// Binary raster: 0 = background, 1 = set.
using Mask = PlaneT<std::uint8_t>;

/// Connected-component label raster: 0 = background, labels start at 1.
using LabelMap = PlaneT<int>;

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;
};

/// Failure of one pipeline stage; carries the stage name so callers can
/// report which step gave up.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

/// Signed angular difference a-b wrapped into (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  if (d > kPi) d -= 2.0 * kPi;
  return d;
}

}  // namespace iriseg

#endif  // IRISEG_CORE_HPP
