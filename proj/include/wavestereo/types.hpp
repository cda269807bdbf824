#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavestereo/error.hpp"

namespace wavestereo {

/// Dense row-major 2D raster, top-down. Pixel (u, v) is column u of row v.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) fail(Errc::InvalidArgument, "negative grid dimensions");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Grid(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      fail(Errc::DimensionMismatch, "grid payload does not match width*height");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int u, int v) noexcept { return data_[index(u, v)]; }
  const T& operator()(int u, int v) const noexcept { return data_[index(u, v)]; }
  std::size_t index(int u, int v) const noexcept {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }
  bool contains(int u, int v) const noexcept {
    return u >= 0 && v >= 0 && u < width_ && v < height_;
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool same_shape(int w, int h) const noexcept { return w == width_ && h == height_; }
  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return other.width() == width_ && other.height() == height_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using FloatGrid = Grid<float>;
using MaskGrid = Grid<std::uint8_t>;  // 0 = false, 1 = true

/// Single-channel intensity image. All pixels are finite.
class Image {
 public:
  Image() = default;
  Image(int width, int height, float fill = 0.0f);
  explicit Image(FloatGrid pixels);

  int width() const noexcept { return pixels_.width(); }
  int height() const noexcept { return pixels_.height(); }
  float operator()(int u, int v) const noexcept { return pixels_(u, v); }
  /// Writes must stay finite; this is not re-checked.
  float& at(int u, int v) noexcept { return pixels_(u, v); }
  const FloatGrid& grid() const noexcept { return pixels_; }
  FloatGrid& grid() noexcept { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  FloatGrid pixels_;
};

inline constexpr float kInvalidDisparity = std::numeric_limits<float>::quiet_NaN();

/// Per-pixel horizontal disparity (px) with an authoritative validity mask.
/// Masked-out entries hold NaN. Valid entries are finite and non-negative.
class DisparityMap {
 public:
  DisparityMap() = default;
  DisparityMap(int width, int height);
  /// Valid where the value is finite and >= 0; anything else is masked and reset to NaN.
  static DisparityMap from_values(FloatGrid values);
  /// Explicit mask; masked entries are rewritten to NaN. Throws if a masked-in
  /// entry is non-finite or negative.
  DisparityMap(FloatGrid values, MaskGrid mask);

  int width() const noexcept { return d_.width(); }
  int height() const noexcept { return d_.height(); }
  bool valid(int u, int v) const noexcept { return mask_(u, v) != 0; }
  float operator()(int u, int v) const noexcept { return d_(u, v); }

  void set(int u, int v, float d);
  void invalidate(int u, int v) noexcept;

  const FloatGrid& values() const noexcept { return d_; }
  const MaskGrid& mask() const noexcept { return mask_; }
  std::size_t valid_count() const noexcept;

 private:
  FloatGrid d_;
  MaskGrid mask_;
};

enum class Frame { Camera, World };

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<float> intensity;  // empty or one per point
  Frame frame = Frame::Camera;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  bool has_intensity() const noexcept { return !intensity.empty(); }
  /// Throws InvalidValue on non-finite coordinates or a mismatched intensity count.
  void validate() const;
};

struct WaveSeries {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> eta;
  std::string probe_id;
  Eigen::Vector2d probe_xy = Eigen::Vector2d::Zero();

  std::size_t size() const noexcept { return eta.size(); }
  double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
  void validate() const;
};

/// Points p with n.p == c; n is unit length.
struct Plane {
  Eigen::Vector3d n = Eigen::Vector3d::UnitZ();
  double c = 0.0;

  Plane() = default;
  /// Normalizes (n, c) jointly. Throws InvalidValue for a zero normal.
  Plane(const Eigen::Vector3d& normal, double offset);

  double signed_distance(const Eigen::Vector3d& p) const noexcept { return n.dot(p) - c; }
};

}  // namespace wavestereo
