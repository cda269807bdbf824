#include "wavestereo/types.hpp"

#include <algorithm>

namespace wavestereo {

namespace {

void require_finite(const FloatGrid& g) {
  const auto& d = g.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i]))
      fail(Errc::InvalidValue, "non-finite image pixel at index " + std::to_string(i));
  }
}

}  // namespace

Image::Image(int width, int height, float fill) : pixels_(width, height, fill) {
  if (!std::isfinite(fill)) fail(Errc::InvalidValue, "non-finite image fill value");
}

Image::Image(FloatGrid pixels) : pixels_(std::move(pixels)) { require_finite(pixels_); }

DisparityMap::DisparityMap(int width, int height)
    : d_(width, height, kInvalidDisparity), mask_(width, height, 0) {}

DisparityMap DisparityMap::from_values(FloatGrid values) {
  MaskGrid mask(values.width(), values.height(), 0);
  auto& v = values.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i]) && v[i] >= 0.0f)
      mask.data()[i] = 1;
    else
      v[i] = kInvalidDisparity;
  }
  return DisparityMap(std::move(values), std::move(mask));
}

DisparityMap::DisparityMap(FloatGrid values, MaskGrid mask)
    : d_(std::move(values)), mask_(std::move(mask)) {
  if (!d_.same_shape(mask_)) fail(Errc::DimensionMismatch, "disparity and mask shapes differ");
  auto& v = d_.data();
  const auto& m = mask_.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) {
      if (!std::isfinite(v[i]) || v[i] < 0.0f)
        fail(Errc::InvalidValue, "valid disparity entry is non-finite or negative");
    } else {
      v[i] = kInvalidDisparity;
    }
  }
}

void DisparityMap::set(int u, int v, float d) {
  if (!std::isfinite(d) || d < 0.0f) fail(Errc::InvalidValue, "disparity must be finite and >= 0");
  d_(u, v) = d;
  mask_(u, v) = 1;
}

void DisparityMap::invalidate(int u, int v) noexcept {
  d_(u, v) = kInvalidDisparity;
  mask_(u, v) = 0;
}

std::size_t DisparityMap::valid_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(mask_.data().begin(), mask_.data().end(), [](std::uint8_t m) { return m != 0; }));
}

void PointCloud::validate() const {
  if (!intensity.empty() && intensity.size() != points.size())
    fail(Errc::InvalidValue, "intensity count must be 0 or equal to the point count");
  for (const auto& p : points) {
    if (!p.allFinite()) fail(Errc::InvalidValue, "non-finite point coordinate");
  }
}

void WaveSeries::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(Errc::NonpositiveParameter, "series dt must be > 0");
  if (!std::isfinite(t0)) fail(Errc::InvalidValue, "series t0 must be finite");
  for (double e : eta) {
    if (!std::isfinite(e)) fail(Errc::InvalidValue, "non-finite elevation sample");
  }
}

Plane::Plane(const Eigen::Vector3d& normal, double offset) {
  const double len = normal.norm();
  if (!(len > 0.0) || !std::isfinite(len)) fail(Errc::InvalidValue, "plane normal must be nonzero");
  n = normal / len;
  c = offset / len;
}

}  // namespace wavestereo
