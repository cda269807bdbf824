#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "wavestereo/types.hpp"

namespace wavestereo {

struct MatchParams {
  int d_min = 0;
  int d_max = 64;
  int census_window = 5;  // odd, 3..7 (signature fits in 64 bits)
  int P1 = 8;
  int P2 = 96;
  int paths = 8;          // 4 or 8
  double lr_threshold = 1.0;
  bool subpixel = true;
  /// Odd window for photometric subpixel refinement after the parabola step;
  /// 0 disables it. Only used when `subpixel` is set.
  int refine_window = 11;
  int threads = 1;

  int disparity_count() const noexcept { return d_max - d_min + 1; }
  int census_bits() const noexcept { return census_window * census_window - 1; }
  void validate() const;
};

/// Dense H x W x D volume, disparity fastest: index ((v * W) + u) * D + k,
/// where k = d - d_min.
template <typename T>
struct Volume {
  int width = 0;
  int height = 0;
  int d_min = 0;
  int ndisp = 0;
  std::vector<T> data;

  Volume() = default;
  Volume(int w, int h, int dmin, int nd, T fill = T{})
      : width(w), height(h), d_min(dmin), ndisp(nd),
        data(static_cast<std::size_t>(w) * h * nd, fill) {}

  T* at(int u, int v) noexcept {
    return data.data() + (static_cast<std::size_t>(v) * width + u) * ndisp;
  }
  const T* at(int u, int v) const noexcept {
    return data.data() + (static_cast<std::size_t>(v) * width + u) * ndisp;
  }
  T& operator()(int u, int v, int d) noexcept { return at(u, v)[d - d_min]; }
  T operator()(int u, int v, int d) const noexcept { return at(u, v)[d - d_min]; }
};

using CostVolume = Volume<std::uint8_t>;
using AggregatedVolume = Volume<std::uint16_t>;

/// Census signatures: bit set where the neighbor is darker than the center.
/// Out-of-image neighbors are clamped to the nearest border pixel.
Grid<std::uint64_t> census_transform(const Image& image, int window);

/// Hamming distance between left (u, v) and right (u - d, v) signatures.
/// Right samples left of column 0 cost census_bits().
CostVolume census_cost_volume(const Image& left, const Image& right, const MatchParams& params);

/// Semi-global aggregation summed over 4 (horizontal, vertical) or 8
/// (plus diagonal) scan directions.
AggregatedVolume sgm_aggregate(const CostVolume& cost, const MatchParams& params);

/// Winner-takes-all with ties toward the smaller disparity, optional
/// parabola refinement clamped to +-0.5 px. Pixels whose minimum is also
/// reached at a disparity more than 1 px away are ambiguous and masked.
DisparityMap wta_disparity(const AggregatedVolume& aggregated, const MatchParams& params);

/// Gauss-Newton refinement of each valid disparity minimizing the SSD
/// between a window of `left` around (u, v) and `right` sampled at u - d
/// (linear interpolation). Updates are limited to +-1 px around the input;
/// pixels whose window leaves the image or lacks gradient keep their value.
DisparityMap refine_disparity(const Image& left, const Image& right, const DisparityMap& disparity, int window,
                              int threads = 1);

/// Masks left pixels whose right-image partner round(u - d) is invalid or
/// disagrees by more than `threshold` px.
DisparityMap lr_consistency(const DisparityMap& left, const DisparityMap& right, double threshold);

Image mirror_horizontal(const Image& image);

/// Right-referenced disparity from matching the mirrored, swapped pair.
DisparityMap right_disparity(const Image& left, const Image& right, const MatchParams& params);

/// Full pipeline: census -> SGM -> WTA (+ subpixel) -> left-right check,
/// then photometric refinement of the surviving left disparities. Pixels
/// whose raw cost is identical at every in-image disparity are masked.
DisparityMap match_stereo(const Image& left, const Image& right, const MatchParams& params);

/// Loads an externally produced PFM disparity. Values outside [d_min, d_max]
/// or non-finite are masked. Throws DimensionMismatch, or AllMasked if
/// nothing survives.
DisparityMap ingest_external_disparity(const std::filesystem::path& path, int width, int height,
                                       const MatchParams& params);

}  // namespace wavestereo
