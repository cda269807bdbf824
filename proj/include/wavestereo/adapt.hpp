#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavestereo/types.hpp"

namespace wavestereo {

// Training-data synthesis for fine-tuning a stereo network on a target
// domain: a mono-depth map of the left image is remapped into a disparity
// range, the left image is forward-warped into a fake right view (occluded
// pixels excluded) and the remaining holes are filled from the real right
// image.

/// One synthesized sample. `visible` follows the occlusion-mask convention:
/// 1 = the left pixel is visible in the right view.
struct TrainingTuple {
  Image left;
  Image right_fake;
  DisparityMap disparity;
  MaskGrid visible;
};

/// Min-max normalizes L (relative inverse depth, larger = nearer) into
/// [d_min, d_max]. A constant L throws DegenerateRange unless
/// `constant_fill` is set, in which case every pixel gets d_min.
DisparityMap depth_to_disparity(const Image& L, double d_min, double d_max, bool constant_fill = false);

/// Q = u - d; visible where Q > 0 and, for columns u < W - 2, no column to the
/// right in the same row shares floor(Q). Columns W - 2 and W - 1 only get the
/// Q > 0 test. Masked-out disparities are never visible and never collide.
MaskGrid occlusion_mask(const DisparityMap& disparity);

struct WarpResult {
  Image warped;
  MaskGrid holes;  // 1 = nothing was splatted here
  /// Source column of each target pixel (same row), -1 for holes.
  Grid<int> source;
};

/// Splats each visible left pixel to column round(u - d) of its row. On
/// collisions the larger disparity wins; equal disparities keep the first
/// writer in scan order.
WarpResult forward_warp(const Image& left, const DisparityMap& disparity, const MaskGrid& visible);

/// Copies hole pixels from the real right image.
Image fill_holes(const Image& warped, const MaskGrid& holes, const Image& real_right);

TrainingTuple synthesize_tuple(const Image& left, const Image& real_right, const Image& L, double d_min,
                               double d_max, bool constant_fill = false);

struct AdaptManifest {
  std::vector<std::string> tuple_paths;  // tuple stems in shuffled order
  int batch_size = 2;
  int max_iterations = 20000;
  int crop_h = 320;
  int crop_w = 512;
  std::uint64_t shuffle_seed = 0;
  bool pretrained_init = true;

  nlohmann::json to_json() const;
  static AdaptManifest from_json(const nlohmann::json& doc);
};

/// Fisher-Yates over [0, n) driven by mt19937_64(seed).
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

/// Writes NNNN_left.pgm, NNNN_right_fake.pgm, NNNN_disp.pfm, NNNN_occ.pgm
/// per tuple and manifest.json. `settings` supplies everything but
/// tuple_paths and shuffle_seed.
AdaptManifest export_dataset(const std::vector<TrainingTuple>& tuples, const std::filesystem::path& out_dir,
                             std::uint64_t seed, const AdaptManifest& settings = {});

TrainingTuple load_tuple(const std::filesystem::path& dir, const std::string& stem);

}  // namespace wavestereo
