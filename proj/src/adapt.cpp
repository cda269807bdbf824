#include "wavestereo/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_set>

#include "wavestereo/io.hpp"

namespace wavestereo {

DisparityMap depth_to_disparity(const Image& L, double d_min, double d_max, bool constant_fill) {
  if (!(d_min < d_max)) fail(Errc::InvalidArgument, "need d_min < d_max");
  if (d_min < 0.0) fail(Errc::InvalidArgument, "d_min must be >= 0");
  const auto& px = L.grid().data();
  if (px.empty()) fail(Errc::InvalidArgument, "empty depth map");
  const auto [lo_it, hi_it] = std::minmax_element(px.begin(), px.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  FloatGrid out(L.width(), L.height(), static_cast<float>(d_min));
  if (hi == lo) {
    if (!constant_fill) fail(Errc::DegenerateRange, "depth map is constant");
    return DisparityMap::from_values(std::move(out));
  }
  const double span = d_max - d_min;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double norm = (px[i] - lo) / (hi - lo);
    out.data()[i] = static_cast<float>(norm * span + d_min);
  }
  return DisparityMap::from_values(std::move(out));
}

MaskGrid occlusion_mask(const DisparityMap& disparity) {
  const int W = disparity.width();
  const int H = disparity.height();
  MaskGrid mask(W, H, 0);
  std::unordered_set<long long> seen;
  for (int v = 0; v < H; ++v) {
    seen.clear();
    for (int u = W - 1; u >= 0; --u) {
      if (!disparity.valid(u, v)) continue;
      const double q = u - static_cast<double>(disparity(u, v));
      const auto q_down = static_cast<long long>(std::floor(q));
      bool visible = q > 0.0;
      // Collision test covers columns u <= W - 3 against every column to their right.
      if (visible && u <= W - 3 && seen.contains(q_down)) visible = false;
      mask(u, v) = visible ? 1 : 0;
      seen.insert(q_down);
    }
  }
  return mask;
}

WarpResult forward_warp(const Image& left, const DisparityMap& disparity, const MaskGrid& visible) {
  const int W = left.width();
  const int H = left.height();
  if (!disparity.values().same_shape(W, H) || !visible.same_shape(W, H))
    fail(Errc::DimensionMismatch, "warp inputs differ in size");
  FloatGrid warped(W, H, 0.0f);
  MaskGrid holes(W, H, 1);
  Grid<int> source(W, H, -1);
  FloatGrid winner(W, H, -1.0f);
  for (int v = 0; v < H; ++v) {
    for (int u = 0; u < W; ++u) {
      if (!visible(u, v) || !disparity.valid(u, v)) continue;
      const float d = disparity(u, v);
      const double target = std::floor(u - static_cast<double>(d) + 0.5);
      if (target < 0.0 || target >= W) continue;
      const int t = static_cast<int>(target);
      if (d <= winner(t, v)) continue;
      winner(t, v) = d;
      warped(t, v) = left(u, v);
      holes(t, v) = 0;
      source(t, v) = u;
    }
  }
  return {Image(std::move(warped)), std::move(holes), std::move(source)};
}

Image fill_holes(const Image& warped, const MaskGrid& holes, const Image& real_right) {
  const int W = warped.width();
  const int H = warped.height();
  if (!holes.same_shape(W, H) || !real_right.grid().same_shape(W, H))
    fail(Errc::DimensionMismatch, "hole-filling inputs differ in size");
  Image out = warped;
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u)
      if (holes(u, v)) out.at(u, v) = real_right(u, v);
  return out;
}

TrainingTuple synthesize_tuple(const Image& left, const Image& real_right, const Image& L, double d_min,
                               double d_max, bool constant_fill) {
  if (!real_right.grid().same_shape(left.grid()) || !L.grid().same_shape(left.grid()))
    fail(Errc::DimensionMismatch, "left, right and depth images differ in size");
  DisparityMap disparity = depth_to_disparity(L, d_min, d_max, constant_fill);
  MaskGrid visible = occlusion_mask(disparity);
  WarpResult warp = forward_warp(left, disparity, visible);
  Image right_fake = fill_holes(warp.warped, warp.holes, real_right);
  return {left, std::move(right_fake), std::move(disparity), std::move(visible)};
}

nlohmann::json AdaptManifest::to_json() const {
  return {{"tuples", tuple_paths},
          {"batch_size", batch_size},
          {"max_iterations", max_iterations},
          {"crop", {crop_h, crop_w}},
          {"shuffle_seed", shuffle_seed},
          {"pretrained_init", pretrained_init}};
}

AdaptManifest AdaptManifest::from_json(const nlohmann::json& doc) {
  AdaptManifest m;
  try {
    for (const char* key : {"tuples", "batch_size", "max_iterations", "crop", "shuffle_seed"})
      if (!doc.contains(key)) fail(Errc::MissingKey, std::string("manifest lacks '") + key + "'");
    m.tuple_paths = doc.at("tuples").get<std::vector<std::string>>();
    m.batch_size = doc.at("batch_size").get<int>();
    m.max_iterations = doc.at("max_iterations").get<int>();
    const auto crop = doc.at("crop").get<std::vector<int>>();
    if (crop.size() != 2) fail(Errc::InvalidValue, "crop must hold [height, width]");
    m.crop_h = crop[0];
    m.crop_w = crop[1];
    m.shuffle_seed = doc.at("shuffle_seed").get<std::uint64_t>();
    m.pretrained_init = doc.value("pretrained_init", true);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidValue, std::string("bad manifest: ") + e.what());
  }
  if (m.batch_size < 1 || m.max_iterations < 1 || m.crop_h < 1 || m.crop_w < 1)
    fail(Errc::NonpositiveParameter, "batch size, iterations and crop must be positive");
  return m;
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

namespace {

std::string stem_for(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

}  // namespace

AdaptManifest export_dataset(const std::vector<TrainingTuple>& tuples, const std::filesystem::path& out_dir,
                             std::uint64_t seed, const AdaptManifest& settings) {
  if (tuples.empty()) fail(Errc::InvalidArgument, "no tuples to export");
  const int W = tuples.front().left.width();
  const int H = tuples.front().left.height();
  if (settings.crop_h > H || settings.crop_w > W)
    fail(Errc::InvalidArgument, "crop " + std::to_string(settings.crop_h) + "x" + std::to_string(settings.crop_w) +
                                    " exceeds image " + std::to_string(H) + "x" + std::to_string(W));
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Errc::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const TrainingTuple& t = tuples[i];
    const std::string stem = stem_for(i);
    io::write_pgm(t.left, out_dir / (stem + "_left.pgm"));
    io::write_pgm(t.right_fake, out_dir / (stem + "_right_fake.pgm"));
    io::write_pfm(t.disparity, out_dir / (stem + "_disp.pfm"));
    io::write_mask_pgm(t.visible, out_dir / (stem + "_occ.pgm"));
  }

  AdaptManifest m = settings;
  m.shuffle_seed = seed;
  m.tuple_paths.clear();
  for (std::size_t i : shuffled_order(tuples.size(), seed)) m.tuple_paths.push_back(stem_for(i));
  io::write_json(m.to_json(), out_dir / "manifest.json");
  return m;
}

TrainingTuple load_tuple(const std::filesystem::path& dir, const std::string& stem) {
  TrainingTuple t;
  t.left = io::read_pgm(dir / (stem + "_left.pgm"));
  t.right_fake = io::read_pgm(dir / (stem + "_right_fake.pgm"));
  t.disparity = io::read_disparity_pfm(dir / (stem + "_disp.pfm"));
  t.visible = io::read_mask_pgm(dir / (stem + "_occ.pgm"));
  return t;
}

}  // namespace wavestereo
