#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "support.hpp"
#include "wavestereo/adapt.hpp"
#include "wavestereo/io.hpp"
#include "wavestereo/metrics.hpp"

using namespace wavestereo;

namespace {

DisparityMap row_map(const std::vector<float>& d) {
  return DisparityMap::from_values(FloatGrid(static_cast<int>(d.size()), 1, d));
}

std::vector<int> mask_row(const MaskGrid& m, int v = 0) {
  std::vector<int> out;
  for (int u = 0; u < m.width(); ++u) out.push_back(m(u, v));
  return out;
}

// Direct O(W^2) reading of the occlusion rule.
MaskGrid brute_force_occlusion(const DisparityMap& d) {
  const int W = d.width();
  MaskGrid m(W, d.height(), 0);
  for (int v = 0; v < d.height(); ++v)
    for (int u = 0; u < W; ++u) {
      if (!d.valid(u, v)) continue;
      const double q = u - static_cast<double>(d(u, v));
      bool visible = q > 0.0;
      if (visible && u <= W - 3)
        for (int w = u + 1; w < W; ++w)
          if (d.valid(w, v) && std::floor(w - static_cast<double>(d(w, v))) == std::floor(q)) visible = false;
      m(u, v) = visible ? 1 : 0;
    }
  return m;
}

DisparityMap random_disparity(int W, int H, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(0.0f, static_cast<float>(W) / 2);
  std::uniform_int_distribution<int> coin(0, 9);
  std::uniform_int_distribution<int> level(0, 6);
  const bool integer = coin(rng) < 3;
  FloatGrid g(W, H);
  for (float& x : g.data()) {
    const int c = coin(rng);
    if (c == 0)
      x = std::numeric_limits<float>::quiet_NaN();
    else
      x = integer ? static_cast<float>(level(rng)) : dist(rng);
  }
  return DisparityMap::from_values(std::move(g));
}

}  // namespace

TEST_SUITE("adapt") {
  TEST_CASE("depth to disparity normalizes endpoints") {
    Image L(2, 2);
    L.at(0, 0) = 0;
    L.at(1, 0) = 1;
    L.at(0, 1) = 2;
    L.at(1, 1) = 4;
    const auto d = depth_to_disparity(L, 10, 20);
    CHECK(d(0, 0) == 10.0f);
    CHECK(d(1, 0) == 12.5f);
    CHECK(d(0, 1) == 15.0f);
    CHECK(d(1, 1) == 20.0f);
  }

  TEST_CASE("ramp maps to a ramp spanning the range") {
    Image L(9, 3);
    for (int v = 0; v < 3; ++v)
      for (int u = 0; u < 9; ++u) L.at(u, v) = static_cast<float>(3 * u + 1);
    const auto d = depth_to_disparity(L, 4, 12);
    for (int u = 0; u < 9; ++u) CHECK(d(u, 1) == doctest::Approx(4 + u));
  }

  TEST_CASE("constant depth map") {
    const Image L(4, 4, 3.0f);
    try {
      depth_to_disparity(L, 1, 2);
      FAIL("expected DegenerateRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::DegenerateRange);
    }
    const auto d = depth_to_disparity(L, 1, 2, true);
    CHECK(d.valid_count() == 16);
    CHECK(d(2, 2) == 1.0f);
  }

  TEST_CASE("occlusion mask worked examples") {
    CHECK(mask_row(occlusion_mask(row_map({1, 1, 1, 3, 3}))) == std::vector<int>{0, 0, 0, 0, 1});
    CHECK(mask_row(occlusion_mask(row_map({0, 0, 0, 0, 0, 0}))) == std::vector<int>{0, 1, 1, 1, 1, 1});
    // Constant disparity c: visible exactly where u - c > 0.
    const float c = 2.5f;
    const auto m = occlusion_mask(row_map(std::vector<float>(10, c)));
    for (int u = 0; u < 10; ++u) CHECK(m(u, 0) == (u - c > 0 ? 1 : 0));
  }

  TEST_CASE("masked disparities never collide and are never visible") {
    const float nan = std::numeric_limits<float>::quiet_NaN();
    const auto m = occlusion_mask(row_map({nan, 1, 5, nan, 8, nan, nan}));
    // Column 1 (Q=0) fails; column 2 (Q=-3) fails; column 4 (Q=-4) fails.
    CHECK(mask_row(m) == std::vector<int>{0, 0, 0, 0, 0, 0, 0});
    const auto m2 = occlusion_mask(row_map({0, 0, 1.5f, nan, 0, 0}));
    // Column 2 has Q=0.5, floor 0; nothing to its right floors to 0.
    CHECK(mask_row(m2) == std::vector<int>{0, 1, 1, 0, 1, 1});
  }

  TEST_CASE("occlusion mask equals the brute-force rule") {
    std::mt19937_64 rng(20);
    std::uniform_int_distribution<int> size(1, 24);
    for (int trial = 0; trial < 200; ++trial) {
      const auto d = random_disparity(size(rng), size(rng), rng);
      CHECK(occlusion_mask(d) == brute_force_occlusion(d));
    }
  }

  TEST_CASE("identity warp") {
    const auto img = test::random_image(12, 5, 21);
    DisparityMap zero(12, 5);
    for (int v = 0; v < 5; ++v)
      for (int u = 0; u < 12; ++u) zero.set(u, v, 0.0f);
    const MaskGrid all(12, 5, std::uint8_t{1});
    const auto w = forward_warp(img, zero, all);
    CHECK(w.warped == img);
    CHECK(w.holes == MaskGrid(12, 5, std::uint8_t{0}));
    CHECK(w.source(7, 2) == 7);
  }

  TEST_CASE("nearer pixel wins a collision") {
    Image img(8, 1);
    for (int u = 0; u < 8; ++u) img.at(u, 0) = static_cast<float>(10 * u);
    DisparityMap d(8, 1);
    d.set(4, 0, 3.0f);  // -> 1
    d.set(6, 0, 5.0f);  // -> 1
    d.set(7, 0, 5.0f);  // -> 2
    d.set(5, 0, 3.0f);  // -> 2, loses to d=5
    const MaskGrid all(8, 1, std::uint8_t{1});
    const auto w = forward_warp(img, d, all);
    CHECK(w.warped(1, 0) == 60.0f);
    CHECK(w.warped(2, 0) == 70.0f);
    CHECK(w.source(2, 0) == 7);
    CHECK(w.holes(0, 0) == 1);
  }

  TEST_CASE("target column rounds half up") {
    Image img(8, 1);
    for (int u = 0; u < 8; ++u) img.at(u, 0) = static_cast<float>(u);
    DisparityMap d(8, 1);
    d.set(3, 0, 1.5f);  // 1.5 -> 2
    d.set(6, 0, 2.5f);  // 3.5 -> 4
    d.set(7, 0, 1.6f);  // 5.4 -> 5
    const auto w = forward_warp(img, d, MaskGrid(8, 1, std::uint8_t{1}));
    CHECK(w.source(2, 0) == 3);
    CHECK(w.source(4, 0) == 6);
    CHECK(w.source(5, 0) == 7);
    CHECK(w.source(3, 0) == -1);
  }

  TEST_CASE("hole filling") {
    const auto warped = test::random_image(6, 4, 22);
    const auto real = test::random_image(6, 4, 23);
    CHECK(fill_holes(warped, MaskGrid(6, 4, std::uint8_t{0}), real) == warped);
    CHECK(fill_holes(warped, MaskGrid(6, 4, std::uint8_t{1}), real) == real);
    MaskGrid half(6, 4, std::uint8_t{0});
    for (int v = 0; v < 4; ++v)
      for (int u = 0; u < 3; ++u) half(u, v) = 1;
    const auto mixed = fill_holes(warped, half, real);
    for (int v = 0; v < 4; ++v)
      for (int u = 0; u < 6; ++u) CHECK(mixed(u, v) == (u < 3 ? real(u, v) : warped(u, v)));
  }

  TEST_CASE("integer tuples reproject exactly onto the fake right view") {
    const int W = 48, H = 16;
    const auto left = test::random_image(W, H, 24);
    const auto right = test::random_image(W, H, 25);
    Image L(W, H);
    std::mt19937_64 rng(26);
    std::uniform_int_distribution<int> level(0, 10);
    for (int v = 0; v < H; ++v)
      for (int u = 0; u < W; ++u) L.at(u, v) = static_cast<float>(level(rng));
    L.at(0, 0) = 0;
    L.at(1, 0) = 10;
    const auto t = synthesize_tuple(left, right, L, 3, 13);
    for (float d : t.disparity.values().data()) CHECK(d == std::floor(d));
    const auto reproj = photometric_reproject(t.left, t.disparity);
    std::size_t compared = 0;
    for (int v = 0; v < H; ++v)
      for (int u = 0; u < W; ++u)
        if (reproj.valid(u, v)) {
          CHECK(reproj.image(u, v) == t.right_fake(u, v));
          ++compared;
        }
    CHECK(compared > 0);
  }

  TEST_CASE("tuple disparity is a monotone remap of the depth map") {
    const auto left = test::random_image(20, 10, 27);
    Image L(20, 10);
    for (int v = 0; v < 10; ++v)
      for (int u = 0; u < 20; ++u) L.at(u, v) = std::sin(0.3f * u) + 0.1f * v;
    const auto t = synthesize_tuple(left, left, L, 2, 9);
    for (int i = 0; i < 200; ++i)
      for (int j = 0; j < 200; j += 7) {
        const float a = L.grid().data()[i], b = L.grid().data()[j];
        const float da = t.disparity.values().data()[i], db = t.disparity.values().data()[j];
        if (a < b) CHECK(da <= db);
      }
  }

  TEST_CASE("manifest defaults and json round trip") {
    const AdaptManifest m;
    CHECK(m.batch_size == 2);
    CHECK(m.max_iterations == 20000);
    CHECK(m.crop_h == 320);
    CHECK(m.crop_w == 512);
    AdaptManifest custom;
    custom.tuple_paths = {"0001", "0000"};
    custom.shuffle_seed = 99;
    const auto back = AdaptManifest::from_json(custom.to_json());
    CHECK(back.tuple_paths == custom.tuple_paths);
    CHECK(back.shuffle_seed == 99u);
    CHECK(back.to_json() == custom.to_json());
    auto doc = custom.to_json();
    doc.erase("crop");
    CHECK_THROWS_AS(AdaptManifest::from_json(doc), Error);
  }

  TEST_CASE("shuffle is a seeded permutation") {
    const auto a = shuffled_order(50, 7);
    CHECK(a == shuffled_order(50, 7));
    CHECK_FALSE(a == shuffled_order(50, 8));
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
    CHECK(shuffled_order(0, 1).empty());
  }

  TEST_CASE("exported tuples re-read losslessly") {
    test::TempDir dir;
    std::vector<TrainingTuple> tuples;
    for (int i = 0; i < 3; ++i) {
      const auto left = test::random_image(24, 12, 30 + i);
      const auto right = test::random_image(24, 12, 40 + i);
      auto L = test::random_image(24, 12, 50 + i);
      tuples.push_back(synthesize_tuple(left, right, L, 1.5, 7.25));
    }
    AdaptManifest settings;
    settings.crop_h = 8;
    settings.crop_w = 16;
    const auto m = export_dataset(tuples, dir.path(), 5, settings);
    CHECK(m.tuple_paths.size() == 3);
    const auto on_disk = AdaptManifest::from_json(io::read_json(dir / "manifest.json"));
    CHECK(on_disk.to_json() == m.to_json());
    for (int i = 0; i < 3; ++i) {
      char stem[8];
      std::snprintf(stem, sizeof stem, "%04d", i);
      const auto t = load_tuple(dir.path(), stem);
      CHECK(t.left == tuples[i].left);
      CHECK(t.right_fake == tuples[i].right_fake);
      CHECK(t.disparity.values() == tuples[i].disparity.values());
      CHECK(t.visible == tuples[i].visible);
    }
    settings.crop_w = 100;
    CHECK_THROWS_AS(export_dataset(tuples, dir / "big", 5, settings), Error);
  }
}
