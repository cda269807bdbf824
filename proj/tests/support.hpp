#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "wavestereo/scene.hpp"
#include "wavestereo/types.hpp"

namespace test {

namespace fs = std::filesystem;

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("wavestereo_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline wavestereo::Image random_image(int w, int h, std::uint64_t seed, int levels = 256) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, levels - 1);
  wavestereo::Image img(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) img.at(u, v) = static_cast<float>(dist(rng));
  return img;
}

// Smooth band-limited texture: random values on a coarse lattice, bilinear in between.
inline wavestereo::Image smooth_texture(int w, int h, std::uint64_t seed, int cell = 4) {
  const int gw = w / cell + 2;
  const int gh = h / cell + 2;
  wavestereo::Image lattice = random_image(gw, gh, seed);
  wavestereo::Image img(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const double x = static_cast<double>(u) / cell;
      const double y = static_cast<double>(v) / cell;
      const int i = static_cast<int>(x);
      const int j = static_cast<int>(y);
      const double fx = x - i;
      const double fy = y - j;
      const double top = (1 - fx) * lattice(i, j) + fx * lattice(i + 1, j);
      const double bot = (1 - fx) * lattice(i, j + 1) + fx * lattice(i + 1, j + 1);
      img.at(u, v) = static_cast<float>((1 - fy) * top + fy * bot);
    }
  return img;
}

// Quarter-resolution flume rig: same field of view, 16x fewer rays.
inline wavestereo::SceneSpec small_scene() {
  wavestereo::SceneSpec spec = wavestereo::default_scene();
  const auto& full = spec.rig;
  spec.rig = wavestereo::StereoRig::from_metric(full.f_m, full.pixel_pitch * 4, full.baseline, 79.5, 63.5, 160,
                                                128, full.R_cw, full.t_cw);
  spec.extent = wavestereo::footprint_extent(spec.rig, 0.1);
  return spec;
}

}  // namespace test
