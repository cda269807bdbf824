#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "wavestereo/rig.hpp"
#include "wavestereo/types.hpp"

namespace wavestereo {

// Synthetic thermal wave flume: a linear regular wave on finite depth,
// viewed by a rectified stereo rig, textured with advecting value noise.
// Everything here is deterministic given (SceneSpec, t).

struct WaveParams {
  double height = 0.0528;  // crest-to-trough, m
  double period = 0.632;   // s
  double phase = 0.0;      // rad
};

struct Cylinder {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.05;
};

/// Axis-aligned world XY rectangle (m).
struct Extent {
  double x_min = -0.5;
  double x_max = 0.5;
  double y_min = -0.2;
  double y_max = 0.8;

  bool contains(double x, double y) const noexcept {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct SceneSpec {
  WaveParams wave;
  double water_depth = 0.9;
  double gravity = 9.80665;
  Extent extent;
  std::uint64_t texture_seed = 1;
  double texture_contrast = 40.0;   // intensity units
  double texture_scale = 0.02;      // value-noise lattice spacing on the water, m
  double texture_mean = 128.0;
  double noise_sigma = 0.5;         // additive Gaussian, intensity units
  std::optional<Cylinder> cylinder;
  StereoRig rig;
  double frame_rate = 50.0;
  /// Renders still water (eta == 0) regardless of the wave parameters.
  bool flat = false;
  double eta_grid_step = 0.005;     // m

  /// Throws on nonpositive parameters, steepness above the breaking limit,
  /// or an invalid rig.
  void validate() const;
};

/// Regular-wave case T = 0.632 s, H = 5.28 cm on 0.9 m depth, flume rig, extent
/// covering the camera footprint.
SceneSpec default_scene();

/// Bounding box of the rig's image-corner rays on Z = 0, grown by `margin`.
Extent footprint_extent(const StereoRig& rig, double margin);

/// Solves w^2 = g k tanh(k h) for k by bisection (relative width 1e-15).
/// Throws DispersionNoConvergence if no bracket is found.
double wavenumber(double period, double depth, double gravity);

/// Precomputed linear wave kinematics for one SceneSpec.
class WaveField {
 public:
  explicit WaveField(const SceneSpec& spec);

  double elevation(double x, double y, double t) const noexcept;
  /// Upper bound on |grad eta| over space and time.
  double max_slope() const noexcept { return flat_ ? 0.0 : amplitude_ * k_; }
  double amplitude() const noexcept { return flat_ ? 0.0 : amplitude_; }
  double wavenumber() const noexcept { return k_; }
  double wavelength() const noexcept;
  double omega() const noexcept { return omega_; }
  double phase_speed() const noexcept { return omega_ / k_; }

 private:
  double amplitude_;
  double k_;
  double omega_;
  double phase_;
  bool flat_;
};

/// eta = (H/2) cos(k x - w t + phase); zero for flat scenes.
double surface_elevation(double x, double y, double t, const SceneSpec& spec);

struct GroundTruth {
  /// Left-referenced disparity; masked where the surface point is not seen
  /// by the right camera.
  DisparityMap disparity;
  /// u_left - u_right of every left pixel's surface point, occluded or not.
  FloatGrid raw_disparity;
  /// eta sampled on a regular XY grid: cell (i, j) is at
  /// (extent.x_min + i*step, extent.y_min + j*step).
  FloatGrid eta_grid;
  double eta_grid_step = 0.0;
  Extent eta_grid_extent;
  /// 1 where the left pixel's surface point is visible from the right camera.
  MaskGrid visibility;
  /// 1 where the left pixel sees the cylinder rather than water.
  MaskGrid on_cylinder;
};

struct StereoFrame {
  Image left;
  Image right;
  GroundTruth truth;
};

/// Ray-casts both cameras against the wave surface (and cylinder). Throws
/// RayMiss if a pixel's surface point falls outside the extent.
StereoFrame render_stereo_pair(const SceneSpec& spec, double t, int threads = 1);

/// World point seen by left pixel (u, v) at time t.
Eigen::Vector3d surface_point_for_pixel(const SceneSpec& spec, double u, double v, double t);

/// Analytic probe: eta at probe_xy sampled at t0 + i / frame_rate.
WaveSeries probe_series(const SceneSpec& spec, const Eigen::Vector2d& probe_xy, double t0,
                        int n_frames, const std::string& probe_id = "probe");

/// World XY of the still-water point seen at the principal point.
Eigen::Vector2d principal_footprint(const StereoRig& rig);

nlohmann::json scene_to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const nlohmann::json& doc);

}  // namespace wavestereo
