#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "wavestereo/rig.hpp"

namespace wavestereo {

// Image-quantization error propagation. A positioning error of e px at
// matching time gives a disparity error of e / sqrt(2).

struct ErrorBudget {
  double z = 0.0;  // m
  double e = 1.0;  // px
  double e_x = 0.0;
  double e_y = 0.0;
  double e_z = 0.0;
  double e_xw = 0.0;
  double e_yw = 0.0;
  double e_zw = 0.0;
};

/// Camera-frame errors (m) at depth z for pixel (u, v). Sensor-metric image
/// coordinates x' = (u - u0) * pixel_pitch enter as x' / (sqrt(2) B).
/// Throws NonpositiveDepth for z <= 0 and NonpositiveParameter for e <= 0.
Eigen::Vector3d quantization_errors(double z, double u, double v, const StereoRig& rig, double e = 1.0);

/// |R_cw * (e_x, e_y, e_z)| componentwise.
Eigen::Vector3d world_errors(const Eigen::Vector3d& camera_errors, const StereoRig& rig);

/// n_samples depths spaced uniformly over [z_min, z_max] at the principal
/// point. Throws BadRange unless 0 < z_min < z_max and n_samples >= 2.
std::vector<ErrorBudget> budget_table(const StereoRig& rig, double z_min, double z_max, int n_samples,
                                      double e = 1.0);

/// Header z,e_x,e_y,e_z,e_xw,e_yw,e_zw; values in meters.
std::string budget_csv(const std::vector<ErrorBudget>& table);
nlohmann::json budget_json(const std::vector<ErrorBudget>& table);

}  // namespace wavestereo
