#include "wavestereo/budget.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "wavestereo/error.hpp"

namespace wavestereo {

Eigen::Vector3d quantization_errors(double z, double u, double v, const StereoRig& rig, double e) {
  if (!(z > 0.0) || !std::isfinite(z)) fail(Errc::NonpositiveDepth, "depth must be > 0");
  if (!(e > 0.0)) fail(Errc::NonpositiveParameter, "positioning error must be > 0");
  const double sqrt2_b = std::numbers::sqrt2 * rig.baseline;
  const double x_m = (u - rig.u0) * rig.pixel_pitch;
  const double y_m = (v - rig.v0) * rig.pixel_pitch;
  const double lateral = z * e / rig.f_px;
  return {std::sqrt(1.0 + std::pow(x_m / sqrt2_b, 2)) * lateral,
          std::sqrt(1.0 + std::pow(y_m / sqrt2_b, 2)) * lateral,
          z * z * e / (sqrt2_b * rig.f_px)};
}

Eigen::Vector3d world_errors(const Eigen::Vector3d& camera_errors, const StereoRig& rig) {
  return (rig.R_cw * camera_errors).cwiseAbs();
}

std::vector<ErrorBudget> budget_table(const StereoRig& rig, double z_min, double z_max, int n_samples, double e) {
  if (!(z_min > 0.0) || !(z_max > z_min) || !std::isfinite(z_max) || n_samples < 2)
    fail(Errc::BadRange, "need 0 < z_min < z_max and at least 2 samples");
  std::vector<ErrorBudget> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    ErrorBudget b;
    b.z = z_min + (z_max - z_min) * i / (n_samples - 1);
    b.e = e;
    const Eigen::Vector3d c = quantization_errors(b.z, rig.u0, rig.v0, rig, e);
    const Eigen::Vector3d w = world_errors(c, rig);
    b.e_x = c.x();
    b.e_y = c.y();
    b.e_z = c.z();
    b.e_xw = w.x();
    b.e_yw = w.y();
    b.e_zw = w.z();
    out.push_back(b);
  }
  return out;
}

std::string budget_csv(const std::vector<ErrorBudget>& table) {
  std::string s = "z,e_x,e_y,e_z,e_xw,e_yw,e_zw\n";
  char line[256];
  for (const auto& b : table) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", b.z, b.e_x, b.e_y, b.e_z,
                  b.e_xw, b.e_yw, b.e_zw);
    s += line;
  }
  return s;
}

nlohmann::json budget_json(const std::vector<ErrorBudget>& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& b : table)
    rows.push_back({{"z", b.z}, {"e", b.e}, {"e_x", b.e_x}, {"e_y", b.e_y}, {"e_z", b.e_z},
                    {"e_xw", b.e_xw}, {"e_yw", b.e_yw}, {"e_zw", b.e_zw}});
  return {{"units", "m"}, {"rows", rows}};
}

}  // namespace wavestereo
