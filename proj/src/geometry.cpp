#include "wavestereo/geometry.hpp"

#include <cmath>

#include "wavestereo/error.hpp"

namespace wavestereo {

double depth_from_disparity(double d, const StereoRig& rig) {
  if (!(d > 0.0) || !std::isfinite(d)) fail(Errc::NonpositiveDisparity, "disparity must be > 0");
  return rig.baseline * rig.f_px / d;
}

double disparity_from_depth(double z, const StereoRig& rig) {
  if (!(z > 0.0) || !std::isfinite(z)) fail(Errc::NonpositiveDepth, "depth must be > 0");
  return rig.baseline * rig.f_px / z;
}

Eigen::Vector3d pixel_to_camera(double u, double v, double z, const StereoRig& rig) {
  if (!(z > 0.0) || !std::isfinite(z)) fail(Errc::NonpositiveDepth, "depth must be > 0");
  return {z * (u - rig.u0) / rig.f_px, z * (v - rig.v0) / rig.f_px, z};
}

Eigen::Vector2d camera_to_pixel(const Eigen::Vector3d& p, const StereoRig& rig) {
  if (!(p.z() > 0.0)) fail(Errc::NonpositiveDepth, "point is behind the camera");
  return {rig.u0 + rig.f_px * p.x() / p.z(), rig.v0 + rig.f_px * p.y() / p.z()};
}

Eigen::Vector3d camera_to_world(const Eigen::Vector3d& p, const StereoRig& rig) {
  return rig.R_cw * p + rig.t_cw;
}

Eigen::Vector3d world_to_camera(const Eigen::Vector3d& p, const StereoRig& rig) {
  return rig.R_cw.transpose() * (p - rig.t_cw);
}

Eigen::Vector3d triangulate(double u, double v, double d, const StereoRig& rig) {
  return pixel_to_camera(u, v, depth_from_disparity(d, rig), rig);
}

}  // namespace wavestereo
