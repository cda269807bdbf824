#pragma once

#include <Eigen/Core>

#include "wavestereo/rig.hpp"

namespace wavestereo {

// Rectified-frame triangulation. Pixel units for image coordinates, meters
// for everything in 3D. Sensor-metric image coordinates, where needed, are
// x' = (u - u0) * pixel_pitch.

/// z = B * f_px / d. Throws NonpositiveDisparity for d <= 0 or non-finite d.
double depth_from_disparity(double d, const StereoRig& rig);

/// d = B * f_px / z. Throws NonpositiveDepth for z <= 0 or non-finite z.
double disparity_from_depth(double z, const StereoRig& rig);

/// Back-projects pixel (u, v) at depth z into the left camera frame.
Eigen::Vector3d pixel_to_camera(double u, double v, double z, const StereoRig& rig);

/// Projects a camera-frame point onto the left image. Requires p.z() > 0.
Eigen::Vector2d camera_to_pixel(const Eigen::Vector3d& p, const StereoRig& rig);

Eigen::Vector3d camera_to_world(const Eigen::Vector3d& p, const StereoRig& rig);
Eigen::Vector3d world_to_camera(const Eigen::Vector3d& p, const StereoRig& rig);

/// Left pixel (u, v) with disparity d lands at (u - d, v) in the right image.
inline Eigen::Vector2d reproject_left_to_right(double u, double v, double d) {
  return {u - d, v};
}

/// Left-camera-frame point seen at (u, v) with disparity d. Combines the two
/// operations above.
Eigen::Vector3d triangulate(double u, double v, double d, const StereoRig& rig);

/// Unit-free ray direction (z component 1) through pixel (u, v), camera frame.
inline Eigen::Vector3d pixel_ray(double u, double v, const StereoRig& rig) {
  return {(u - rig.u0) / rig.f_px, (v - rig.v0) / rig.f_px, 1.0};
}

}  // namespace wavestereo
