#pragma once

#include <Eigen/Core>

namespace wavestereo {

/// Rectified pinhole pair. The right camera shares the left camera's
/// orientation and intrinsics and sits `baseline` meters along the left
/// camera's +x axis. The pose (R_cw, t_cw) maps left-camera coordinates into
/// the world frame: p_w = R_cw * p_c + t_cw.
struct StereoRig {
  double f_px = 0.0;
  double f_m = 0.0;
  double pixel_pitch = 0.0;  // meters per pixel
  double baseline = 0.0;     // meters
  double u0 = 0.0;
  double v0 = 0.0;
  int width = 0;
  int height = 0;
  Eigen::Matrix3d R_cw = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t_cw = Eigen::Vector3d::Zero();

  /// Builds a rig from metric intrinsics; f_px is derived as f_m / pixel_pitch.
  static StereoRig from_metric(double f_m, double pixel_pitch, double baseline, double u0,
                               double v0, int width, int height,
                               const Eigen::Matrix3d& R_cw = Eigen::Matrix3d::Identity(),
                               const Eigen::Vector3d& t_cw = Eigen::Vector3d::Zero());

  /// Throws wavestereo::Error when an invariant fails: focal/pitch
  /// consistency, positive baseline and focal, proper orthonormal rotation.
  void validate() const;

  Eigen::Vector3d left_center_world() const { return t_cw; }
  Eigen::Vector3d right_center_world() const { return t_cw + R_cw.col(0) * baseline; }
};

/// 12 mm lens, 17 um pitch, 640x512 sensor (f_px = 705.88), 6 cm baseline,
/// mounted 0.6 m above the still-water plane Z = 0 and tilted 22.8 degrees
/// from the vertical toward +Y. The baseline runs along world +X.
StereoRig flume_rig();

/// Rotation taking a downward-looking camera (optical axis along world -Z,
/// image x along world +X) and tilting its optical axis toward +Y by `tilt_rad`.
Eigen::Matrix3d tilted_down_rotation(double tilt_rad);

}  // namespace wavestereo
