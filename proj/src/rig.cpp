#include "wavestereo/rig.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "wavestereo/error.hpp"

namespace wavestereo {

StereoRig StereoRig::from_metric(double f_m, double pixel_pitch, double baseline, double u0,
                                 double v0, int width, int height, const Eigen::Matrix3d& R_cw,
                                 const Eigen::Vector3d& t_cw) {
  if (!(pixel_pitch > 0.0)) fail(Errc::NonpositiveParameter, "pixel pitch must be > 0");
  StereoRig rig;
  rig.f_m = f_m;
  rig.pixel_pitch = pixel_pitch;
  rig.f_px = f_m / pixel_pitch;
  rig.baseline = baseline;
  rig.u0 = u0;
  rig.v0 = v0;
  rig.width = width;
  rig.height = height;
  rig.R_cw = R_cw;
  rig.t_cw = t_cw;
  rig.validate();
  return rig;
}

void StereoRig::validate() const {
  if (!(baseline > 0.0) || !std::isfinite(baseline))
    fail(Errc::NonpositiveParameter, "baseline must be > 0");
  if (!(f_px > 0.0) || !std::isfinite(f_px)) fail(Errc::NonpositiveParameter, "focal length must be > 0");
  if (!(pixel_pitch > 0.0)) fail(Errc::NonpositiveParameter, "pixel pitch must be > 0");
  if (std::abs(f_px - f_m / pixel_pitch) > 1e-9 * f_px)
    fail(Errc::InvalidValue, "f_px disagrees with f_m / pixel_pitch");
  if (width <= 0 || height <= 0) fail(Errc::NonpositiveParameter, "sensor dimensions must be > 0");
  if (!R_cw.allFinite() || !t_cw.allFinite() || !std::isfinite(u0) || !std::isfinite(v0))
    fail(Errc::InvalidValue, "non-finite rig parameter");
  const double ortho = (R_cw.transpose() * R_cw - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho >= 1e-9) fail(Errc::NonOrthonormalRotation, "rotation is not orthonormal");
  const double det = R_cw.determinant();
  if (det < 0.0) fail(Errc::ReflectionNotAllowed, "rotation has determinant -1");
  if (std::abs(det - 1.0) >= 1e-9) fail(Errc::NonOrthonormalRotation, "rotation determinant is not 1");
}

Eigen::Matrix3d tilted_down_rotation(double tilt_rad) {
  const Eigen::Matrix3d down = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  return down * Eigen::AngleAxisd(tilt_rad, Eigen::Vector3d::UnitX()).toRotationMatrix();
}

StereoRig flume_rig() {
  constexpr double kTiltDeg = 22.8;
  return StereoRig::from_metric(12e-3, 17e-6, 0.06, 319.5, 255.5, 640, 512,
                                tilted_down_rotation(kTiltDeg * std::numbers::pi / 180.0),
                                Eigen::Vector3d(0.0, 0.0, 0.6));
}

}  // namespace wavestereo
