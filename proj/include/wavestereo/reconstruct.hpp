#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "wavestereo/rig.hpp"
#include "wavestereo/types.hpp"

namespace wavestereo {

struct RansacParams {
  double inlier_threshold = 0.002;  // m
  int iterations = 500;
  double min_inlier_fraction = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PlaneFit {
  Plane plane;
  std::vector<std::uint8_t> inliers;  // one flag per cloud point
  std::size_t inlier_count = 0;
  double inlier_rms = 0.0;  // of the refit plane over the consensus set
};

/// One point per valid pixel with d > 0. Pixels with d == 0 lie at infinity
/// and are skipped like masked ones.
PointCloud disparity_to_cloud(const DisparityMap& dmap, const Image& left, const StereoRig& rig, Frame frame);

/// Orthogonal-distance plane through the centroid; normal is the
/// eigenvector of the smallest covariance eigenvalue.
Plane fit_plane_tls(const std::vector<Eigen::Vector3d>& points);

/// Three-point RANSAC (mt19937_64 seeded from params.seed). Ties in inlier
/// count go to the smaller inlier RMS. The result is a TLS refit on the
/// winning consensus set.
PlaneFit ransac_plane(const PointCloud& cloud, const RansacParams& params);

/// Rig whose world frame has Z along the plane normal (toward the camera),
/// its origin at the foot of the camera center on the plane, and X along the
/// camera x-axis projected onto the plane. `plane` is in camera coordinates.
StereoRig world_frame_from_plane(const Plane& plane, const StereoRig& rig);

struct GridSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double cell = 0.005;

  int columns() const;
  int rows() const;
};

struct DeviationMap {
  GridSpec grid;
  FloatGrid cells;  // mean signed distance per cell (m); NaN where empty
  double mean = 0.0;
  double std = 0.0;  // population, over all points
  std::size_t points = 0;

  nlohmann::json summary_json() const;
};

/// Signed distances n.p - c binned by the points' own (X, Y). Points outside
/// the grid still count toward mean/std.
DeviationMap deviation_map(const PointCloud& cloud, const Plane& plane, const GridSpec& grid);

/// Bounding box of the cloud's XY, snapped outward to whole cells.
GridSpec grid_for_cloud(const PointCloud& cloud, double cell);

/// Median Z of world points within `radius` of probe_xy; nullopt if none.
std::optional<double> probe_elevation(const PointCloud& world_cloud, const Eigen::Vector2d& probe_xy,
                                      double radius);

/// Builds a series from per-frame samples. Runs of up to two missing frames
/// are filled linearly between their neighbors; anything longer, or a gap
/// touching either end, throws ProbeStarved.
WaveSeries assemble_probe_series(const std::vector<std::optional<double>>& samples, double frame_rate,
                                 double t0 = 0.0, const Eigen::Vector2d& probe_xy = Eigen::Vector2d::Zero(),
                                 const std::string& probe_id = "stereo");

WaveSeries extract_probe_series(const std::vector<PointCloud>& world_clouds, const Eigen::Vector2d& probe_xy,
                                double radius, double frame_rate, double t0 = 0.0);

struct WaveStats {
  double H_bar = 0.0;
  double T_bar = 0.0;
  int n_waves = 0;
  std::optional<double> r_squared;
};

/// Up-crossing analysis after mean removal. Crossing times are linearly
/// interpolated; a wave's height is max - min of the samples between its two
/// crossings. Throws TooFewCrossings below two up-crossings.
WaveStats zero_crossing_stats(const WaveSeries& series);

/// 1 - SS_res / SS_tot with the probe as reference. Throws ZeroVariance.
double r_squared(const std::vector<double>& stereo, const std::vector<double>& probe);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double mean_bias_percent = 0.0;  // |1 - slope| * 100
};

/// OLS of stereo on probe. Throws DegenerateSpread if the probe samples are constant.
LinearFit linear_fit_bias(const std::vector<double>& stereo, const std::vector<double>& probe);

/// Integer lag maximizing sum_i a[i + lag] * b[i] over the overlap, |lag| <= max_lag.
/// Ties go to the smaller |lag|, then to the negative one.
int best_lag(const std::vector<double>& a, const std::vector<double>& b, int max_lag);

struct AlignedSeries {
  std::vector<double> stereo;
  std::vector<double> probe;
  int lag = 0;
};

/// Overlapping parts of both series after shifting by best_lag.
AlignedSeries align_series(const std::vector<double>& stereo, const std::vector<double>& probe, int max_lag);

struct SeriesComparison {
  WaveStats stereo_stats;
  WaveStats probe_stats;
  LinearFit fit;
  double r_squared = 0.0;
  int lag = 0;

  /// {H_bar, T_bar, n_waves, r_squared, slope, mean_bias_percent, ...}
  nlohmann::json to_json() const;
};

/// Aligns, then computes stats of both series, R^2 and the linear fit. The
/// series must share the same sample interval.
SeriesComparison compare_series(const WaveSeries& stereo, const WaveSeries& probe, int max_lag);

}  // namespace wavestereo
