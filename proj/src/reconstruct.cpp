#include "wavestereo/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "wavestereo/geometry.hpp"

namespace wavestereo {

void RansacParams::validate() const {
  if (!(inlier_threshold > 0.0)) fail(Errc::NonpositiveParameter, "inlier threshold must be > 0");
  if (iterations < 1) fail(Errc::NonpositiveParameter, "RANSAC needs at least one iteration");
  if (!(min_inlier_fraction >= 0.0 && min_inlier_fraction <= 1.0))
    fail(Errc::InvalidValue, "min_inlier_fraction must lie in [0, 1]");
}

PointCloud disparity_to_cloud(const DisparityMap& dmap, const Image& left, const StereoRig& rig, Frame frame) {
  if (!left.grid().same_shape(dmap.width(), dmap.height()))
    fail(Errc::DimensionMismatch, "disparity and image differ in size");
  PointCloud cloud;
  cloud.frame = frame;
  cloud.points.reserve(dmap.valid_count());
  cloud.intensity.reserve(dmap.valid_count());
  for (int v = 0; v < dmap.height(); ++v) {
    for (int u = 0; u < dmap.width(); ++u) {
      if (!dmap.valid(u, v) || !(dmap(u, v) > 0.0f)) continue;
      const Eigen::Vector3d p = triangulate(u, v, dmap(u, v), rig);
      cloud.points.push_back(frame == Frame::World ? camera_to_world(p, rig) : p);
      cloud.intensity.push_back(left(u, v));
    }
  }
  return cloud;
}

Plane fit_plane_tls(const std::vector<Eigen::Vector3d>& points) {
  if (points.size() < 3) fail(Errc::TooFewPoints, "a plane needs at least 3 points");
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d q = p - mean;
    cov += q * q.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d n = eig.eigenvectors().col(0);  // eigenvalues ascend
  return Plane(n, n.dot(mean));
}

namespace {

struct Consensus {
  std::size_t count = 0;
  double rms = 0.0;
};

Consensus score(const std::vector<Eigen::Vector3d>& pts, const Plane& plane, double threshold) {
  Consensus c;
  double ss = 0.0;
  for (const auto& p : pts) {
    const double r = plane.signed_distance(p);
    if (std::abs(r) <= threshold) {
      ++c.count;
      ss += r * r;
    }
  }
  c.rms = c.count ? std::sqrt(ss / static_cast<double>(c.count)) : 0.0;
  return c;
}

}  // namespace

PlaneFit ransac_plane(const PointCloud& cloud, const RansacParams& params) {
  params.validate();
  const auto& pts = cloud.points;
  const std::size_t n = pts.size();
  if (n < 3) fail(Errc::TooFewPoints, "RANSAC needs at least 3 points, got " + std::to_string(n));

  std::mt19937_64 rng(params.seed);
  std::optional<Plane> best;
  Consensus best_score;
  for (int it = 0; it < params.iterations; ++it) {
    const std::size_t i = rng() % n;
    const std::size_t j = rng() % n;
    const std::size_t k = rng() % n;
    if (i == j || j == k || i == k) continue;
    const Eigen::Vector3d normal = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
    if (!(normal.norm() > 1e-12)) continue;  // collinear sample
    const Plane candidate(normal, normal.dot(pts[i]));
    const Consensus s = score(pts, candidate, params.inlier_threshold);
    if (!best || s.count > best_score.count || (s.count == best_score.count && s.rms < best_score.rms)) {
      best = candidate;
      best_score = s;
    }
  }
  const double fraction = static_cast<double>(best_score.count) / static_cast<double>(n);
  if (!best || best_score.count < 3 || fraction < params.min_inlier_fraction)
    fail(Errc::ConsensusFailure, "best consensus holds " + std::to_string(best_score.count) + " of " +
                                     std::to_string(n) + " points");

  PlaneFit fit;
  fit.inliers.assign(n, 0);
  std::vector<Eigen::Vector3d> members;
  members.reserve(best_score.count);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(best->signed_distance(pts[i])) <= params.inlier_threshold) {
      fit.inliers[i] = 1;
      members.push_back(pts[i]);
    }
  }
  fit.plane = fit_plane_tls(members);
  fit.inlier_count = members.size();
  double ss = 0.0;
  for (const auto& p : members) ss += std::pow(fit.plane.signed_distance(p), 2);
  fit.inlier_rms = std::sqrt(ss / static_cast<double>(members.size()));
  return fit;
}

StereoRig world_frame_from_plane(const Plane& plane, const StereoRig& rig) {
  Eigen::Vector3d n = plane.n;
  double c = plane.c;
  if (std::abs(n.z()) < 1e-6) fail(Errc::DegenerateOrientation, "plane normal is perpendicular to the optical axis");
  if (std::abs(c) < 1e-12) fail(Errc::DegenerateOrientation, "camera center lies on the plane");
  // The camera sits at the origin; it is on the positive side when c < 0.
  if (c > 0.0) {
    n = -n;
    c = -c;
  }
  const Eigen::Vector3d x_cam = Eigen::Vector3d::UnitX();
  Eigen::Vector3d x_axis = x_cam - x_cam.dot(n) * n;
  if (!(x_axis.norm() > 1e-9)) fail(Errc::DegenerateOrientation, "camera x-axis is normal to the plane");
  x_axis.normalize();
  const Eigen::Vector3d y_axis = n.cross(x_axis);

  Eigen::Matrix3d R;
  R.row(0) = x_axis.transpose();
  R.row(1) = y_axis.transpose();
  R.row(2) = n.transpose();
  const Eigen::Vector3d origin = c * n;

  StereoRig out = rig;
  out.R_cw = R;
  out.t_cw = -R * origin;
  return out;
}

int GridSpec::columns() const { return std::max(1, static_cast<int>(std::ceil((x_max - x_min) / cell - 1e-9))); }
int GridSpec::rows() const { return std::max(1, static_cast<int>(std::ceil((y_max - y_min) / cell - 1e-9))); }

nlohmann::json DeviationMap::summary_json() const {
  return {{"mean", mean},
          {"std", std},
          {"points", points},
          {"grid",
           {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"y_min", grid.y_min}, {"y_max", grid.y_max},
            {"cell", grid.cell}, {"columns", cells.width()}, {"rows", cells.height()}}}};
}

GridSpec grid_for_cloud(const PointCloud& cloud, double cell) {
  if (cloud.empty()) fail(Errc::EmptyCloud, "cloud has no points");
  if (!(cell > 0.0)) fail(Errc::NonpositiveParameter, "grid cell must be > 0");
  double x0 = cloud.points[0].x(), x1 = x0, y0 = cloud.points[0].y(), y1 = y0;
  for (const auto& p : cloud.points) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  GridSpec g;
  g.cell = cell;
  g.x_min = std::floor(x0 / cell) * cell;
  g.y_min = std::floor(y0 / cell) * cell;
  g.x_max = (std::floor(x1 / cell) + 1.0) * cell;
  g.y_max = (std::floor(y1 / cell) + 1.0) * cell;
  return g;
}

DeviationMap deviation_map(const PointCloud& cloud, const Plane& plane, const GridSpec& grid) {
  if (cloud.empty()) fail(Errc::EmptyCloud, "cloud has no points");
  if (!(grid.cell > 0.0) || !(grid.x_max > grid.x_min) || !(grid.y_max > grid.y_min))
    fail(Errc::InvalidArgument, "grid must have positive cell size and extent");
  constexpr double kMaxCells = 1e8;
  if ((grid.x_max - grid.x_min) / grid.cell * ((grid.y_max - grid.y_min) / grid.cell) > kMaxCells)
    fail(Errc::InvalidArgument, "deviation grid exceeds 1e8 cells");
  const int cols = grid.columns();
  const int rows = grid.rows();
  std::vector<double> sum(static_cast<std::size_t>(cols) * rows, 0.0);
  std::vector<std::size_t> count(sum.size(), 0);

  double total = 0.0;
  for (const auto& p : cloud.points) {
    const double r = plane.signed_distance(p);
    total += r;
    const int i = static_cast<int>(std::floor((p.x() - grid.x_min) / grid.cell));
    const int j = static_cast<int>(std::floor((p.y() - grid.y_min) / grid.cell));
    if (i < 0 || j < 0 || i >= cols || j >= rows) continue;
    const std::size_t idx = static_cast<std::size_t>(j) * cols + i;
    sum[idx] += r;
    ++count[idx];
  }
  DeviationMap out;
  out.grid = grid;
  out.points = cloud.size();
  out.mean = total / static_cast<double>(cloud.size());
  double ss = 0.0;
  for (const auto& p : cloud.points) ss += std::pow(plane.signed_distance(p) - out.mean, 2);
  out.std = std::sqrt(ss / static_cast<double>(cloud.size()));
  out.cells = FloatGrid(cols, rows, kInvalidDisparity);
  for (std::size_t idx = 0; idx < sum.size(); ++idx)
    if (count[idx]) out.cells.data()[idx] = static_cast<float>(sum[idx] / static_cast<double>(count[idx]));
  return out;
}

std::optional<double> probe_elevation(const PointCloud& world_cloud, const Eigen::Vector2d& probe_xy, double radius) {
  if (!(radius > 0.0)) fail(Errc::NonpositiveParameter, "probe radius must be > 0");
  std::vector<double> z;
  const double r2 = radius * radius;
  for (const auto& p : world_cloud.points)
    if ((p.head<2>() - probe_xy).squaredNorm() <= r2) z.push_back(p.z());
  if (z.empty()) return std::nullopt;
  const std::size_t mid = z.size() / 2;
  std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(mid), z.end());
  if (z.size() % 2) return z[mid];
  const double upper = z[mid];
  const double lower = *std::max_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

WaveSeries assemble_probe_series(const std::vector<std::optional<double>>& samples, double frame_rate, double t0,
                                 const Eigen::Vector2d& probe_xy, const std::string& probe_id) {
  if (!(frame_rate > 0.0)) fail(Errc::NonpositiveParameter, "frame rate must be > 0");
  constexpr std::size_t kMaxGap = 2;
  WaveSeries s;
  s.t0 = t0;
  s.dt = 1.0 / frame_rate;
  s.probe_id = probe_id;
  s.probe_xy = probe_xy;
  s.eta.resize(samples.size());
  std::size_t i = 0;
  while (i < samples.size()) {
    if (samples[i]) {
      s.eta[i] = *samples[i];
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < samples.size() && !samples[end]) ++end;
    if (i == 0 || end == samples.size() || end - i > kMaxGap)
      fail(Errc::ProbeStarved, "probe has no points in frames " + std::to_string(i) + ".." + std::to_string(end - 1));
    const double a = *samples[i - 1];
    const double b = *samples[end];
    const double span = static_cast<double>(end - (i - 1));
    for (std::size_t k = i; k < end; ++k) s.eta[k] = a + (b - a) * static_cast<double>(k - (i - 1)) / span;
    i = end;
  }
  return s;
}

WaveSeries extract_probe_series(const std::vector<PointCloud>& world_clouds, const Eigen::Vector2d& probe_xy,
                                double radius, double frame_rate, double t0) {
  std::vector<std::optional<double>> samples;
  samples.reserve(world_clouds.size());
  for (const auto& cloud : world_clouds) {
    if (cloud.frame != Frame::World) fail(Errc::InvalidArgument, "probe extraction needs world-frame clouds");
    samples.push_back(probe_elevation(cloud, probe_xy, radius));
  }
  return assemble_probe_series(samples, frame_rate, t0, probe_xy);
}

WaveStats zero_crossing_stats(const WaveSeries& series) {
  series.validate();
  const auto& eta = series.eta;
  const std::size_t n = eta.size();
  if (n < 2) fail(Errc::TooFewCrossings, "series is too short");
  double mean = 0.0;
  for (double e : eta) mean += e;
  mean /= static_cast<double>(n);

  // Up-crossing between samples i-1 and i: y[i-1] < 0 <= y[i].
  std::vector<std::size_t> at;
  std::vector<double> times;
  for (std::size_t i = 1; i < n; ++i) {
    const double a = eta[i - 1] - mean;
    const double b = eta[i] - mean;
    if (a < 0.0 && b >= 0.0) {
      at.push_back(i);
      times.push_back(series.time(i - 1) + series.dt * (-a / (b - a)));
    }
  }
  if (at.size() < 2)
    fail(Errc::TooFewCrossings, "found " + std::to_string(at.size()) + " up-crossing(s), need 2");

  WaveStats st;
  st.n_waves = static_cast<int>(at.size() - 1);
  double h_sum = 0.0;
  double t_sum = 0.0;
  for (std::size_t w = 0; w + 1 < at.size(); ++w) {
    const auto first = eta.begin() + static_cast<std::ptrdiff_t>(at[w]);
    const auto last = eta.begin() + static_cast<std::ptrdiff_t>(at[w + 1]);  // exclusive
    const auto [lo, hi] = std::minmax_element(first, last);
    h_sum += *hi - *lo;
    t_sum += times[w + 1] - times[w];
  }
  st.H_bar = h_sum / st.n_waves;
  st.T_bar = t_sum / st.n_waves;
  return st;
}

double r_squared(const std::vector<double>& stereo, const std::vector<double>& probe) {
  if (stereo.size() != probe.size()) fail(Errc::DimensionMismatch, "series lengths differ");
  if (probe.size() < 2) fail(Errc::TooFewPoints, "R^2 needs at least 2 samples");
  double mean = 0.0;
  for (double p : probe) mean += p;
  mean /= static_cast<double>(probe.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    ss_res += std::pow(probe[i] - stereo[i], 2);
    ss_tot += std::pow(probe[i] - mean, 2);
  }
  if (!(ss_tot > 0.0)) fail(Errc::ZeroVariance, "reference series is constant");
  return 1.0 - ss_res / ss_tot;
}

LinearFit linear_fit_bias(const std::vector<double>& stereo, const std::vector<double>& probe) {
  if (stereo.size() != probe.size()) fail(Errc::DimensionMismatch, "sample counts differ");
  if (probe.size() < 2) fail(Errc::TooFewPoints, "a linear fit needs at least 2 samples");
  const double n = static_cast<double>(probe.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    mx += probe[i];
    my += stereo[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    sxx += (probe[i] - mx) * (probe[i] - mx);
    sxy += (probe[i] - mx) * (stereo[i] - my);
  }
  if (!(sxx > 0.0)) fail(Errc::DegenerateSpread, "probe samples have no spread");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.mean_bias_percent = std::abs(1.0 - f.slope) * 100.0;
  return f;
}

int best_lag(const std::vector<double>& a, const std::vector<double>& b, int max_lag) {
  if (max_lag < 0) fail(Errc::InvalidArgument, "max_lag must be >= 0");
  const auto na = static_cast<long>(a.size());
  const auto nb = static_cast<long>(b.size());
  int best = 0;
  double best_sum = -std::numeric_limits<double>::infinity();
  // Visit 0, -1, +1, -2, +2, ... so strict improvement implements the tie rule.
  for (int step = 0; step <= 2 * max_lag; ++step) {
    const int lag = step % 2 ? -(step + 1) / 2 : step / 2;
    double sum = 0.0;
    for (long i = std::max(0L, -static_cast<long>(lag)); i < nb && i + lag < na; ++i) sum += a[i + lag] * b[i];
    if (sum > best_sum) {
      best_sum = sum;
      best = lag;
    }
  }
  return best;
}

AlignedSeries align_series(const std::vector<double>& stereo, const std::vector<double>& probe, int max_lag) {
  auto centered = [](const std::vector<double>& x) {
    double m = 0.0;
    for (double e : x) m += e;
    m /= static_cast<double>(std::max<std::size_t>(x.size(), 1));
    std::vector<double> out(x);
    for (double& e : out) e -= m;
    return out;
  };
  AlignedSeries out;
  out.lag = best_lag(centered(stereo), centered(probe), max_lag);
  const auto ns = static_cast<long>(stereo.size());
  const auto np = static_cast<long>(probe.size());
  for (long i = std::max(0L, -static_cast<long>(out.lag)); i < np && i + out.lag < ns; ++i) {
    out.stereo.push_back(stereo[static_cast<std::size_t>(i + out.lag)]);
    out.probe.push_back(probe[static_cast<std::size_t>(i)]);
  }
  return out;
}

nlohmann::json SeriesComparison::to_json() const {
  return {{"H_bar", stereo_stats.H_bar},
          {"T_bar", stereo_stats.T_bar},
          {"n_waves", stereo_stats.n_waves},
          {"r_squared", r_squared},
          {"slope", fit.slope},
          {"intercept", fit.intercept},
          {"mean_bias_percent", fit.mean_bias_percent},
          {"lag_samples", lag},
          {"reference", {{"H_bar", probe_stats.H_bar}, {"T_bar", probe_stats.T_bar}, {"n_waves", probe_stats.n_waves}}}};
}

SeriesComparison compare_series(const WaveSeries& stereo, const WaveSeries& probe, int max_lag) {
  if (std::abs(stereo.dt - probe.dt) > 1e-9 * std::max(stereo.dt, probe.dt))
    fail(Errc::InvalidArgument, "series have different sample intervals");
  SeriesComparison c;
  const AlignedSeries al = align_series(stereo.eta, probe.eta, max_lag);
  c.lag = al.lag;
  c.r_squared = wavestereo::r_squared(al.stereo, al.probe);
  c.fit = linear_fit_bias(al.stereo, al.probe);
  c.stereo_stats = zero_crossing_stats(stereo);
  c.stereo_stats.r_squared = c.r_squared;
  c.probe_stats = zero_crossing_stats(probe);
  return c;
}

}  // namespace wavestereo
