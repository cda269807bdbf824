#include "wavestereo/scene.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <span>

#include "wavestereo/geometry.hpp"
#include "wavestereo/io.hpp"
#include "wavestereo/parallel.hpp"

namespace wavestereo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBreakingSteepness = 0.142;
constexpr int kBisectionIterations = 30;

// Cylinder texture: foil patches on a painted shell.
constexpr double kFoilCell = 0.008;
constexpr double kFoilFraction = 0.4;

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return mix64(a ^ mix64(b ^ mix64(c)));
}

double unit_interval(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double lattice(std::int64_t i, std::int64_t j, std::uint64_t seed) noexcept {
  return 2.0 * unit_interval(hash3(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j))) - 1.0;
}

double fade(double t) noexcept { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double value_noise(double x, double y, std::uint64_t seed) noexcept {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto i = static_cast<std::int64_t>(fx);
  const auto j = static_cast<std::int64_t>(fy);
  const double sx = fade(x - fx);
  const double sy = fade(y - fy);
  const double a = lattice(i, j, seed) + sx * (lattice(i + 1, j, seed) - lattice(i, j, seed));
  const double b = lattice(i, j + 1, seed) + sx * (lattice(i + 1, j + 1, seed) - lattice(i, j + 1, seed));
  return a + sy * (b - a);
}

// Three octaves, each half the lattice spacing and half the amplitude of the
// previous one; normalized to [-1, 1].
double band_limited_noise(double x, double y, std::uint64_t seed) noexcept {
  double sum = 0.0;
  double amp = 1.0;
  double freq = 1.0;
  for (int octave = 0; octave < 3; ++octave) {
    sum += amp * value_noise(x * freq, y * freq, seed + 0x1000u * static_cast<std::uint64_t>(octave));
    amp *= 0.5;
    freq *= 2.0;
  }
  return sum / 1.75;
}

double gaussian_noise(std::uint64_t seed, std::uint64_t camera, std::uint64_t frame,
                      std::uint64_t pixel) noexcept {
  const std::uint64_t h1 = hash3(seed ^ 0x5eedull, camera * 0x10001ull + frame, pixel);
  const std::uint64_t h2 = mix64(h1 ^ 0xa5a5a5a5a5a5a5a5ull);
  const double u1 = 1.0 - unit_interval(h1);  // (0, 1]
  const double u2 = unit_interval(h2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

struct Hit {
  Eigen::Vector3d point;
  bool on_cylinder = false;
};

class Renderer {
 public:
  Renderer(const SceneSpec& spec, double t) : spec_(spec), wave_(spec), t_(t) {
    bracket_ = std::max(spec.wave.height, 1e-3);
    advect_ = spec.flat ? 0.0 : wave_.phase_speed() * t;
  }

  double eta(double x, double y) const noexcept { return wave_.elevation(x, y, t_); }

  // First intersection of origin + s*dir with the scene.
  Hit cast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) const {
    Hit hit;
    cast_batch(origin, std::span(&dir, 1), std::span(&hit, 1));
    return hit;
  }

  // Casts a batch of rays from one origin. The bisection runs in lockstep
  // across the batch so independent rays overlap in the pipeline.
  void cast_batch(const Eigen::Vector3d& origin, std::span<const Eigen::Vector3d> dirs,
                  std::span<Hit> hits) const {
    const std::size_t n = dirs.size();
    std::vector<double> lo(n), hi(n), f_lo(n), f_hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector3d& dir = dirs[i];
      if (!(dir.z() < 0.0)) fail(Errc::RayMiss, "camera ray does not descend toward the water");
      lo[i] = std::max((bracket_ - origin.z()) / dir.z(), 0.0);
      hi[i] = (-bracket_ - origin.z()) / dir.z();
      const double horiz = std::hypot(dir.x(), dir.y());
      if (-dir.z() <= wave_.max_slope() * horiz) {
        // Grazing ray: the residual may change sign more than once, so
        // locate the first sign change before bisecting.
        const int steps = 256;
        const double h = (hi[i] - lo[i]) / steps;
        double prev = lo[i];
        for (int k = 1; k <= steps; ++k) {
          const double s = lo[i] + h * k;
          if (residual(origin, dir, s) <= 0.0) {
            lo[i] = prev;
            hi[i] = s;
            break;
          }
          prev = s;
        }
      }
      f_lo[i] = residual(origin, dir, lo[i]);
      f_hi[i] = residual(origin, dir, hi[i]);
    }
    for (int it = 0; it < kBisectionIterations; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        const double mid = 0.5 * (lo[i] + hi[i]);
        const double fm = residual(origin, dirs[i], mid);
        if (fm > 0.0) {
          lo[i] = mid;
          f_lo[i] = fm;
        } else {
          hi[i] = mid;
          f_hi[i] = fm;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector3d& dir = dirs[i];
      // Final secant step inside the last bracket.
      const double s_water = f_lo[i] == f_hi[i] ? 0.5 * (lo[i] + hi[i])
                                                : lo[i] + (hi[i] - lo[i]) * f_lo[i] / (f_lo[i] - f_hi[i]);
      if (spec_.cylinder) {
        const double s_cyl = cylinder_entry(origin, dir);
        if (s_cyl > 0.0 && s_cyl < s_water) {
          const Eigen::Vector3d p = origin + s_cyl * dir;
          if (p.z() >= eta(p.x(), p.y())) {
            hits[i] = {p, true};
            continue;
          }
        }
      }
      const Eigen::Vector3d p = origin + s_water * dir;
      if (!spec_.extent.contains(p.x(), p.y()))
        fail(Errc::RayMiss, "surface point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                                ") lies outside the scene extent");
      hits[i] = {p, false};
    }
  }

  double residual(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, double s) const noexcept {
    return origin.z() + s * dir.z() - eta(origin.x() + s * dir.x(), origin.y() + s * dir.y());
  }

  // Smallest positive s where the ray's XY trace enters the cylinder disc; -1 if none.
  double cylinder_entry(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) const {
    const auto& cyl = *spec_.cylinder;
    const Eigen::Vector2d o = origin.head<2>() - cyl.center;
    const Eigen::Vector2d d = dir.head<2>();
    const double a = d.squaredNorm();
    if (a == 0.0) return -1.0;
    const double b = 2.0 * o.dot(d);
    const double c = o.squaredNorm() - cyl.radius * cyl.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return -1.0;
    const double s1 = (-b - std::sqrt(disc)) / (2.0 * a);
    return s1 > 0.0 ? s1 : -1.0;
  }

  // True if the segment from a surface point to `eye` is unobstructed.
  bool visible_from(const Hit& hit, const Eigen::Vector3d& eye) const {
    const Eigen::Vector3d e = eye - hit.point;
    if (spec_.cylinder) {
      const auto& cyl = *spec_.cylinder;
      if (hit.on_cylinder) {
        const Eigen::Vector2d outward = hit.point.head<2>() - cyl.center;
        if (outward.dot(e.head<2>()) <= 0.0) return false;
      } else {
        // Does the segment's XY trace cross the disc?
        const Eigen::Vector2d o = hit.point.head<2>() - cyl.center;
        const Eigen::Vector2d d = e.head<2>();
        const double a = d.squaredNorm();
        if (a > 0.0) {
          const double b = 2.0 * o.dot(d);
          const double c = o.squaredNorm() - cyl.radius * cyl.radius;
          const double disc = b * b - 4.0 * a * c;
          if (disc >= 0.0) {
            const double s1 = (-b - std::sqrt(disc)) / (2.0 * a);
            const double s2 = (-b + std::sqrt(disc)) / (2.0 * a);
            if (s2 > 0.0 && s1 < 1.0) return false;
          }
        }
      }
    }
    if (hit.on_cylinder) return true;
    const double horiz = std::hypot(e.x(), e.y());
    if (e.z() > wave_.max_slope() * horiz) return true;  // climbs faster than any crest
    // March until the segment is above every crest.
    const double len = e.norm();
    const int steps = std::max(8, static_cast<int>(len / 5e-4));
    for (int i = 1; i <= steps; ++i) {
      const double s = static_cast<double>(i) / steps;
      const Eigen::Vector3d q = hit.point + s * e;
      if (q.z() > wave_.amplitude()) break;
      if (q.z() < eta(q.x(), q.y())) return false;
    }
    return true;
  }

  double texture(const Hit& hit) const noexcept {
    const auto& p = hit.point;
    if (hit.on_cylinder) {
      const auto& cyl = *spec_.cylinder;
      const double arc = std::atan2(p.y() - cyl.center.y(), p.x() - cyl.center.x()) * cyl.radius;
      const auto ci = static_cast<std::int64_t>(std::floor(arc / kFoilCell));
      const auto cj = static_cast<std::int64_t>(std::floor(p.z() / kFoilCell));
      const bool foil =
          unit_interval(hash3(spec_.texture_seed ^ 0xf011ull, static_cast<std::uint64_t>(ci),
                              static_cast<std::uint64_t>(cj))) < kFoilFraction;
      const double level = foil ? -0.6 : 0.3;
      return spec_.texture_mean +
             spec_.texture_contrast * (level + 0.3 * value_noise(arc / 0.01, p.z() / 0.01, spec_.texture_seed + 7));
    }
    const double x = (p.x() - advect_) / spec_.texture_scale;
    const double y = p.y() / spec_.texture_scale;
    return spec_.texture_mean + spec_.texture_contrast * band_limited_noise(x, y, spec_.texture_seed);
  }

  float shade(const Hit& hit, std::uint64_t camera, std::size_t pixel) const noexcept {
    double value = texture(hit);
    if (spec_.noise_sigma > 0.0)
      value += spec_.noise_sigma *
               gaussian_noise(spec_.texture_seed, camera, std::bit_cast<std::uint64_t>(t_), pixel);
    return static_cast<float>(value);
  }

  const WaveField& wave() const noexcept { return wave_; }

 private:
  const SceneSpec& spec_;
  WaveField wave_;
  double t_;
  double bracket_;
  double advect_;
};

}  // namespace

// ---------------------------------------------------------------------------

double wavenumber(double period, double depth, double gravity) {
  if (!(period > 0.0) || !(depth > 0.0) || !(gravity > 0.0))
    fail(Errc::NonpositiveParameter, "period, depth and gravity must be > 0");
  const double omega = kTwoPi / period;
  const double target = omega * omega;
  auto residual = [&](double k) { return gravity * k * std::tanh(k * depth) - target; };
  double lo = 0.0;
  double hi = target / gravity;  // deep-water value; finite depth only raises k
  int grow = 0;
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 200 || !std::isfinite(hi))
      fail(Errc::DispersionNoConvergence, "could not bracket the dispersion relation");
  }
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  if (hi - lo > 1e-12 * hi) fail(Errc::DispersionNoConvergence, "dispersion bisection did not converge");
  return 0.5 * (lo + hi);
}

WaveField::WaveField(const SceneSpec& spec)
    : amplitude_(0.5 * spec.wave.height),
      k_(wavestereo::wavenumber(spec.wave.period, spec.water_depth, spec.gravity)),
      omega_(kTwoPi / spec.wave.period),
      phase_(spec.wave.phase),
      flat_(spec.flat) {}

double WaveField::elevation(double x, double /*y*/, double t) const noexcept {
  if (flat_) return 0.0;
  return amplitude_ * std::cos(k_ * x - omega_ * t + phase_);
}

double WaveField::wavelength() const noexcept { return kTwoPi / k_; }

double surface_elevation(double x, double y, double t, const SceneSpec& spec) {
  return WaveField(spec).elevation(x, y, t);
}

void SceneSpec::validate() const {
  if (!(wave.height > 0.0)) fail(Errc::NonpositiveParameter, "wave height must be > 0");
  if (!(wave.period > 0.0)) fail(Errc::NonpositiveParameter, "wave period must be > 0");
  if (!(water_depth > 0.0)) fail(Errc::NonpositiveParameter, "water depth must be > 0");
  if (!(gravity > 0.0)) fail(Errc::NonpositiveParameter, "gravity must be > 0");
  if (!(frame_rate > 0.0)) fail(Errc::NonpositiveParameter, "frame rate must be > 0");
  if (!(texture_scale > 0.0)) fail(Errc::NonpositiveParameter, "texture scale must be > 0");
  if (!(eta_grid_step > 0.0)) fail(Errc::NonpositiveParameter, "eta grid step must be > 0");
  if (!(noise_sigma >= 0.0)) fail(Errc::InvalidValue, "noise sigma must be >= 0");
  if (!(extent.x_max > extent.x_min) || !(extent.y_max > extent.y_min))
    fail(Errc::BadRange, "scene extent is empty");
  if (cylinder && !(cylinder->radius > 0.0)) fail(Errc::NonpositiveParameter, "cylinder radius must be > 0");
  const double lambda = kTwoPi / wavestereo::wavenumber(wave.period, water_depth, gravity);
  if (wave.height / lambda > kBreakingSteepness)
    fail(Errc::InvalidValue, "wave steepness H/lambda exceeds the breaking limit 0.142");
  rig.validate();
}

Extent footprint_extent(const StereoRig& rig, double margin) {
  Extent e{1e300, -1e300, 1e300, -1e300};
  const double us[] = {-0.5, rig.width - 0.5};
  const double vs[] = {-0.5, rig.height - 0.5};
  for (double u : us) {
    for (double v : vs) {
      const Eigen::Vector3d d = rig.R_cw * pixel_ray(u, v, rig);
      if (!(d.z() < 0.0)) fail(Errc::InvalidArgument, "image corner ray does not reach the water plane");
      const Eigen::Vector3d p = rig.t_cw + (-rig.t_cw.z() / d.z()) * d;
      e.x_min = std::min(e.x_min, p.x());
      e.x_max = std::max(e.x_max, p.x());
      e.y_min = std::min(e.y_min, p.y());
      e.y_max = std::max(e.y_max, p.y());
    }
  }
  // The right camera sees a patch shifted by the baseline.
  const Eigen::Vector3d shift = rig.R_cw.col(0) * rig.baseline;
  e.x_min = std::min(e.x_min, e.x_min + shift.x()) - margin;
  e.x_max = std::max(e.x_max, e.x_max + shift.x()) + margin;
  e.y_min = std::min(e.y_min, e.y_min + shift.y()) - margin;
  e.y_max = std::max(e.y_max, e.y_max + shift.y()) + margin;
  return e;
}

Eigen::Vector2d principal_footprint(const StereoRig& rig) {
  const Eigen::Vector3d d = rig.R_cw * Eigen::Vector3d::UnitZ();
  if (!(d.z() < 0.0)) fail(Errc::InvalidArgument, "optical axis does not reach the water plane");
  return (rig.t_cw + (-rig.t_cw.z() / d.z()) * d).head<2>();
}

SceneSpec default_scene() {
  SceneSpec spec;
  spec.rig = flume_rig();
  spec.extent = footprint_extent(spec.rig, 0.1);
  return spec;
}

Eigen::Vector3d surface_point_for_pixel(const SceneSpec& spec, double u, double v, double t) {
  const Renderer r(spec, t);
  return r.cast(spec.rig.left_center_world(), spec.rig.R_cw * pixel_ray(u, v, spec.rig)).point;
}

StereoFrame render_stereo_pair(const SceneSpec& spec, double t, int threads) {
  spec.validate();
  const StereoRig& rig = spec.rig;
  const int W = rig.width;
  const int H = rig.height;
  const Renderer renderer(spec, t);
  const Eigen::Vector3d c_left = rig.left_center_world();
  const Eigen::Vector3d c_right = rig.right_center_world();

  FloatGrid left(W, H), right(W, H), raw(W, H, kInvalidDisparity);
  MaskGrid visible(W, H, 0), on_cyl(W, H, 0);

  parallel_for(0, H, threads, [&](int v) {
    std::vector<Eigen::Vector3d> dirs(static_cast<std::size_t>(W));
    std::vector<Hit> hits_l(dirs.size()), hits_r(dirs.size());
    for (int u = 0; u < W; ++u) dirs[static_cast<std::size_t>(u)] = rig.R_cw * pixel_ray(u, v, rig);
    renderer.cast_batch(c_left, dirs, hits_l);
    renderer.cast_batch(c_right, dirs, hits_r);
    for (int u = 0; u < W; ++u) {
      const Hit& hit = hits_l[static_cast<std::size_t>(u)];
      const std::size_t idx = left.index(u, v);
      left(u, v) = renderer.shade(hit, 0, idx);
      right(u, v) = renderer.shade(hits_r[static_cast<std::size_t>(u)], 1, idx);
      on_cyl(u, v) = hit.on_cylinder ? 1 : 0;

      const Eigen::Vector3d pr = rig.R_cw.transpose() * (hit.point - c_right);
      if (pr.z() > 0.0) {
        const double u_r = rig.u0 + rig.f_px * pr.x() / pr.z();
        raw(u, v) = static_cast<float>(u - u_r);
        const bool in_view = u_r >= -0.5 && u_r < W - 0.5;
        visible(u, v) = in_view && renderer.visible_from(hit, c_right) ? 1 : 0;
      }
    }
  });

  StereoFrame frame{Image(std::move(left)), Image(std::move(right)), {}};
  GroundTruth& gt = frame.truth;
  FloatGrid masked(W, H, kInvalidDisparity);
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (visible.data()[i] && std::isfinite(raw.data()[i]) && raw.data()[i] >= 0.0f)
      masked.data()[i] = raw.data()[i];
    else
      visible.data()[i] = 0;
  }
  gt.disparity = DisparityMap(std::move(masked), visible);
  gt.raw_disparity = std::move(raw);
  gt.visibility = std::move(visible);
  gt.on_cylinder = std::move(on_cyl);

  const Extent& ext = spec.extent;
  const double step = spec.eta_grid_step;
  const int nx = static_cast<int>(std::floor((ext.x_max - ext.x_min) / step)) + 1;
  const int ny = static_cast<int>(std::floor((ext.y_max - ext.y_min) / step)) + 1;
  gt.eta_grid = FloatGrid(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      gt.eta_grid(i, j) = static_cast<float>(renderer.eta(ext.x_min + i * step, ext.y_min + j * step));
  gt.eta_grid_step = step;
  gt.eta_grid_extent = ext;
  return frame;
}

WaveSeries probe_series(const SceneSpec& spec, const Eigen::Vector2d& probe_xy, double t0,
                        int n_frames, const std::string& probe_id) {
  spec.validate();
  if (!spec.extent.contains(probe_xy.x(), probe_xy.y()))
    fail(Errc::ProbeOutsideExtent, "probe lies outside the scene extent");
  if (n_frames < 0) fail(Errc::InvalidArgument, "negative frame count");
  const WaveField wave(spec);
  WaveSeries s;
  s.t0 = t0;
  s.dt = 1.0 / spec.frame_rate;
  s.probe_id = probe_id;
  s.probe_xy = probe_xy;
  s.eta.resize(static_cast<std::size_t>(n_frames));
  for (int i = 0; i < n_frames; ++i)
    s.eta[static_cast<std::size_t>(i)] = wave.elevation(probe_xy.x(), probe_xy.y(), t0 + i / spec.frame_rate);
  return s;
}

// ---------------------------------------------------------------------------

nlohmann::json scene_to_json(const SceneSpec& spec) {
  nlohmann::json doc;
  doc["wave"] = {{"H", spec.wave.height}, {"T", spec.wave.period}, {"phase", spec.wave.phase}};
  doc["water_depth"] = spec.water_depth;
  doc["gravity"] = spec.gravity;
  doc["extent"] = {{"x_min", spec.extent.x_min},
                   {"x_max", spec.extent.x_max},
                   {"y_min", spec.extent.y_min},
                   {"y_max", spec.extent.y_max}};
  doc["texture_seed"] = spec.texture_seed;
  doc["texture_contrast"] = spec.texture_contrast;
  doc["texture_scale"] = spec.texture_scale;
  doc["texture_mean"] = spec.texture_mean;
  doc["noise_sigma"] = spec.noise_sigma;
  if (spec.cylinder)
    doc["cylinder"] = {{"center", {spec.cylinder->center.x(), spec.cylinder->center.y()}},
                       {"radius", spec.cylinder->radius}};
  else
    doc["cylinder"] = nullptr;
  doc["rig"] = io::calibration_to_json(spec.rig);
  doc["frame_rate"] = spec.frame_rate;
  doc["flat"] = spec.flat;
  doc["eta_grid_step"] = spec.eta_grid_step;
  return doc;
}

SceneSpec scene_from_json(const nlohmann::json& doc) {
  SceneSpec spec = default_scene();
  try {
    if (doc.contains("rig")) {
      spec.rig = io::calibration_from_json(doc["rig"]);
      spec.extent = footprint_extent(spec.rig, 0.1);
    }
    if (doc.contains("wave")) {
      const auto& w = doc["wave"];
      spec.wave.height = w.value("H", spec.wave.height);
      spec.wave.period = w.value("T", spec.wave.period);
      spec.wave.phase = w.value("phase", spec.wave.phase);
    }
    spec.water_depth = doc.value("water_depth", spec.water_depth);
    spec.gravity = doc.value("gravity", spec.gravity);
    if (doc.contains("extent")) {
      const auto& e = doc["extent"];
      spec.extent = {e.at("x_min").get<double>(), e.at("x_max").get<double>(),
                     e.at("y_min").get<double>(), e.at("y_max").get<double>()};
    }
    spec.texture_seed = doc.value("texture_seed", spec.texture_seed);
    spec.texture_contrast = doc.value("texture_contrast", spec.texture_contrast);
    spec.texture_scale = doc.value("texture_scale", spec.texture_scale);
    spec.texture_mean = doc.value("texture_mean", spec.texture_mean);
    spec.noise_sigma = doc.value("noise_sigma", spec.noise_sigma);
    if (doc.contains("cylinder") && !doc["cylinder"].is_null()) {
      const auto& c = doc["cylinder"];
      spec.cylinder = Cylinder{{c.at("center").at(0).get<double>(), c.at("center").at(1).get<double>()},
                               c.at("radius").get<double>()};
    }
    spec.frame_rate = doc.value("frame_rate", spec.frame_rate);
    spec.flat = doc.value("flat", spec.flat);
    spec.eta_grid_step = doc.value("eta_grid_step", spec.eta_grid_step);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidValue, std::string("scene JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace wavestereo
