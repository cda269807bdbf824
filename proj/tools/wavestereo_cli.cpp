// Command-line front end: one subcommand per pipeline stage.
//
// Exit status: 0 success, 1 computation error, 2 usage or input error. Errors
// are reported on stderr as a single JSON object.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wavestereo/adapt.hpp"
#include "wavestereo/budget.hpp"
#include "wavestereo/error.hpp"
#include "wavestereo/io.hpp"
#include "wavestereo/matcher.hpp"
#include "wavestereo/metrics.hpp"
#include "wavestereo/parallel.hpp"
#include "wavestereo/reconstruct.hpp"
#include "wavestereo/rig.hpp"
#include "wavestereo/scene.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavestereo;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string frame_name(const std::string& prefix, std::size_t i, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return prefix + "_" + buf + ext;
}

using IndexedFiles = std::vector<std::pair<std::string, fs::path>>;

// Files in `dir` named <prefix>_<digits><ext>, sorted by index.
IndexedFiles find_indexed(const fs::path& dir, const std::string& prefix, const std::string& ext) {
  if (!fs::is_directory(dir)) fail(Errc::FileNotFound, dir.string());
  const std::regex pattern(prefix + "_([0-9]+)" + std::regex_replace(ext, std::regex(R"(\.)"), R"(\.)"));
  IndexedFiles out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) out.emplace_back(m[1].str(), entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

IndexedFiles indexed_files(const fs::path& dir, const std::string& prefix, const std::string& ext) {
  IndexedFiles out = find_indexed(dir, prefix, ext);
  if (out.empty()) fail(Errc::FileNotFound, (dir / (prefix + "_*" + ext)).string());
  return out;
}

Image read_image(const fs::path& path) {
  if (path.extension() == ".pfm") return Image(io::read_pfm(path));
  return io::read_pgm(path);
}

void write_image(const Image& image, const fs::path& path) {
  if (path.extension() == ".pfm")
    io::write_pfm(image.grid(), path);
  else
    io::write_pgm(image, path);
}

Eigen::Vector2d parse_xy(const std::vector<double>& xy) {
  if (xy.size() != 2) fail(Errc::InvalidArgument, "expected two coordinates");
  return {xy[0], xy[1]};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// Every run leaves <dir>/<command>_config.json behind.
void echo_config(const fs::path& dir, const std::string& command, const json& options) {
  ensure_dir(dir);
  io::write_json({{"command", command}, {"version", kVersion}, {"options", options}, {"created", timestamp()}},
                 dir / (command + "_config.json"));
}

fs::path parent_or_dot(const fs::path& p) { return p.has_parent_path() ? p.parent_path() : fs::path("."); }

bool is_input_error(Errc code) {
  switch (code) {
    case Errc::FileNotFound:
    case Errc::MalformedHeader:
    case Errc::DimensionOverflow:
    case Errc::TruncatedPayload:
    case Errc::UnsupportedChannels:
    case Errc::UnsupportedFormat:
    case Errc::MissingKey:
    case Errc::NonOrthonormalRotation:
    case Errc::ReflectionNotAllowed:
    case Errc::NonpositiveParameter:
    case Errc::InvalidValue:
    case Errc::InvalidArgument:
    case Errc::DimensionMismatch:
    case Errc::BadRange:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------

struct SynthOptions {
  std::string scene;
  std::string out;
  int frames = 1;
  double t0 = 0.0;
  bool flat = false;
  std::optional<double> period;
  std::optional<double> height;
  std::vector<double> probe;
  std::string image_format = "pgm";
};

void run_synth(const SynthOptions& o, int threads) {
  SceneSpec spec = o.scene.empty() ? default_scene() : scene_from_json(io::read_json(o.scene));
  if (o.flat) spec.flat = true;
  if (o.period) spec.wave.period = *o.period;
  if (o.height) spec.wave.height = *o.height;
  spec.validate();
  if (o.frames < 1) fail(Errc::InvalidArgument, "--frames must be >= 1");
  const Eigen::Vector2d probe = o.probe.empty() ? principal_footprint(spec.rig) : parse_xy(o.probe);
  const fs::path out = o.out;
  ensure_dir(out);
  const std::string ext = "." + o.image_format;

  parallel_for(0, o.frames, threads, [&](int i) {
    const double t = o.t0 + i / spec.frame_rate;
    const StereoFrame f = render_stereo_pair(spec, t);
    const auto idx = static_cast<std::size_t>(i);
    write_image(f.left, out / frame_name("left", idx, ext));
    write_image(f.right, out / frame_name("right", idx, ext));
    io::write_pfm(f.truth.disparity, out / frame_name("gt_disp", idx, ".pfm"));
    io::write_mask_pgm(f.truth.visibility, out / frame_name("gt_occ", idx, ".pgm"));
  });
  io::write_series_csv(probe_series(spec, probe, o.t0, o.frames), out / "probe.csv");
  io::write_calibration(spec.rig, out / "calib.json");
  json manifest = scene_to_json(spec);
  manifest["frames"] = o.frames;
  manifest["t0"] = o.t0;
  manifest["probe_xy"] = {probe.x(), probe.y()};
  io::write_json(manifest, out / "scene.json");
  echo_config(out, "synth",
              {{"scene", o.scene}, {"frames", o.frames}, {"t0", o.t0}, {"flat", spec.flat},
               {"probe", {probe.x(), probe.y()}}, {"image_format", o.image_format}, {"threads", threads}});
}

// ---------------------------------------------------------------------------

struct MatchOptions {
  std::string left, right, out;
  std::string dir, out_dir;
  MatchParams params;
};

json match_params_json(const MatchParams& p) {
  return {{"d_min", p.d_min},           {"d_max", p.d_max},       {"census_window", p.census_window},
          {"P1", p.P1},                 {"P2", p.P2},             {"paths", p.paths},
          {"lr_threshold", p.lr_threshold}, {"subpixel", p.subpixel}, {"refine_window", p.refine_window}};
}

void run_match(MatchOptions o, int threads) {
  o.params.validate();
  if (!o.dir.empty()) {
    if (o.out_dir.empty()) fail(Errc::InvalidArgument, "--dir needs --out-dir");
    auto lefts = find_indexed(o.dir, "left", ".pgm");
    if (lefts.empty()) lefts = indexed_files(o.dir, "left", ".pfm");
    const std::string ext = lefts.front().second.extension().string();
    ensure_dir(o.out_dir);
    parallel_for(0, static_cast<int>(lefts.size()), threads, [&](int i) {
      const auto& [index, left_path] = lefts[static_cast<std::size_t>(i)];
      const fs::path right_path = fs::path(o.dir) / ("right_" + index + ext);
      const DisparityMap d = match_stereo(read_image(left_path), read_image(right_path), o.params);
      io::write_pfm(d, fs::path(o.out_dir) / ("disp_" + index + ".pfm"));
    });
    echo_config(o.out_dir, "match", {{"dir", o.dir}, {"params", match_params_json(o.params)}, {"threads", threads}});
    return;
  }
  if (o.left.empty() || o.right.empty() || o.out.empty())
    fail(Errc::InvalidArgument, "need --left, --right and --out (or --dir and --out-dir)");
  o.params.threads = threads;
  const DisparityMap d = match_stereo(read_image(o.left), read_image(o.right), o.params);
  io::write_pfm(d, o.out);
  o.params.threads = 1;
  echo_config(parent_or_dot(o.out), "match",
              {{"left", o.left}, {"right", o.right}, {"out", o.out}, {"params", match_params_json(o.params)},
               {"threads", threads}});
}

// ---------------------------------------------------------------------------

struct AdaptOptions {
  std::string images, depth, out;
  double d_min = 0.0;
  double d_max = 64.0;
  std::uint64_t seed = 0;
  bool constant_fill = false;
  AdaptManifest manifest;
  std::vector<int> crop;
};

void run_adapt(AdaptOptions o, int threads) {
  if (!o.crop.empty()) {
    if (o.crop.size() != 2) fail(Errc::InvalidArgument, "--crop takes height and width");
    o.manifest.crop_h = o.crop[0];
    o.manifest.crop_w = o.crop[1];
  }
  if (o.manifest.batch_size < 1 || o.manifest.max_iterations < 1)
    fail(Errc::NonpositiveParameter, "batch size and iterations must be >= 1");
  auto lefts = indexed_files(o.images, "left", ".pgm");
  std::vector<TrainingTuple> tuples(lefts.size());
  parallel_for(0, static_cast<int>(lefts.size()), threads, [&](int i) {
    const auto& [index, left_path] = lefts[static_cast<std::size_t>(i)];
    const Image left = read_image(left_path);
    const Image right = read_image(fs::path(o.images) / ("right_" + index + ".pgm"));
    const Image depth(io::read_pfm(fs::path(o.depth) / ("depth_" + index + ".pfm")));
    tuples[static_cast<std::size_t>(i)] = synthesize_tuple(left, right, depth, o.d_min, o.d_max, o.constant_fill);
  });
  export_dataset(tuples, o.out, o.seed, o.manifest);
  echo_config(o.out, "adapt",
              {{"images", o.images}, {"depth", o.depth}, {"d_min", o.d_min}, {"d_max", o.d_max}, {"seed", o.seed},
               {"constant_fill", o.constant_fill}, {"threads", threads}});
}

// ---------------------------------------------------------------------------

struct ReconstructOptions {
  std::string disp_dir, images, calib, out;
  std::string plane_from;
  std::string world = "plane";
  std::string ply = "binary";
  double grid_cell = 0.005;
  RansacParams ransac;
};

void run_reconstruct(const ReconstructOptions& o, int threads) {
  if (o.world != "plane" && o.world != "calib") fail(Errc::InvalidArgument, "--world must be plane or calib");
  if (o.ply != "binary" && o.ply != "ascii") fail(Errc::InvalidArgument, "--ply must be binary or ascii");
  const StereoRig calib = io::read_calibration(o.calib);
  const auto disps = indexed_files(o.disp_dir, "disp", ".pfm");
  const fs::path out = o.out;
  ensure_dir(out);

  auto intensity_for = [&](const std::string& index, int w, int h) {
    if (!o.images.empty()) {
      for (const char* ext : {".pgm", ".pfm"}) {
        const fs::path p = fs::path(o.images) / ("left_" + index + ext);
        if (fs::exists(p)) return read_image(p);
      }
    }
    return Image(w, h, 0.0f);
  };

  StereoRig rig = calib;
  json report;
  if (o.world == "plane") {
    StereoRig camera = calib;
    camera.R_cw.setIdentity();
    camera.t_cw.setZero();
    const fs::path ref = o.plane_from.empty() ? disps.front().second : fs::path(o.plane_from);
    const DisparityMap d = io::read_disparity_pfm(ref);
    const PointCloud cloud = disparity_to_cloud(d, Image(d.width(), d.height(), 0.0f), camera, Frame::Camera);
    const PlaneFit fit = ransac_plane(cloud, o.ransac);
    rig = world_frame_from_plane(fit.plane, calib);
    PointCloud inliers;
    for (std::size_t i = 0; i < cloud.size(); ++i)
      if (fit.inliers[i]) inliers.points.push_back(cloud.points[i]);
    const DeviationMap dev = deviation_map(cloud, fit.plane, grid_for_cloud(inliers, o.grid_cell));
    io::write_pfm(dev.cells, out / "deviation.pfm");
    report["plane"] = {{"normal", {fit.plane.n.x(), fit.plane.n.y(), fit.plane.n.z()}},
                       {"offset", fit.plane.c},
                       {"frame", "camera"},
                       {"inliers", fit.inlier_count},
                       {"points", cloud.size()},
                       {"inlier_rms", fit.inlier_rms},
                       {"source", ref.string()}};
    report["deviation"] = dev.summary_json();
  }
  io::write_calibration(rig, out / "world_calib.json");

  const auto format = o.ply == "ascii" ? io::PlyFormat::Ascii : io::PlyFormat::BinaryLittleEndian;
  std::vector<std::size_t> counts(disps.size());
  parallel_for(0, static_cast<int>(disps.size()), threads, [&](int i) {
    const auto& [index, path] = disps[static_cast<std::size_t>(i)];
    const DisparityMap d = io::read_disparity_pfm(path);
    const PointCloud cloud = disparity_to_cloud(d, intensity_for(index, d.width(), d.height()), rig, Frame::World);
    io::write_ply(cloud, out / ("cloud_" + index + ".ply"), format);
    counts[static_cast<std::size_t>(i)] = cloud.size();
  });
  report["frames"] = disps.size();
  report["points_per_frame"] = counts;
  report["world_from"] = o.world;
  io::write_json(report, out / "reconstruct_report.json");
  echo_config(out, "reconstruct",
              {{"disp_dir", o.disp_dir}, {"images", o.images}, {"calib", o.calib}, {"plane_from", o.plane_from},
               {"world", o.world}, {"grid_cell", o.grid_cell},
               {"ransac",
                {{"inlier_threshold", o.ransac.inlier_threshold}, {"iterations", o.ransac.iterations},
                 {"min_inlier_fraction", o.ransac.min_inlier_fraction}, {"seed", o.ransac.seed}}},
               {"threads", threads}});
}

// ---------------------------------------------------------------------------

struct SeriesOptions {
  std::string cloud_dir, out, reference;
  std::vector<double> probe;
  double radius = 0.005;
  double rate = 50.0;
  double t0 = 0.0;
  int max_lag = 10;
};

void run_series(const SeriesOptions& o, int threads) {
  const Eigen::Vector2d probe = parse_xy(o.probe);
  const auto clouds = indexed_files(o.cloud_dir, "cloud", ".ply");
  std::vector<std::optional<double>> samples(clouds.size());
  parallel_for(0, static_cast<int>(clouds.size()), threads, [&](int i) {
    const PointCloud c = io::read_ply(clouds[static_cast<std::size_t>(i)].second);
    if (c.frame != Frame::World) fail(Errc::InvalidArgument, "cloud is not in the world frame");
    samples[static_cast<std::size_t>(i)] = probe_elevation(c, probe, o.radius);
  });
  const WaveSeries series = assemble_probe_series(samples, o.rate, o.t0, probe, "stereo");
  const fs::path out = o.out;
  ensure_dir(out);
  io::write_series_csv(series, out / "series.csv");
  json stats;
  if (!o.reference.empty()) {
    const WaveSeries ref = io::read_series_csv(o.reference, "reference");
    stats = compare_series(series, ref, o.max_lag).to_json();
  } else {
    const WaveStats s = zero_crossing_stats(series);
    stats = {{"H_bar", s.H_bar}, {"T_bar", s.T_bar}, {"n_waves", s.n_waves}, {"r_squared", nullptr},
             {"slope", nullptr}, {"mean_bias_percent", nullptr}};
  }
  io::write_json(stats, out / "stats.json");
  echo_config(out, "series",
              {{"cloud_dir", o.cloud_dir}, {"probe", {probe.x(), probe.y()}}, {"radius", o.radius},
               {"rate", o.rate}, {"t0", o.t0}, {"reference", o.reference}, {"max_lag", o.max_lag},
               {"threads", threads}});
}

// ---------------------------------------------------------------------------

struct EvalOptions {
  std::string left, right, disp, out;
  double max_val = 255.0;
};

void run_eval(const EvalOptions& o) {
  const Image left = read_image(o.left);
  const Image right = read_image(o.right);
  const DisparityMap d = io::read_disparity_pfm(o.disp);
  const MetricReport r = evaluate_disparity(left, right, d, o.max_val);
  const json doc = r.to_json();
  if (o.out.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  io::write_json(doc, o.out);
  echo_config(parent_or_dot(o.out), "eval",
              {{"left", o.left}, {"right", o.right}, {"disp", o.disp}, {"max_val", o.max_val}});
}

// ---------------------------------------------------------------------------

struct BudgetOptions {
  std::string calib, out;
  double z_min = 0.5;
  double z_max = 1.0;
  int n = 11;
  double e = 1.0;
};

void run_budget(const BudgetOptions& o) {
  const StereoRig rig = o.calib.empty() ? flume_rig() : io::read_calibration(o.calib);
  const auto table = budget_table(rig, o.z_min, o.z_max, o.n, o.e);
  const std::string csv = budget_csv(table);
  if (o.out.empty()) {
    std::cout << csv;
    return;
  }
  std::FILE* f = std::fopen(o.out.c_str(), "wb");
  if (!f) fail(Errc::IoFailure, "cannot write " + o.out);
  const bool ok = std::fwrite(csv.data(), 1, csv.size(), f) == csv.size();
  if (std::fclose(f) != 0 || !ok) fail(Errc::IoFailure, "cannot write " + o.out);
  fs::path json_path = o.out;
  json_path.replace_extension(".json");
  io::write_json(budget_json(table), json_path);
  echo_config(parent_or_dot(o.out), "budget",
              {{"calib", o.calib}, {"z_min", o.z_min}, {"z_max", o.z_max}, {"n", o.n}, {"e", o.e}});
}

void report_error(const std::string& name, const std::string& message, std::optional<std::string> path = {}) {
  json j = {{"error", name}, {"message", message}};
  if (path) j["path"] = *path;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereo reconstruction of water-wave surfaces"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (frame-level where applicable)")->check(CLI::PositiveNumber);

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "Render an oracle stereo sequence with ground truth");
  c_synth->add_option("--scene", synth.scene, "Scene JSON (default: built-in flume scene)")->check(CLI::ExistingFile);
  c_synth->add_option("--out", synth.out, "Output directory")->required();
  c_synth->add_option("--frames", synth.frames, "Number of frames");
  c_synth->add_option("--t0", synth.t0, "Time of the first frame (s)");
  c_synth->add_flag("--flat", synth.flat, "Render still water");
  c_synth->add_option("--period", synth.period, "Override wave period (s)");
  c_synth->add_option("--height", synth.height, "Override wave height (m)");
  c_synth->add_option("--probe", synth.probe, "Probe X Y in world meters (default: principal footprint)")
      ->expected(2);
  c_synth->add_option("--image-format", synth.image_format, "pgm (8-bit) or pfm (float)")
      ->check(CLI::IsMember({"pgm", "pfm"}));

  MatchOptions match;
  auto* c_match = app.add_subcommand("match", "Census + SGM disparity (single pair or directory)");
  c_match->add_option("--left", match.left, "Left image (PGM/PFM)");
  c_match->add_option("--right", match.right, "Right image (PGM/PFM)");
  c_match->add_option("--out", match.out, "Output disparity PFM");
  c_match->add_option("--dir", match.dir, "Directory with left_NNNN / right_NNNN images");
  c_match->add_option("--out-dir", match.out_dir, "Output directory for disp_NNNN.pfm");
  c_match->add_option("--d-min", match.params.d_min);
  c_match->add_option("--d-max", match.params.d_max);
  c_match->add_option("--census-window", match.params.census_window);
  c_match->add_option("--p1", match.params.P1);
  c_match->add_option("--p2", match.params.P2);
  c_match->add_option("--paths", match.params.paths);
  c_match->add_option("--lr-threshold", match.params.lr_threshold);
  c_match->add_option("--refine-window", match.params.refine_window, "0 disables photometric refinement");
  bool no_subpixel = false;
  c_match->add_flag("--no-subpixel", no_subpixel);

  AdaptOptions adapt;
  auto* c_adapt = app.add_subcommand("adapt", "Synthesize a fine-tuning dataset from mono-depth maps");
  c_adapt->add_option("--images", adapt.images, "Directory with left_NNNN.pgm / right_NNNN.pgm")->required();
  c_adapt->add_option("--depth", adapt.depth, "Directory with depth_NNNN.pfm (inverse depth)")->required();
  c_adapt->add_option("--out", adapt.out, "Dataset directory")->required();
  c_adapt->add_option("--d-min", adapt.d_min)->required();
  c_adapt->add_option("--d-max", adapt.d_max)->required();
  c_adapt->add_option("--seed", adapt.seed, "Shuffle seed");
  c_adapt->add_flag("--constant-fill", adapt.constant_fill, "Map constant depth maps to d_min");
  c_adapt->add_option("--batch-size", adapt.manifest.batch_size);
  c_adapt->add_option("--max-iterations", adapt.manifest.max_iterations);
  c_adapt->add_option("--crop", adapt.crop, "Crop height and width")->expected(2);

  ReconstructOptions recon;
  auto* c_recon = app.add_subcommand("reconstruct", "Point clouds, still-water plane and world frame");
  c_recon->add_option("--disp-dir", recon.disp_dir, "Directory with disp_NNNN.pfm")->required();
  c_recon->add_option("--calib", recon.calib, "Calibration JSON")->required();
  c_recon->add_option("--out", recon.out, "Output directory")->required();
  c_recon->add_option("--images", recon.images, "Directory with left_NNNN images for intensity");
  c_recon->add_option("--plane-from", recon.plane_from, "Still-water disparity PFM (default: first frame)");
  c_recon->add_option("--world", recon.world, "plane: define the world frame from the fitted plane; calib: keep the pose")
      ->check(CLI::IsMember({"plane", "calib"}));
  c_recon->add_option("--ply", recon.ply, "binary or ascii")->check(CLI::IsMember({"binary", "ascii"}));
  c_recon->add_option("--grid-cell", recon.grid_cell, "Deviation map cell (m)");
  c_recon->add_option("--ransac-threshold", recon.ransac.inlier_threshold);
  c_recon->add_option("--ransac-iterations", recon.ransac.iterations);
  c_recon->add_option("--ransac-min-fraction", recon.ransac.min_inlier_fraction);
  c_recon->add_option("--seed", recon.ransac.seed);

  SeriesOptions series;
  auto* c_series = app.add_subcommand("series", "Probe time series and wave statistics");
  c_series->add_option("--cloud-dir", series.cloud_dir, "Directory with world-frame cloud_NNNN.ply")->required();
  c_series->add_option("--probe", series.probe, "Probe X Y (m)")->expected(2)->required();
  c_series->add_option("--out", series.out, "Output directory")->required();
  c_series->add_option("--radius", series.radius, "Probe radius (m)");
  c_series->add_option("--rate", series.rate, "Frame rate (Hz)");
  c_series->add_option("--t0", series.t0);
  c_series->add_option("--reference", series.reference, "Reference series CSV for R^2 and the linear fit");
  c_series->add_option("--max-lag", series.max_lag, "Alignment search range (samples)");

  EvalOptions eval;
  auto* c_eval = app.add_subcommand("eval", "Photometric reprojection metrics");
  c_eval->add_option("--left", eval.left)->required();
  c_eval->add_option("--right", eval.right)->required();
  c_eval->add_option("--disp", eval.disp)->required();
  c_eval->add_option("--out", eval.out, "Report JSON (default: stdout)");
  c_eval->add_option("--max-val", eval.max_val);

  BudgetOptions budget;
  auto* c_budget = app.add_subcommand("budget", "Quantization error budget over a depth range");
  c_budget->add_option("--calib", budget.calib, "Calibration JSON (default: flume rig)");
  c_budget->add_option("--z-min", budget.z_min);
  c_budget->add_option("--z-max", budget.z_max);
  c_budget->add_option("--n", budget.n);
  c_budget->add_option("-e,--e", budget.e, "Positioning error (px)");
  c_budget->add_option("--out", budget.out, "CSV path (a JSON mirror is written next to it)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("UsageError", e.what());
    return 2;
  }

  try {
    if (*c_synth) run_synth(synth, threads);
    if (*c_match) {
      match.params.subpixel = !no_subpixel;
      run_match(match, threads);
    }
    if (*c_adapt) run_adapt(adapt, threads);
    if (*c_recon) run_reconstruct(recon, threads);
    if (*c_series) run_series(series, threads);
    if (*c_eval) run_eval(eval);
    if (*c_budget) run_budget(budget);
  } catch (const Error& e) {
    if (e.code() == Errc::FileNotFound)
      report_error(std::string(e.name()), "file not found", e.what());
    else
      report_error(std::string(e.name()), e.what());
    return is_input_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return 1;
  }
  return 0;
}
