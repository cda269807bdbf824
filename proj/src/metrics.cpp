#include "wavestereo/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "wavestereo/adapt.hpp"

namespace wavestereo {

namespace {

void check_shapes(const Image& a, const Image& b, const MaskGrid& valid) {
  if (!a.grid().same_shape(b.grid()) || !valid.same_shape(a.grid()))
    fail(Errc::DimensionMismatch, "images and mask differ in size");
}

constexpr int kSsimRadius = 5;
constexpr double kSsimSigma = 1.5;

std::array<double, 2 * kSsimRadius + 1> gaussian_taps() {
  std::array<double, 2 * kSsimRadius + 1> w{};
  for (int i = -kSsimRadius; i <= kSsimRadius; ++i)
    w[static_cast<std::size_t>(i + kSsimRadius)] = std::exp(-(i * i) / (2.0 * kSsimSigma * kSsimSigma));
  return w;
}

// Separable weighted window sum of `src`, evaluated only where the window
// fits inside the image; elsewhere 0.
std::vector<double> window_sum(const std::vector<double>& src, int W, int H) {
  const auto w = gaussian_taps();
  const int r = kSsimRadius;
  std::vector<double> rows(src.size(), 0.0);
  for (int v = 0; v < H; ++v)
    for (int u = r; u + r < W; ++u) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k)
        s += w[static_cast<std::size_t>(k + r)] * src[static_cast<std::size_t>(v) * W + u + k];
      rows[static_cast<std::size_t>(v) * W + u] = s;
    }
  std::vector<double> out(src.size(), 0.0);
  for (int v = r; v + r < H; ++v)
    for (int u = r; u + r < W; ++u) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k)
        s += w[static_cast<std::size_t>(k + r)] * rows[static_cast<std::size_t>(v + k) * W + u];
      out[static_cast<std::size_t>(v) * W + u] = s;
    }
  return out;
}

}  // namespace

Reprojection photometric_reproject(const Image& left, const DisparityMap& dmap) {
  if (!left.grid().same_shape(dmap.width(), dmap.height()))
    fail(Errc::DimensionMismatch, "image and disparity differ in size");
  MaskGrid visible = occlusion_mask(dmap);
  WarpResult warp = forward_warp(left, dmap, visible);
  MaskGrid valid(left.width(), left.height(), 0);
  for (std::size_t i = 0; i < valid.size(); ++i) valid.data()[i] = warp.holes.data()[i] ? 0 : 1;
  return {std::move(warp.warped), std::move(valid)};
}

double mse(const Image& a, const Image& b, const MaskGrid& valid) {
  check_shapes(a, b, valid);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (!valid.data()[i]) continue;
    const double d = static_cast<double>(a.grid().data()[i]) - b.grid().data()[i];
    sum += d * d;
    ++n;
  }
  if (n == 0) fail(Errc::NoValidPixels, "no valid pixel to compare");
  return sum / static_cast<double>(n);
}

double psnr_from_mse(double m, double max_val) {
  if (!(max_val > 0.0)) fail(Errc::NonpositiveParameter, "max_val must be > 0");
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_val * max_val / m);
}

double psnr(const Image& a, const Image& b, const MaskGrid& valid, double max_val) {
  return psnr_from_mse(mse(a, b, valid), max_val);
}

double ssim(const Image& a, const Image& b, const MaskGrid& valid, double max_val) {
  check_shapes(a, b, valid);
  const int W = a.width();
  const int H = a.height();
  const std::size_t n = valid.size();
  std::vector<double> m(n), ma(n), mb(n), maa(n), mbb(n), mab(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = valid.data()[i] ? 1.0 : 0.0;
    const double x = a.grid().data()[i];
    const double y = b.grid().data()[i];
    m[i] = k;
    ma[i] = k * x;
    mb[i] = k * y;
    maa[i] = k * x * x;
    mbb[i] = k * y * y;
    mab[i] = k * x * y;
  }
  const auto sw = window_sum(m, W, H);
  const auto sa = window_sum(ma, W, H);
  const auto sb = window_sum(mb, W, H);
  const auto saa = window_sum(maa, W, H);
  const auto sbb = window_sum(mbb, W, H);
  const auto sab = window_sum(mab, W, H);

  const double c1 = std::pow(0.01 * max_val, 2);
  const double c2 = std::pow(0.03 * max_val, 2);
  const int r = kSsimRadius;
  double total = 0.0;
  std::size_t windows = 0;
  for (int v = r; v + r < H; ++v) {
    for (int u = r; u + r < W; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * W + u;
      if (!valid.data()[i]) continue;
      const double wsum = sw[i];
      const double mu_a = sa[i] / wsum;
      const double mu_b = sb[i] / wsum;
      const double var_a = saa[i] / wsum - mu_a * mu_a;
      const double var_b = sbb[i] / wsum - mu_b * mu_b;
      const double cov = sab[i] / wsum - mu_a * mu_b;
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  }
  if (windows == 0) fail(Errc::NoValidPixels, "no valid SSIM window");
  return total / static_cast<double>(windows);
}

std::vector<Pixel> sobel_edges(const Image& image, const MaskGrid& valid) {
  const int W = image.width();
  const int H = image.height();
  if (!valid.same_shape(image.grid())) fail(Errc::DimensionMismatch, "image and mask differ in size");
  std::vector<Pixel> candidates;
  std::vector<double> mag;
  for (int v = 1; v + 1 < H; ++v) {
    for (int u = 1; u + 1 < W; ++u) {
      bool ok = true;
      for (int dv = -1; dv <= 1 && ok; ++dv)
        for (int du = -1; du <= 1 && ok; ++du) ok = valid(u + du, v + dv) != 0;
      if (!ok) continue;
      auto I = [&](int du, int dv) { return static_cast<double>(image(u + du, v + dv)); };
      const double gx = (I(1, -1) + 2.0 * I(1, 0) + I(1, 1)) - (I(-1, -1) + 2.0 * I(-1, 0) + I(-1, 1));
      const double gy = (I(-1, 1) + 2.0 * I(0, 1) + I(1, 1)) - (I(-1, -1) + 2.0 * I(0, -1) + I(1, -1));
      candidates.push_back({u, v});
      mag.push_back(std::hypot(gx, gy));
    }
  }
  if (mag.empty()) return {};
  double mean = 0.0;
  for (double x : mag) mean += x;
  mean /= static_cast<double>(mag.size());
  double var = 0.0;
  for (double x : mag) var += (x - mean) * (x - mean);
  const double threshold = mean + 2.0 * std::sqrt(var / static_cast<double>(mag.size()));
  std::vector<Pixel> edges;
  for (std::size_t i = 0; i < mag.size(); ++i)
    if (mag[i] > threshold) edges.push_back(candidates[i]);
  return edges;
}

namespace {

constexpr double kFar = 1e20;  // squared distance of cells with no site

// Exact 1D squared distance transform (lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& site, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  auto F = [&](int q) { return f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q; };
  int k = 0;
  site[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = (F(q) - F(site[static_cast<std::size_t>(k)])) / (2.0 * (q - site[static_cast<std::size_t>(k)]));
    while (s <= z[static_cast<std::size_t>(k)]) {
      --k;
      s = (F(q) - F(site[static_cast<std::size_t>(k)])) / (2.0 * (q - site[static_cast<std::size_t>(k)]));
    }
    ++k;
    site[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
    const int p = site[static_cast<std::size_t>(k)];
    d[static_cast<std::size_t>(q)] = static_cast<double>(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
  }
}

}  // namespace

double directed_modified_hausdorff(const std::vector<Pixel>& A, const std::vector<Pixel>& B) {
  if (A.empty() || B.empty()) fail(Errc::EmptyEdgeSet, "edge set is empty");
  int u0 = A[0].u, u1 = u0, v0 = A[0].v, v1 = v0;
  for (const auto* set : {&A, &B})
    for (const Pixel& p : *set) {
      u0 = std::min(u0, p.u);
      u1 = std::max(u1, p.u);
      v0 = std::min(v0, p.v);
      v1 = std::max(v1, p.v);
    }
  const int W = u1 - u0 + 1;
  const int H = v1 - v0 + 1;
  std::vector<double> grid(static_cast<std::size_t>(W) * H, kFar);
  for (const Pixel& p : B) grid[static_cast<std::size_t>(p.v - v0) * W + (p.u - u0)] = 0.0;

  const int n = std::max(W, H);
  std::vector<double> f(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n) + 1);
  std::vector<int> site(static_cast<std::size_t>(n));
  // Columns, then rows.
  f.resize(static_cast<std::size_t>(H));
  d.resize(static_cast<std::size_t>(H));
  for (int u = 0; u < W; ++u) {
    for (int v = 0; v < H; ++v) f[static_cast<std::size_t>(v)] = grid[static_cast<std::size_t>(v) * W + u];
    edt_1d(f, d, site, z);
    for (int v = 0; v < H; ++v) grid[static_cast<std::size_t>(v) * W + u] = d[static_cast<std::size_t>(v)];
  }
  f.resize(static_cast<std::size_t>(W));
  d.resize(static_cast<std::size_t>(W));
  for (int v = 0; v < H; ++v) {
    for (int u = 0; u < W; ++u) f[static_cast<std::size_t>(u)] = grid[static_cast<std::size_t>(v) * W + u];
    edt_1d(f, d, site, z);
    for (int u = 0; u < W; ++u) grid[static_cast<std::size_t>(v) * W + u] = d[static_cast<std::size_t>(u)];
  }
  double sum = 0.0;
  for (const Pixel& p : A) sum += std::sqrt(grid[static_cast<std::size_t>(p.v - v0) * W + (p.u - u0)]);
  return sum / static_cast<double>(A.size());
}

double modified_hausdorff(const std::vector<Pixel>& A, const std::vector<Pixel>& B) {
  return std::max(directed_modified_hausdorff(A, B), directed_modified_hausdorff(B, A));
}

double hausdorff(const Image& a, const Image& b, const MaskGrid& valid) {
  check_shapes(a, b, valid);
  return modified_hausdorff(sobel_edges(a, valid), sobel_edges(b, valid));
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j = {{"ssim", ssim},
                      {"mse", mse},
                      {"hd", hd},
                      {"evaluated_pixel_count", evaluated_pixel_count},
                      {"occluded_excluded", occluded_excluded}};
  if (std::isinf(psnr))
    j["psnr"] = "inf";
  else
    j["psnr"] = psnr;
  return j;
}

MetricReport evaluate_disparity(const Image& left, const Image& right, const DisparityMap& dmap, double max_val) {
  if (!left.grid().same_shape(right.grid())) fail(Errc::DimensionMismatch, "left and right images differ in size");
  const Reprojection rep = photometric_reproject(left, dmap);
  MetricReport r;
  r.evaluated_pixel_count =
      static_cast<std::size_t>(std::count(rep.valid.data().begin(), rep.valid.data().end(), std::uint8_t{1}));
  if (r.evaluated_pixel_count == 0) fail(Errc::NoValidPixels, "disparity projects no pixel");
  r.mse = mse(rep.image, right, rep.valid);
  r.psnr = psnr_from_mse(r.mse, max_val);
  r.ssim = ssim(rep.image, right, rep.valid, max_val);
  r.hd = hausdorff(rep.image, right, rep.valid);
  r.occluded_excluded = true;
  return r;
}

nlohmann::json aggregate_reports(const std::vector<MetricReport>& reports) {
  nlohmann::json out;
  auto mean_of = [&](auto field) -> nlohmann::json {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : reports) {
      const double x = field(r);
      if (std::isfinite(x)) {
        sum += x;
        ++n;
      }
    }
    if (n == 0) return nullptr;
    return sum / static_cast<double>(n);
  };
  out["ssim"] = mean_of([](const MetricReport& r) { return r.ssim; });
  out["psnr"] = mean_of([](const MetricReport& r) { return r.psnr; });
  out["mse"] = mean_of([](const MetricReport& r) { return r.mse; });
  out["hd"] = mean_of([](const MetricReport& r) { return r.hd; });
  out["evaluated_pixel_count"] =
      mean_of([](const MetricReport& r) { return static_cast<double>(r.evaluated_pixel_count); });
  out["frames"] = reports.size();
  return out;
}

}  // namespace wavestereo
