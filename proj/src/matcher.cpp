#include "wavestereo/matcher.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "wavestereo/io.hpp"
#include "wavestereo/parallel.hpp"

namespace wavestereo {

void MatchParams::validate() const {
  if (d_min < 0 || d_min >= d_max) fail(Errc::InvalidArgument, "need 0 <= d_min < d_max");
  if (census_window < 3 || census_window % 2 == 0 || census_window > 7)
    fail(Errc::InvalidArgument, "census window must be odd and in [3, 7]");
  if (P1 <= 0 || P1 > P2) fail(Errc::InvalidArgument, "need 0 < P1 <= P2");
  if (paths != 4 && paths != 8) fail(Errc::InvalidArgument, "paths must be 4 or 8");
  if (!(lr_threshold >= 0.0)) fail(Errc::InvalidArgument, "lr_threshold must be >= 0");
  if (threads < 1) fail(Errc::InvalidArgument, "threads must be >= 1");
  if (refine_window != 0 && (refine_window < 3 || refine_window % 2 == 0))
    fail(Errc::InvalidArgument, "refine window must be 0 or odd and >= 3");
  if (static_cast<long long>(paths) * (census_bits() + P2) > std::numeric_limits<std::uint16_t>::max())
    fail(Errc::InvalidArgument, "P2 too large for 16-bit aggregation");
}

Grid<std::uint64_t> census_transform(const Image& image, int window) {
  const int W = image.width();
  const int H = image.height();
  const int r = window / 2;
  Grid<std::uint64_t> out(W, H, 0);
  for (int v = 0; v < H; ++v) {
    for (int u = 0; u < W; ++u) {
      const float center = image(u, v);
      std::uint64_t sig = 0;
      for (int dv = -r; dv <= r; ++dv) {
        const int y = std::clamp(v + dv, 0, H - 1);
        for (int du = -r; du <= r; ++du) {
          if (du == 0 && dv == 0) continue;
          const int x = std::clamp(u + du, 0, W - 1);
          sig = (sig << 1) | (image(x, y) < center ? 1u : 0u);
        }
      }
      out(u, v) = sig;
    }
  }
  return out;
}

CostVolume census_cost_volume(const Image& left, const Image& right, const MatchParams& params) {
  params.validate();
  if (left.width() != right.width() || left.height() != right.height())
    fail(Errc::DimensionMismatch, "left and right images differ in size");
  const int W = left.width();
  const int H = left.height();
  const int D = params.disparity_count();
  const auto max_cost = static_cast<std::uint8_t>(params.census_bits());
  const auto cl = census_transform(left, params.census_window);
  const auto cr = census_transform(right, params.census_window);

  CostVolume vol(W, H, params.d_min, D, max_cost);
  parallel_for(0, H, params.threads, [&](int v) {
    for (int u = 0; u < W; ++u) {
      std::uint8_t* c = vol.at(u, v);
      const std::uint64_t sl = cl(u, v);
      for (int k = 0; k < D; ++k) {
        const int ur = u - (params.d_min + k);
        if (ur < 0) break;  // larger disparities are further out of bounds
        c[k] = static_cast<std::uint8_t>(std::popcount(sl ^ cr(ur, v)));
      }
    }
  });
  return vol;
}

namespace {

// One recurrence step for a pixel given its predecessor's path costs.
inline void sgm_step(const std::uint8_t* cost, const std::uint16_t* prev, std::uint16_t* out, int D,
                     int P1, int P2) {
  std::uint16_t min_prev = prev[0];
  for (int k = 1; k < D; ++k) min_prev = std::min(min_prev, prev[k]);
  const int jump = min_prev + P2;
  for (int k = 0; k < D; ++k) {
    int best = prev[k];
    if (k > 0) best = std::min(best, prev[k - 1] + P1);
    if (k + 1 < D) best = std::min(best, prev[k + 1] + P1);
    best = std::min(best, jump);
    out[k] = static_cast<std::uint16_t>(cost[k] + best - min_prev);
  }
}

inline void sgm_start(const std::uint8_t* cost, std::uint16_t* out, int D) {
  for (int k = 0; k < D; ++k) out[k] = cost[k];
}

inline void accumulate(std::uint16_t* sum, const std::uint16_t* path, int D) {
  for (int k = 0; k < D; ++k) sum[k] = static_cast<std::uint16_t>(sum[k] + path[k]);
}

struct Direction {
  int du;
  int dv;
};

}  // namespace

AggregatedVolume sgm_aggregate(const CostVolume& cost, const MatchParams& params) {
  // Zero penalties are allowed here: they reduce aggregation to a plain sum.
  if (params.paths != 4 && params.paths != 8) fail(Errc::InvalidArgument, "paths must be 4 or 8");
  if (params.P1 < 0 || params.P1 > params.P2) fail(Errc::InvalidArgument, "need 0 <= P1 <= P2");
  if (params.threads < 1) fail(Errc::InvalidArgument, "threads must be >= 1");
  if (static_cast<long long>(params.paths) * (255 + params.P2) > std::numeric_limits<std::uint16_t>::max())
    fail(Errc::InvalidArgument, "P2 too large for 16-bit aggregation");
  const int W = cost.width;
  const int H = cost.height;
  const int D = cost.ndisp;
  AggregatedVolume sum(W, H, cost.d_min, D, 0);
  const int P1 = params.P1;
  const int P2 = params.P2;

  std::vector<Direction> dirs = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  if (params.paths == 8) dirs.insert(dirs.end(), {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}});

  const std::size_t row_len = static_cast<std::size_t>(W) * D;
  for (const Direction dir : dirs) {
    if (dir.dv == 0) {
      // Rows are independent scanlines.
      parallel_for(0, H, params.threads, [&](int v) {
        std::vector<std::uint16_t> a(static_cast<std::size_t>(D)), b(static_cast<std::size_t>(D));
        std::uint16_t* prev = a.data();
        std::uint16_t* cur = b.data();
        const int u_first = dir.du > 0 ? 0 : W - 1;
        for (int i = 0; i < W; ++i) {
          const int u = u_first + i * dir.du;
          if (i == 0)
            sgm_start(cost.at(u, v), cur, D);
          else
            sgm_step(cost.at(u, v), prev, cur, D, P1, P2);
          accumulate(sum.at(u, v), cur, D);
          std::swap(prev, cur);
        }
      });
    } else {
      // Sweep rows in path order; each row depends only on the previous one.
      std::vector<std::uint16_t> prev_row(row_len), cur_row(row_len);
      const int v_first = dir.dv > 0 ? 0 : H - 1;
      for (int j = 0; j < H; ++j) {
        const int v = v_first + j * dir.dv;
        parallel_for(0, W, j == 0 ? 1 : params.threads, [&](int u) {
          std::uint16_t* out = cur_row.data() + static_cast<std::size_t>(u) * D;
          const int up = u - dir.du;
          if (j == 0 || up < 0 || up >= W)
            sgm_start(cost.at(u, v), out, D);
          else
            sgm_step(cost.at(u, v), prev_row.data() + static_cast<std::size_t>(up) * D, out, D, P1, P2);
          accumulate(sum.at(u, v), out, D);
        });
        std::swap(prev_row, cur_row);
      }
    }
  }
  return sum;
}

DisparityMap wta_disparity(const AggregatedVolume& agg, const MatchParams& params) {
  const int W = agg.width;
  const int H = agg.height;
  const int D = agg.ndisp;
  FloatGrid values(W, H, kInvalidDisparity);
  MaskGrid mask(W, H, 0);
  parallel_for(0, H, params.threads, [&](int v) {
    for (int u = 0; u < W; ++u) {
      const std::uint16_t* s = agg.at(u, v);
      int best = 0;
      for (int k = 1; k < D; ++k)
        if (s[k] < s[best]) best = k;
      bool ambiguous = false;
      for (int k = 0; k < D && !ambiguous; ++k)
        ambiguous = std::abs(k - best) > 1 && s[k] == s[best];
      // Only disparities whose right sample lies inside the image count.
      if (ambiguous || u - (agg.d_min + best) < 0) continue;
      double d = agg.d_min + best;
      if (params.subpixel && best > 0 && best + 1 < D) {
        const double c0 = s[best - 1];
        const double c1 = s[best];
        const double c2 = s[best + 1];
        const double denom = c0 - 2.0 * c1 + c2;
        if (denom > 0.0) d += std::clamp((c0 - c2) / (2.0 * denom), -0.5, 0.5);
      }
      values(u, v) = static_cast<float>(d);
      mask(u, v) = 1;
    }
  });
  return DisparityMap(std::move(values), std::move(mask));
}

DisparityMap lr_consistency(const DisparityMap& left, const DisparityMap& right, double threshold) {
  if (left.width() != right.width() || left.height() != right.height())
    fail(Errc::DimensionMismatch, "left and right disparity maps differ in size");
  DisparityMap out = left;
  const int W = left.width();
  for (int v = 0; v < left.height(); ++v) {
    for (int u = 0; u < W; ++u) {
      if (!left.valid(u, v)) continue;
      const double d = left(u, v);
      const long ur = std::lround(u - d);
      if (ur < 0 || ur >= W || !right.valid(static_cast<int>(ur), v) ||
          std::abs(d - right(static_cast<int>(ur), v)) > threshold)
        out.invalidate(u, v);
    }
  }
  return out;
}

DisparityMap refine_disparity(const Image& left, const Image& right, const DisparityMap& disparity, int window,
                              int threads) {
  if (!left.grid().same_shape(right.grid()) || !left.grid().same_shape(disparity.width(), disparity.height()))
    fail(Errc::DimensionMismatch, "refinement inputs differ in size");
  if (window < 3 || window % 2 == 0) fail(Errc::InvalidArgument, "refine window must be odd and >= 3");
  constexpr int kIterations = 2;
  const int W = left.width();
  const int H = left.height();
  const int r = window / 2;
  FloatGrid grad(W, H, 0.0f);
  for (int v = 0; v < H; ++v)
    for (int u = 1; u + 1 < W; ++u) grad(u, v) = 0.5f * (right(u + 1, v) - right(u - 1, v));

  // Local model: disparity d + a*du + b*dv across the window, so slanted
  // surfaces do not bias the center estimate.
  // Windows are clipped to the image; at least half of the samples must remain.
  const int min_samples = window * (r + 1);
  DisparityMap out = disparity;
  parallel_for(0, H, threads, [&](int v) {
    for (int u = 0; u < W; ++u) {
      if (!disparity.valid(u, v)) continue;
      const double d0 = disparity(u, v);
      Eigen::Vector3d x(d0, 0.0, 0.0);
      bool ok = true;
      for (int it = 0; it < kIterations && ok; ++it) {
        // Normal equations of J = g * [1, du, dv], accumulated as scalars.
        double s_gg = 0, s_ggu = 0, s_ggv = 0, s_gguu = 0, s_gguv = 0, s_ggvv = 0;
        double s_gr = 0, s_gru = 0, s_grv = 0;
        int samples = 0;
        const int dv_lo = std::max(-r, -v);
        const int dv_hi = std::min(r, H - 1 - v);
        const int du_lo = std::max(-r, -u);
        const int du_hi = std::min(r, W - 1 - u);
        for (int dv = dv_lo; dv <= dv_hi; ++dv) {
          const int y = v + dv;
          const float* lrow = &left.grid()(0, y);
          const float* rrow = &right.grid()(0, y);
          const float* grow = &grad(0, y);
          const double shift = x[0] + x[2] * dv;
          double gg = 0, ggu = 0, gguu = 0, gr = 0, gru = 0;
          const double slope = 1.0 - x[1];
          const double x_first = u + du_lo * slope - shift;
          const double x_last = u + du_hi * slope - shift;
          // xr is linear in du, so checking both ends covers the row.
          const bool inside = std::min(x_first, x_last) >= 1.0 && std::max(x_first, x_last) < W - 2.0;
          for (int du = du_lo; du <= du_hi; ++du) {
            const double xr = u + du * slope - shift;
            if (!inside && !(xr >= 1.0 && xr < W - 2.0)) continue;
            const int x0 = static_cast<int>(xr);
            const double frac = xr - x0;
            const double ri = rrow[x0] + frac * (rrow[x0 + 1] - rrow[x0]);
            const double gi = grow[x0] + frac * (grow[x0 + 1] - grow[x0]);
            const double res = lrow[u + du] - ri;
            const double g2 = gi * gi;
            gg += g2;
            ggu += g2 * du;
            gguu += g2 * du * du;
            gr += gi * res;
            gru += gi * res * du;
            ++samples;
          }
          s_gg += gg;
          s_ggu += ggu;
          s_ggv += gg * dv;
          s_gguu += gguu;
          s_gguv += ggu * dv;
          s_ggvv += gg * dv * dv;
          s_gr += gr;
          s_gru += gru;
          s_grv += gr * dv;
        }
        Eigen::Matrix3d jtj;
        jtj << s_gg, s_ggu, s_ggv, s_ggu, s_gguu, s_gguv, s_ggv, s_gguv, s_ggvv;
        const Eigen::Vector3d jtr(s_gr, s_gru, s_grv);
        if (samples < min_samples) {
          ok = false;
          break;
        }
        const Eigen::LDLT<Eigen::Matrix3d> solver(jtj);
        if (solver.info() != Eigen::Success || !(jtj(0, 0) > 1e-6) || !solver.isPositive()) {
          ok = false;
          break;
        }
        const Eigen::Vector3d step = -solver.solve(jtr);
        if (!step.allFinite()) {
          ok = false;
          break;
        }
        x += step;
        x[0] = std::clamp(x[0], d0 - 1.0, d0 + 1.0);
        if (std::abs(step[0]) < 2e-3) break;
      }
      if (ok && x[0] >= 0.0) out.set(u, v, static_cast<float>(x[0]));
    }
  });
  return out;
}

Image mirror_horizontal(const Image& image) {
  FloatGrid g(image.width(), image.height());
  for (int v = 0; v < image.height(); ++v)
    for (int u = 0; u < image.width(); ++u) g(u, v) = image(image.width() - 1 - u, v);
  return Image(std::move(g));
}

namespace {

// A raw cost curve that is flat over every in-image disparity carries no
// match information; aggregation only inherits the border bias there.
void mask_textureless(const CostVolume& cost, DisparityMap& dmap) {
  for (int v = 0; v < cost.height; ++v)
    for (int u = 0; u < cost.width; ++u) {
      if (!dmap.valid(u, v)) continue;
      const std::uint8_t* c = cost.at(u, v);
      const int in_image = std::min(cost.ndisp, u - cost.d_min + 1);
      bool flat = true;
      for (int k = 1; k < in_image && flat; ++k) flat = c[k] == c[0];
      if (flat) dmap.invalidate(u, v);
    }
}

DisparityMap match_left(const Image& left, const Image& right, const MatchParams& params) {
  const CostVolume cost = census_cost_volume(left, right, params);
  DisparityMap dmap = wta_disparity(sgm_aggregate(cost, params), params);
  mask_textureless(cost, dmap);
  return dmap;
}

}  // namespace

DisparityMap right_disparity(const Image& left, const Image& right, const MatchParams& params) {
  const DisparityMap mirrored = match_left(mirror_horizontal(right), mirror_horizontal(left), params);
  const int W = mirrored.width();
  DisparityMap out(W, mirrored.height());
  for (int v = 0; v < mirrored.height(); ++v)
    for (int u = 0; u < W; ++u)
      if (mirrored.valid(W - 1 - u, v)) out.set(u, v, mirrored(W - 1 - u, v));
  return out;
}

DisparityMap match_stereo(const Image& left, const Image& right, const MatchParams& params) {
  params.validate();
  const DisparityMap dl = match_left(left, right, params);
  const DisparityMap dr = right_disparity(left, right, params);
  DisparityMap checked = lr_consistency(dl, dr, params.lr_threshold);
  if (params.subpixel && params.refine_window > 0)
    return refine_disparity(left, right, checked, params.refine_window, params.threads);
  return checked;
}

DisparityMap ingest_external_disparity(const std::filesystem::path& path, int width, int height,
                                       const MatchParams& params) {
  FloatGrid values = io::read_pfm(path);
  if (!values.same_shape(width, height))
    fail(Errc::DimensionMismatch, "external disparity is " + std::to_string(values.width()) + "x" +
                                      std::to_string(values.height()) + ", expected " +
                                      std::to_string(width) + "x" + std::to_string(height));
  for (float& d : values.data()) {
    if (!std::isfinite(d) || d < static_cast<float>(params.d_min) || d > static_cast<float>(params.d_max))
      d = kInvalidDisparity;
  }
  DisparityMap out = DisparityMap::from_values(std::move(values));
  if (out.valid_count() == 0) fail(Errc::AllMasked, "external disparity has no valid pixel");
  return out;
}

}  // namespace wavestereo
