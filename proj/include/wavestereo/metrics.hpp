#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavestereo/types.hpp"

namespace wavestereo {

struct Reprojection {
  Image image;     // projected right image; 0 where nothing landed
  MaskGrid valid;  // 1 where a left pixel was projected
};

/// Forward-warps I_l by the disparity map. Masked-out and Algorithm-2
/// occluded pixels are excluded, so `valid` covers non-occluded regions only.
Reprojection photometric_reproject(const Image& left, const DisparityMap& dmap);

/// Mean squared difference over valid pixels. Throws NoValidPixels.
double mse(const Image& a, const Image& b, const MaskGrid& valid);

/// 10 log10(max_val^2 / MSE); +infinity when MSE is 0.
double psnr(const Image& a, const Image& b, const MaskGrid& valid, double max_val = 255.0);
double psnr_from_mse(double mse, double max_val = 255.0);

/// Mean SSIM over 11x11 windows (Gaussian sigma 1.5, K1 0.01, K2 0.03) that
/// lie fully inside the image and whose center is valid. Window weights are
/// restricted to valid pixels and renormalized.
double ssim(const Image& a, const Image& b, const MaskGrid& valid, double max_val = 255.0);

struct Pixel {
  int u = 0;
  int v = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Sobel edges: candidates are valid pixels whose 3x3 neighborhood is valid
/// and inside the image; edges are candidates with gradient magnitude above
/// mean + 2 std (population) of the candidates' magnitudes. Row-major order.
std::vector<Pixel> sobel_edges(const Image& image, const MaskGrid& valid);

/// Mean over a in A of the Euclidean distance to the nearest b in B,
/// computed with an exact distance transform. Throws EmptyEdgeSet.
double directed_modified_hausdorff(const std::vector<Pixel>& A, const std::vector<Pixel>& B);

/// max(h(A, B), h(B, A)).
double modified_hausdorff(const std::vector<Pixel>& A, const std::vector<Pixel>& B);

/// Modified Hausdorff distance between the Sobel edge sets of both images.
double hausdorff(const Image& a, const Image& b, const MaskGrid& valid);

struct MetricReport {
  double ssim = 0.0;
  double psnr = 0.0;  // may be +infinity
  double mse = 0.0;
  double hd = 0.0;
  std::size_t evaluated_pixel_count = 0;
  bool occluded_excluded = true;

  /// +infinity PSNR is written as the string "inf".
  nlohmann::json to_json() const;
};

/// Reprojects I_l by dmap and compares the result with I_r over the valid
/// (non-occluded, projected) pixels.
MetricReport evaluate_disparity(const Image& left, const Image& right, const DisparityMap& dmap,
                                double max_val = 255.0);

/// Per-field mean over reports, skipping non-finite values.
nlohmann::json aggregate_reports(const std::vector<MetricReport>& reports);

}  // namespace wavestereo
