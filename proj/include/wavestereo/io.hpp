#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "wavestereo/rig.hpp"
#include "wavestereo/types.hpp"

namespace wavestereo::io {

namespace fs = std::filesystem;

// PFM ("Pf", grayscale). Rows are stored bottom-up on disk; grids in memory
// are top-down. Both endiannesses are read; writes are little-endian with
// scale -1.0. NaN payloads are copied bit-for-bit in both directions.
FloatGrid read_pfm(const fs::path& path);
void write_pfm(const FloatGrid& grid, const fs::path& path);

/// Masked pixels are written as NaN.
void write_pfm(const DisparityMap& dmap, const fs::path& path);
DisparityMap read_disparity_pfm(const fs::path& path);

// PGM (P5). maxval 255 -> 1 byte per sample, 65535 -> 2 bytes big-endian.
// Reads return raw sample values as floats (no rescaling). Writes round to the
// nearest integer and clamp to [0, maxval].
Image read_pgm(const fs::path& path);
void write_pgm(const Image& image, const fs::path& path, int maxval = 255);
/// 0/1 mask written as 0/255.
void write_mask_pgm(const MaskGrid& mask, const fs::path& path);
MaskGrid read_mask_pgm(const fs::path& path);

enum class PlyFormat { Ascii, BinaryLittleEndian };

// PLY with a single vertex element: double x, y, z and optional float
// intensity. The frame tag is stored as a "comment frame <camera|world>" line.
// The reader also accepts float/int typed coordinates and ignores other
// vertex properties.
PointCloud read_ply(const fs::path& path);
void write_ply(const PointCloud& cloud, const fs::path& path,
               PlyFormat format = PlyFormat::BinaryLittleEndian);

// CSV with header "t,eta". dt and t0 are recovered from the time column.
WaveSeries read_series_csv(const fs::path& path, const std::string& probe_id = "");
void write_series_csv(const WaveSeries& series, const fs::path& path);

// Calibration JSON: f_mm, pixel_pitch_um, baseline_m, u0, v0, width, height,
// rotation (9 row-major floats or 3-float axis-angle in radians), translation.
StereoRig read_calibration(const fs::path& path);
StereoRig calibration_from_json(const nlohmann::json& doc);
nlohmann::json calibration_to_json(const StereoRig& rig);
void write_calibration(const StereoRig& rig, const fs::path& path);

nlohmann::json read_json(const fs::path& path);
void write_json(const nlohmann::json& doc, const fs::path& path);

}  // namespace wavestereo::io
