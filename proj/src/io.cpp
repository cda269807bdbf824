#include "wavestereo/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/Geometry>

namespace wavestereo::io {

namespace {

// Anything above this is treated as a corrupt header rather than an image.
constexpr std::int64_t kMaxPixels = std::int64_t{1} << 30;

std::string read_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) fail(Errc::FileNotFound, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(Errc::IoFailure, "read failed: " + path.string());
  return std::move(ss).str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoFailure, "cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::IoFailure, "write failed: " + path.string());
}

std::string at_offset(std::size_t offset, const std::string& what) {
  return what + " at byte offset " + std::to_string(offset);
}

// Minimal cursor over a netpbm-style ASCII header.
class HeaderCursor {
 public:
  HeaderCursor(const std::string& bytes, bool allow_comments)
      : bytes_(bytes), allow_comments_(allow_comments) {}

  std::size_t pos() const { return pos_; }

  void skip_space() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#' && allow_comments_) {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) fail(Errc::MalformedHeader, at_offset(start, "missing header field"));
    return bytes_.substr(start, pos_ - start);
  }

  std::int64_t integer() {
    skip_space();
    const std::size_t start = pos_;
    const std::string tok = token();
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec == std::errc::result_out_of_range)
      fail(Errc::DimensionOverflow, at_offset(start, "integer field out of range"));
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      fail(Errc::MalformedHeader, at_offset(start, "expected integer, got '" + tok + "'"));
    return value;
  }

  double real() {
    skip_space();
    const std::size_t start = pos_;
    const std::string tok = token();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      fail(Errc::MalformedHeader, at_offset(start, "expected number, got '" + tok + "'"));
    return value;
  }

  // Exactly one whitespace byte separates the header from the payload.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      fail(Errc::MalformedHeader, at_offset(pos_, "missing whitespace before payload"));
    ++pos_;
  }

 private:
  const std::string& bytes_;
  bool allow_comments_;
  std::size_t pos_ = 0;
};

std::pair<int, int> checked_dims(std::int64_t w, std::int64_t h, std::size_t offset) {
  if (w <= 0 || h <= 0) fail(Errc::MalformedHeader, at_offset(offset, "nonpositive dimensions"));
  if (w > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max() ||
      w > kMaxPixels / h)
    fail(Errc::DimensionOverflow, at_offset(offset, "image dimensions overflow"));
  return {static_cast<int>(w), static_cast<int>(h)};
}

std::uint32_t load_u32(const char* p, bool big_endian) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  if (big_endian)
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
           std::uint32_t{b[3]};
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

void append_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

template <typename T>
void append_le(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

// ---------------------------------------------------------------------------
// PFM

FloatGrid read_pfm(const fs::path& path) {
  const std::string bytes = read_file(path);
  HeaderCursor cur(bytes, false);
  const std::string magic = cur.token();
  if (magic == "PF") fail(Errc::UnsupportedChannels, at_offset(0, "3-channel PFM is not supported"));
  if (magic != "Pf") fail(Errc::MalformedHeader, at_offset(0, "bad PFM magic '" + magic + "'"));
  const std::size_t dims_at = cur.pos();
  const std::int64_t w = cur.integer();
  const std::int64_t h = cur.integer();
  const auto [width, height] = checked_dims(w, h, dims_at);
  const std::size_t scale_at = cur.pos();
  const double scale = cur.real();
  if (scale == 0.0 || !std::isfinite(scale))
    fail(Errc::MalformedHeader, at_offset(scale_at, "PFM scale must be nonzero"));
  cur.end_of_header();
  const bool big_endian = scale > 0.0;

  const std::size_t payload = cur.pos();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - payload < count * 4)
    fail(Errc::TruncatedPayload,
         at_offset(bytes.size(), "PFM payload holds " + std::to_string(bytes.size() - payload) +
                                     " bytes, expected " + std::to_string(count * 4)));

  FloatGrid grid(width, height);
  const char* src = bytes.data() + payload;
  for (int row = 0; row < height; ++row) {
    const int v = height - 1 - row;  // file rows are bottom-up
    for (int u = 0; u < width; ++u) {
      const std::uint32_t bits = load_u32(src, big_endian);
      grid(u, v) = std::bit_cast<float>(bits);
      src += 4;
    }
  }
  return grid;
}

void write_pfm(const FloatGrid& grid, const fs::path& path) {
  std::string out = "Pf\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) +
                    "\n-1.0\n";
  out.reserve(out.size() + grid.size() * 4);
  for (int v = grid.height() - 1; v >= 0; --v)
    for (int u = 0; u < grid.width(); ++u) append_u32_le(out, std::bit_cast<std::uint32_t>(grid(u, v)));
  write_file(path, out);
}

void write_pfm(const DisparityMap& dmap, const fs::path& path) { write_pfm(dmap.values(), path); }

DisparityMap read_disparity_pfm(const fs::path& path) {
  return DisparityMap::from_values(read_pfm(path));
}

// ---------------------------------------------------------------------------
// PGM

Image read_pgm(const fs::path& path) {
  const std::string bytes = read_file(path);
  HeaderCursor cur(bytes, true);
  const std::string magic = cur.token();
  if (magic.size() == 2 && magic[0] == 'P' && magic[1] >= '1' && magic[1] <= '7' && magic != "P5")
    fail(Errc::UnsupportedFormat, at_offset(0, "only binary P5 PGM is supported, got " + magic));
  if (magic != "P5") fail(Errc::MalformedHeader, at_offset(0, "bad PGM magic '" + magic + "'"));
  const std::size_t dims_at = cur.pos();
  const std::int64_t w = cur.integer();
  const std::int64_t h = cur.integer();
  const auto [width, height] = checked_dims(w, h, dims_at);
  const std::size_t maxval_at = cur.pos();
  const std::int64_t maxval = cur.integer();
  if (maxval < 1 || maxval > 65535)
    fail(Errc::MalformedHeader, at_offset(maxval_at, "PGM maxval out of range"));
  cur.end_of_header();

  const std::size_t sample = maxval < 256 ? 1 : 2;
  const std::size_t payload = cur.pos();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - payload < count * sample)
    fail(Errc::TruncatedPayload, at_offset(bytes.size(), "PGM payload too short"));

  FloatGrid grid(width, height);
  const auto* src = reinterpret_cast<const unsigned char*>(bytes.data() + payload);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned value = sample == 1 ? src[i] : (unsigned{src[2 * i]} << 8) | src[2 * i + 1];
    if (value > static_cast<unsigned>(maxval))
      fail(Errc::InvalidValue, at_offset(payload + i * sample, "PGM sample exceeds maxval"));
    grid.data()[i] = static_cast<float>(value);
  }
  return Image(std::move(grid));
}

void write_pgm(const Image& image, const fs::path& path, int maxval) {
  if (maxval != 255 && maxval != 65535)
    fail(Errc::InvalidArgument, "PGM maxval must be 255 or 65535");
  std::string out = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) +
                    "\n" + std::to_string(maxval) + "\n";
  const auto& px = image.grid().data();
  out.reserve(out.size() + px.size() * (maxval == 255 ? 1 : 2));
  for (float f : px) {
    const double clamped = std::clamp(std::nearbyint(static_cast<double>(f)), 0.0, double(maxval));
    const auto value = static_cast<unsigned>(clamped);
    if (maxval == 255) {
      out.push_back(static_cast<char>(value));
    } else {
      out.push_back(static_cast<char>(value >> 8));
      out.push_back(static_cast<char>(value & 0xff));
    }
  }
  write_file(path, out);
}

void write_mask_pgm(const MaskGrid& mask, const fs::path& path) {
  FloatGrid g(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) g.data()[i] = mask.data()[i] ? 255.0f : 0.0f;
  write_pgm(Image(std::move(g)), path, 255);
}

MaskGrid read_mask_pgm(const fs::path& path) {
  const Image img = read_pgm(path);
  MaskGrid mask(img.width(), img.height());
  for (std::size_t i = 0; i < mask.size(); ++i) mask.data()[i] = img.grid().data()[i] > 0.0f ? 1 : 0;
  return mask;
}

// ---------------------------------------------------------------------------
// PLY

namespace {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

PlyType parse_ply_type(const std::string& name, std::size_t offset) {
  if (name == "char" || name == "int8") return PlyType::Int8;
  if (name == "uchar" || name == "uint8") return PlyType::UInt8;
  if (name == "short" || name == "int16") return PlyType::Int16;
  if (name == "ushort" || name == "uint16") return PlyType::UInt16;
  if (name == "int" || name == "int32") return PlyType::Int32;
  if (name == "uint" || name == "uint32") return PlyType::UInt32;
  if (name == "float" || name == "float32") return PlyType::Float32;
  if (name == "double" || name == "float64") return PlyType::Float64;
  fail(Errc::MalformedHeader, at_offset(offset, "unknown PLY property type '" + name + "'"));
}

std::size_t ply_type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

template <typename T>
T load_le(const char* p) {
  char buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

double load_ply_value(const char* p, PlyType t) {
  switch (t) {
    case PlyType::Int8: return load_le<std::int8_t>(p);
    case PlyType::UInt8: return load_le<std::uint8_t>(p);
    case PlyType::Int16: return load_le<std::int16_t>(p);
    case PlyType::UInt16: return load_le<std::uint16_t>(p);
    case PlyType::Int32: return load_le<std::int32_t>(p);
    case PlyType::UInt32: return load_le<std::uint32_t>(p);
    case PlyType::Float32: return load_le<float>(p);
    case PlyType::Float64: return load_le<double>(p);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type;
};

}  // namespace

PointCloud read_ply(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= bytes.size()) fail(Errc::MalformedHeader, at_offset(pos, "PLY header not terminated"));
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) end = bytes.size();
    std::string line = bytes.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end + 1;
    return line;
  };

  if (next_line() != "ply") fail(Errc::MalformedHeader, at_offset(0, "missing 'ply' magic"));

  PointCloud cloud;
  std::optional<PlyFormat> format;
  std::int64_t vertex_count = -1;
  bool in_vertex = false;
  bool vertex_seen = false;
  std::vector<PlyProperty> props;
  for (;;) {
    const std::size_t line_at = pos;
    const std::string line = next_line();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "end_header") break;
    if (key.empty() || key == "obj_info") continue;
    if (key == "comment") {
      std::string what, value;
      ls >> what >> value;
      if (what == "frame") {
        if (value == "world")
          cloud.frame = Frame::World;
        else if (value == "camera")
          cloud.frame = Frame::Camera;
        else
          fail(Errc::MalformedHeader, at_offset(line_at, "unknown frame tag '" + value + "'"));
      }
    } else if (key == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (version != "1.0") fail(Errc::UnsupportedFormat, at_offset(line_at, "PLY version " + version));
      if (fmt == "ascii")
        format = PlyFormat::Ascii;
      else if (fmt == "binary_little_endian")
        format = PlyFormat::BinaryLittleEndian;
      else
        fail(Errc::UnsupportedFormat, at_offset(line_at, "PLY format '" + fmt + "'"));
    } else if (key == "element") {
      std::string name;
      std::int64_t count = -1;
      ls >> name >> count;
      if (!ls || count < 0) fail(Errc::MalformedHeader, at_offset(line_at, "bad element line"));
      in_vertex = name == "vertex";
      if (in_vertex) {
        if (vertex_seen) fail(Errc::MalformedHeader, at_offset(line_at, "duplicate vertex element"));
        vertex_seen = true;
        if (count > kMaxPixels) fail(Errc::DimensionOverflow, at_offset(line_at, "vertex count"));
        vertex_count = count;
      } else if (!vertex_seen) {
        fail(Errc::UnsupportedFormat, at_offset(line_at, "vertex must be the first PLY element"));
      }
    } else if (key == "property") {
      std::string type;
      ls >> type;
      if (!in_vertex) continue;
      if (type == "list")
        fail(Errc::UnsupportedFormat, at_offset(line_at, "list properties on vertex"));
      std::string name;
      ls >> name;
      props.push_back({name, parse_ply_type(type, line_at)});
    } else {
      fail(Errc::MalformedHeader, at_offset(line_at, "unexpected header line '" + line + "'"));
    }
  }
  if (!format) fail(Errc::MalformedHeader, at_offset(0, "missing PLY format line"));
  if (vertex_count < 0) fail(Errc::MalformedHeader, at_offset(0, "missing vertex element"));

  int ix = -1, iy = -1, iz = -1, ii = -1;
  for (int k = 0; k < static_cast<int>(props.size()); ++k) {
    const auto& n = props[k].name;
    if (n == "x") ix = k;
    if (n == "y") iy = k;
    if (n == "z") iz = k;
    if (n == "intensity") ii = k;
  }
  if (ix < 0 || iy < 0 || iz < 0) fail(Errc::MalformedHeader, at_offset(0, "vertex lacks x/y/z"));

  const auto n = static_cast<std::size_t>(vertex_count);
  cloud.points.resize(n);
  if (ii >= 0) cloud.intensity.resize(n);
  std::vector<double> row(props.size());

  if (*format == PlyFormat::BinaryLittleEndian) {
    std::size_t stride = 0;
    for (const auto& p : props) stride += ply_type_size(p.type);
    if (bytes.size() - pos < stride * n)
      fail(Errc::TruncatedPayload, at_offset(bytes.size(), "PLY vertex payload too short"));
    const char* src = bytes.data() + pos;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < props.size(); ++k) {
        row[k] = load_ply_value(src, props[k].type);
        src += ply_type_size(props[k].type);
      }
      cloud.points[i] = {row[ix], row[iy], row[iz]};
      if (ii >= 0) cloud.intensity[i] = static_cast<float>(row[ii]);
    }
  } else {
    const char* cursor = bytes.data() + pos;
    const char* end = bytes.data() + bytes.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < props.size(); ++k) {
        while (cursor < end && std::isspace(static_cast<unsigned char>(*cursor))) ++cursor;
        if (cursor >= end)
          fail(Errc::TruncatedPayload, at_offset(bytes.size(), "PLY ascii payload too short"));
        auto [ptr, ec] = std::from_chars(cursor, end, row[k]);
        if (ec != std::errc())
          fail(Errc::InvalidValue,
               at_offset(static_cast<std::size_t>(cursor - bytes.data()), "bad PLY ascii value"));
        cursor = ptr;
      }
      cloud.points[i] = {row[ix], row[iy], row[iz]};
      if (ii >= 0) cloud.intensity[i] = static_cast<float>(row[ii]);
    }
  }
  cloud.validate();
  return cloud;
}

void write_ply(const PointCloud& cloud, const fs::path& path, PlyFormat format) {
  cloud.validate();
  const bool ascii = format == PlyFormat::Ascii;
  std::ostringstream header;
  header << "ply\n"
         << "format " << (ascii ? "ascii" : "binary_little_endian") << " 1.0\n"
         << "comment frame " << (cloud.frame == Frame::World ? "world" : "camera") << "\n"
         << "element vertex " << cloud.size() << "\n"
         << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_intensity()) header << "property float intensity\n";
  header << "end_header\n";

  std::string out = std::move(header).str();
  if (ascii) {
    std::ostringstream body;
    body << std::setprecision(17);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto& p = cloud.points[i];
      body << p.x() << ' ' << p.y() << ' ' << p.z();
      if (cloud.has_intensity()) body << ' ' << std::setprecision(9) << cloud.intensity[i] << std::setprecision(17);
      body << '\n';
    }
    out += std::move(body).str();
  } else {
    out.reserve(out.size() + cloud.size() * (24 + (cloud.has_intensity() ? 4 : 0)));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto& p = cloud.points[i];
      append_le(out, p.x());
      append_le(out, p.y());
      append_le(out, p.z());
      if (cloud.has_intensity()) append_le(out, cloud.intensity[i]);
    }
  }
  write_file(path, out);
}

// ---------------------------------------------------------------------------
// CSV

WaveSeries read_series_csv(const fs::path& path, const std::string& probe_id) {
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  std::string line;
  std::size_t offset = 0;
  auto trim = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  };
  if (!std::getline(in, line) || trim(line) != "t,eta")
    fail(Errc::MalformedHeader, at_offset(0, "CSV header must be 't,eta'"));
  offset += line.size() + 1;

  std::vector<double> t;
  WaveSeries series;
  series.probe_id = probe_id;
  while (std::getline(in, line)) {
    const std::string row = trim(line);
    const std::size_t row_at = offset;
    offset += line.size() + 1;
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string::npos) fail(Errc::InvalidValue, at_offset(row_at, "CSV row lacks a comma"));
    double tv = 0.0, ev = 0.0;
    auto r1 = std::from_chars(row.data(), row.data() + comma, tv);
    auto r2 = std::from_chars(row.data() + comma + 1, row.data() + row.size(), ev);
    if (r1.ec != std::errc() || r1.ptr != row.data() + comma || r2.ec != std::errc() ||
        r2.ptr != row.data() + row.size())
      fail(Errc::InvalidValue, at_offset(row_at, "bad CSV number"));
    t.push_back(tv);
    series.eta.push_back(ev);
  }
  if (t.size() < 2) fail(Errc::InvalidValue, "series CSV needs at least two rows to recover dt");
  series.t0 = t.front();
  series.dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i] - series.time(i)) > 1e-6 * std::abs(series.dt))
      fail(Errc::InvalidValue, "series CSV is not uniformly sampled at row " + std::to_string(i + 1));
  }
  series.validate();
  return series;
}

void write_series_csv(const WaveSeries& series, const fs::path& path) {
  series.validate();
  std::ostringstream out;
  out << "t,eta\n" << std::setprecision(17);
  for (std::size_t i = 0; i < series.size(); ++i) out << series.time(i) << ',' << series.eta[i] << '\n';
  write_file(path, std::move(out).str());
}

// ---------------------------------------------------------------------------
// Calibration / JSON

nlohmann::json read_json(const fs::path& path) {
  const std::string bytes = read_file(path);
  try {
    return nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::MalformedHeader, path.string() + ": " + e.what());
  }
}

void write_json(const nlohmann::json& doc, const fs::path& path) { write_file(path, doc.dump(2) + "\n"); }

StereoRig calibration_from_json(const nlohmann::json& doc) {
  auto number = [&](const char* key) -> double {
    if (!doc.contains(key)) fail(Errc::MissingKey, std::string("calibration key '") + key + "' missing");
    if (!doc[key].is_number()) fail(Errc::InvalidValue, std::string("calibration key '") + key + "' is not a number");
    return doc[key].get<double>();
  };
  auto array = [&](const char* key) -> std::vector<double> {
    if (!doc.contains(key)) fail(Errc::MissingKey, std::string("calibration key '") + key + "' missing");
    const auto& a = doc[key];
    if (!a.is_array()) fail(Errc::InvalidValue, std::string("calibration key '") + key + "' is not an array");
    std::vector<double> out;
    for (const auto& x : a) {
      if (!x.is_number()) fail(Errc::InvalidValue, std::string("non-numeric entry in '") + key + "'");
      out.push_back(x.get<double>());
    }
    return out;
  };

  const double f_mm = number("f_mm");
  const double pitch_um = number("pixel_pitch_um");
  const double baseline = number("baseline_m");
  const double u0 = number("u0");
  const double v0 = number("v0");
  const double w = number("width");
  const double h = number("height");
  const auto rot = array("rotation");
  const auto trans = array("translation");

  if (!(f_mm > 0.0)) fail(Errc::NonpositiveParameter, "f_mm must be > 0");
  if (!(pitch_um > 0.0)) fail(Errc::NonpositiveParameter, "pixel_pitch_um must be > 0");
  if (!(baseline > 0.0)) fail(Errc::NonpositiveParameter, "baseline_m must be > 0");
  if (!(w >= 1.0) || !(h >= 1.0) || w != std::floor(w) || h != std::floor(h))
    fail(Errc::NonpositiveParameter, "width/height must be positive integers");

  Eigen::Matrix3d R;
  if (rot.size() == 9) {
    R << rot[0], rot[1], rot[2], rot[3], rot[4], rot[5], rot[6], rot[7], rot[8];
  } else if (rot.size() == 3) {
    const Eigen::Vector3d aa(rot[0], rot[1], rot[2]);
    const double angle = aa.norm();
    R = angle > 0.0 ? Eigen::AngleAxisd(angle, aa / angle).toRotationMatrix()
                    : Eigen::Matrix3d::Identity();
  } else {
    fail(Errc::InvalidValue, "rotation must have 9 (matrix) or 3 (axis-angle) entries");
  }
  if (trans.size() != 3) fail(Errc::InvalidValue, "translation must have 3 entries");

  return StereoRig::from_metric(f_mm * 1e-3, pitch_um * 1e-6, baseline, u0, v0, static_cast<int>(w),
                                static_cast<int>(h), R, Eigen::Vector3d(trans[0], trans[1], trans[2]));
}

StereoRig read_calibration(const fs::path& path) { return calibration_from_json(read_json(path)); }

nlohmann::json calibration_to_json(const StereoRig& rig) {
  nlohmann::json doc;
  doc["f_mm"] = rig.f_m * 1e3;
  doc["pixel_pitch_um"] = rig.pixel_pitch * 1e6;
  doc["baseline_m"] = rig.baseline;
  doc["u0"] = rig.u0;
  doc["v0"] = rig.v0;
  doc["width"] = rig.width;
  doc["height"] = rig.height;
  std::vector<double> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.push_back(rig.R_cw(i, j));
  doc["rotation"] = r;
  doc["translation"] = {rig.t_cw.x(), rig.t_cw.y(), rig.t_cw.z()};
  return doc;
}

void write_calibration(const StereoRig& rig, const fs::path& path) {
  write_json(calibration_to_json(rig), path);
}

}  // namespace wavestereo::io
