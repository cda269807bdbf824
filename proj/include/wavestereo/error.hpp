#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavestereo {

// Every failure the toolkit reports carries one of these codes. The CLI maps
// them onto the "error" field of its JSON error report.
enum class Errc {
  // I/O and formats
  FileNotFound,
  IoFailure,
  MalformedHeader,
  DimensionOverflow,
  TruncatedPayload,
  UnsupportedChannels,
  UnsupportedFormat,
  // calibration / invariants
  MissingKey,
  NonOrthonormalRotation,
  ReflectionNotAllowed,
  NonpositiveParameter,
  InvalidValue,
  InvalidArgument,
  DimensionMismatch,
  // geometry
  NonpositiveDisparity,
  NonpositiveDepth,
  // scene oracle
  DispersionNoConvergence,
  RayMiss,
  ProbeOutsideExtent,
  // matching / adaptation
  AllMasked,
  DegenerateRange,
  // reconstruction
  TooFewPoints,
  ConsensusFailure,
  DegenerateOrientation,
  EmptyCloud,
  ProbeStarved,
  TooFewCrossings,
  ZeroVariance,
  DegenerateSpread,
  // metrics / budget
  NoValidPixels,
  EmptyEdgeSet,
  BadRange,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return to_string(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace wavestereo
