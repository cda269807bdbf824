#include "wavestereo/error.hpp"

namespace wavestereo {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::IoFailure: return "IoFailure";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::DimensionOverflow: return "DimensionOverflow";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::UnsupportedChannels: return "UnsupportedChannels";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::MissingKey: return "MissingKey";
    case Errc::NonOrthonormalRotation: return "NonOrthonormalRotation";
    case Errc::ReflectionNotAllowed: return "ReflectionNotAllowed";
    case Errc::NonpositiveParameter: return "NonpositiveParameter";
    case Errc::InvalidValue: return "InvalidValue";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonpositiveDisparity: return "NonpositiveDisparity";
    case Errc::NonpositiveDepth: return "NonpositiveDepth";
    case Errc::DispersionNoConvergence: return "DispersionNoConvergence";
    case Errc::RayMiss: return "RayMiss";
    case Errc::ProbeOutsideExtent: return "ProbeOutsideExtent";
    case Errc::AllMasked: return "AllMasked";
    case Errc::DegenerateRange: return "DegenerateRange";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::ConsensusFailure: return "ConsensusFailure";
    case Errc::DegenerateOrientation: return "DegenerateOrientation";
    case Errc::EmptyCloud: return "EmptyCloud";
    case Errc::ProbeStarved: return "ProbeStarved";
    case Errc::TooFewCrossings: return "TooFewCrossings";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DegenerateSpread: return "DegenerateSpread";
    case Errc::NoValidPixels: return "NoValidPixels";
    case Errc::EmptyEdgeSet: return "EmptyEdgeSet";
    case Errc::BadRange: return "BadRange";
  }
  return "Unknown";
}

}  // namespace wavestereo
