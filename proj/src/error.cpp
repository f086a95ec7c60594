#include "lgcp/error.hpp"

namespace lgcp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::PointOutsideWindow: return "PointOutsideWindow";
    case ErrorCode::TimeOutsideTlim: return "TimeOutsideTlim";
    case ErrorCode::InvalidCellwidth: return "InvalidCellwidth";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::TimeIndexOutOfRange: return "TimeIndexOutOfRange";
    case ErrorCode::EmptyPattern: return "EmptyPattern";
    case ErrorCode::NonpositiveBandwidth: return "NonpositiveBandwidth";
    case ErrorCode::DegenerateTimeWindow: return "DegenerateTimeWindow";
    case ErrorCode::ZeroIntensity: return "ZeroIntensity";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::NegativeLag: return "NegativeLag";
    case ErrorCode::EmbeddingNotPSD: return "EmbeddingNotPSD";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::TooFewEvents: return "TooFewEvents";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteTarget: return "NonFiniteTarget";
    case ErrorCode::EmptyThresholds: return "EmptyThresholds";
    case ErrorCode::NonAscending: return "NonAscending";
    case ErrorCode::PathExists: return "PathExists";
    case ErrorCode::DiskSpaceWarningDeclined: return "DiskSpaceWarningDeclined";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::ShortWrite: return "ShortWrite";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::CorruptStore: return "CorruptStore";
    case ErrorCode::DiskFull: return "DiskFull";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::int64_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      index_(index) {}

}  // namespace lgcp
