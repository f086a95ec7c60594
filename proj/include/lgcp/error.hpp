#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lgcp {

enum class ErrorCode {
  // geometry
  InvalidWindow,
  PointOutsideWindow,
  TimeOutsideTlim,
  InvalidCellwidth,
  DegenerateWindow,
  TimeIndexOutOfRange,
  // intensity
  EmptyPattern,
  NonpositiveBandwidth,
  DegenerateTimeWindow,
  ZeroIntensity,
  // covariance
  NegativeDistance,
  NegativeLag,
  EmbeddingNotPSD,
  DimMismatch,
  // estimation
  TooFewEvents,
  SeriesTooShort,
  ZeroVariance,
  InvalidArgument,
  // inference
  NonFiniteTarget,
  EmptyThresholds,
  NonAscending,
  // storage
  PathExists,
  DiskSpaceWarningDeclined,
  CapacityExceeded,
  ShortWrite,
  IndexOutOfRange,
  EmptyIntersection,
  InsufficientSamples,
  CorruptStore,
  DiskFull,
  IoError,
  // input formats
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code and, where it applies, the
/// zero-based index of the offending input record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::int64_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::int64_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::int64_t> index_;
};

}  // namespace lgcp
