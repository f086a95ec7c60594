#pragma once

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "lgcp/array.hpp"
#include "lgcp/geometry.hpp"

namespace lgcp {

/// Magic bytes opening every LGD1 store.
inline constexpr char kStoreMagic[8] = {'L', 'G', 'C', 'P', 'D', 'M', 'P', '1'};
inline constexpr std::uint64_t kStoreVersion = 1;

struct StoreHeader {
  std::uint64_t version = kStoreVersion;
  std::uint64_t nx = 0;
  std::uint64_t ny = 0;
  std::uint64_t sliceCount = 0;
  std::uint64_t sampleCapacity = 0;
  std::uint64_t samplesWritten = 0;
  double cellwidth = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  bool lastonly = false;
  std::vector<std::int64_t> timeLabels;  // one per slice

  std::uint64_t headerSize() const noexcept { return 88 + 8 * sliceCount; }
  std::uint64_t frameValues() const noexcept { return sliceCount * nx * ny; }
  std::uint64_t frameBytes() const noexcept { return 8 * frameValues(); }
};

/// Bytes needed for `sampleCapacity` frames of sliceCount x nx x ny doubles.
std::uint64_t projectedStoreBytes(std::uint64_t nx, std::uint64_t ny,
                                  std::uint64_t sliceCount, std::uint64_t sampleCapacity);

/// Size in mebibytes, the unit used when warning about disk usage.
double toMebibytes(std::uint64_t bytes);

struct StoreCreateOptions {
  bool force = false;
  bool lastonly = false;
  double cellwidth = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<std::int64_t> timeLabels;
  /// Sidecar metadata written next to the store as `<stem>.meta.json`.
  std::string metaJson = "{}";
  /// Asked with the projected byte count unless `force`; returning false
  /// aborts with DiskSpaceWarningDeclined.
  std::function<bool(std::uint64_t)> confirm;
};

/// 1-based inclusive index range; nullopt selects the whole axis.
struct IndexRange {
  std::int64_t first = 1;
  std::int64_t last = 1;
  static IndexRange single(std::int64_t i) { return {i, i}; }
};
using AxisSelection = std::optional<IndexRange>;

/// Cells of a polygon extraction: 1-based (x, y) pairs and values laid out
/// as values[(s * slices + t) * cells + c].
struct PolygonExtract {
  std::vector<std::array<std::size_t, 2>> cells;
  std::size_t sliceCount = 0;
  std::size_t sampleCount = 0;
  std::vector<double> values;
  double at(std::size_t cell, std::size_t slice, std::size_t sample) const {
    return values[(sample * sliceCount + slice) * cells.size() + cell];
  }
};

/// Disk-backed LGD1 store of sampled fields. Single writer, any number of
/// readers; the sample counter is only advanced after the frame is flushed.
class SampleStore {
 public:
  static SampleStore create(const std::filesystem::path& path, std::uint64_t nx,
                            std::uint64_t ny, std::uint64_t sliceCount,
                            std::uint64_t sampleCapacity, const StoreCreateOptions& options);
  enum class OpenMode { Read, Append };
  /// Opens an existing store. Bytes past the last committed frame are
  /// ignored when reading and truncated away when opened for appending.
  static SampleStore open(const std::filesystem::path& path, OpenMode mode = OpenMode::Read);

  SampleStore(SampleStore&&) noexcept = default;
  SampleStore& operator=(SampleStore&&) noexcept = default;

  const StoreHeader& header() const noexcept { return header_; }
  const std::filesystem::path& path() const noexcept { return path_; }
  std::uint64_t samples() const noexcept { return header_.samplesWritten; }
  static std::filesystem::path sidecarPath(const std::filesystem::path& path);
  std::string metaJson() const;

  /// Frame is slice-major then row-major with x fastest.
  void appendFrame(std::span<const double> frame);
  void appendFrame(const std::vector<Array2>& slices);

  /// Reads sample `s` (0-based) into `out` (frameValues doubles).
  void readFrame(std::uint64_t s, std::span<double> out) const;

  Array4 extract(AxisSelection x, AxisSelection y, AxisSelection t, AxisSelection s) const;
  PolygonExtract extractPolygon(const PolygonWindow& window, AxisSelection t) const;

  /// Streaming mean over samples of fn applied to each slice. fn maps an
  /// nx x ny slice to a vector whose length is fixed across calls.
  std::vector<std::vector<double>> expectation(
      const std::function<std::vector<double>(const Array2&)>& fn) const;

  /// Cellwise type-7 quantiles of fn(Y); result[slice][prob] is nx x ny.
  std::vector<std::vector<Array2>> quantile(const std::vector<double>& probs,
                                            const std::function<double(double)>& fn,
                                            std::size_t blockCells = 4096) const;

 private:
  SampleStore() = default;
  void writeCounter();

  std::filesystem::path path_;
  StoreHeader header_;
  mutable std::fstream file_;
};

/// Type-7 sample quantile of already sorted data.
double quantileType7(const std::vector<double>& sorted, double prob);

/// Sole writer of a store, fed from a bounded queue by the sampling thread.
class AsyncFrameWriter {
 public:
  AsyncFrameWriter(SampleStore& store, std::size_t capacity = 8);
  ~AsyncFrameWriter();
  AsyncFrameWriter(const AsyncFrameWriter&) = delete;
  AsyncFrameWriter& operator=(const AsyncFrameWriter&) = delete;

  /// Blocks while the queue is full. Rethrows an earlier writer failure.
  void push(std::vector<double> frame);
  /// Drains the queue, joins the thread and rethrows any writer failure.
  void finish();

 private:
  void run();

  SampleStore& store_;
  std::size_t capacity_;
  std::deque<std::vector<double>> queue_;
  std::mutex mutex_;
  std::condition_variable notEmpty_;
  std::condition_variable notFull_;
  bool done_ = false;
  std::exception_ptr failure_;
  std::thread worker_;
};

}  // namespace lgcp
