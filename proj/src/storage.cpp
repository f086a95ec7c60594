#include "lgcp/storage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "lgcp/error.hpp"

namespace lgcp {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kCounterOffset = 48;

void putU64(std::vector<char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t getU64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

void encodeDoubles(std::span<const double> in, std::vector<char>& out) {
  out.resize(in.size() * 8);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), in.data(), out.size());
  } else {
    for (std::size_t i = 0; i < in.size(); ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(in[i]);
      for (int b = 0; b < 8; ++b) out[8 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
}

void decodeDoubles(const char* in, std::span<double> out) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), in, out.size() * 8);
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::bit_cast<double>(getU64(in + 8 * i));
  }
}

std::vector<char> encodeHeader(const StoreHeader& h) {
  std::vector<char> buf(kStoreMagic, kStoreMagic + 8);
  putU64(buf, h.version);
  putU64(buf, h.nx);
  putU64(buf, h.ny);
  putU64(buf, h.sliceCount);
  putU64(buf, h.sampleCapacity);
  putU64(buf, h.samplesWritten);
  putU64(buf, std::bit_cast<std::uint64_t>(h.cellwidth));
  putU64(buf, std::bit_cast<std::uint64_t>(h.x0));
  putU64(buf, std::bit_cast<std::uint64_t>(h.y0));
  putU64(buf, h.lastonly ? 1 : 0);
  for (auto t : h.timeLabels) putU64(buf, static_cast<std::uint64_t>(t));
  return buf;
}

struct Resolved {
  std::size_t first = 0;  // 0-based
  std::size_t count = 0;
};

Resolved resolve(const AxisSelection& sel, std::uint64_t extent, const char* axis) {
  if (!sel) return {0, static_cast<std::size_t>(extent)};
  const auto [a, b] = *sel;
  if (a < 1 || b < a || static_cast<std::uint64_t>(b) > extent) {
    throw Error(ErrorCode::IndexOutOfRange,
                std::string(axis) + " range [" + std::to_string(a) + ", " + std::to_string(b) +
                    "] outside 1.." + std::to_string(extent));
  }
  return {static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - a + 1)};
}

}  // namespace

std::uint64_t projectedStoreBytes(std::uint64_t nx, std::uint64_t ny, std::uint64_t sliceCount,
                                  std::uint64_t sampleCapacity) {
  return sampleCapacity * sliceCount * nx * ny * 8;
}

double toMebibytes(std::uint64_t bytes) { return static_cast<double>(bytes) / (1024.0 * 1024.0); }

fs::path SampleStore::sidecarPath(const fs::path& path) {
  fs::path p = path;
  return p.replace_extension(".meta.json");
}

SampleStore SampleStore::create(const fs::path& path, std::uint64_t nx, std::uint64_t ny,
                                std::uint64_t sliceCount, std::uint64_t sampleCapacity,
                                const StoreCreateOptions& options) {
  if (nx == 0 || ny == 0 || sliceCount == 0 || sampleCapacity == 0) {
    throw Error(ErrorCode::InvalidArgument, "store dimensions must be positive");
  }
  if (!options.timeLabels.empty() && options.timeLabels.size() != sliceCount) {
    throw Error(ErrorCode::DimMismatch, "one time label per slice is required");
  }
  if (fs::exists(path) && !options.force) {
    throw Error(ErrorCode::PathExists, "store already exists: " + path.string());
  }
  const std::uint64_t bytes = projectedStoreBytes(nx, ny, sliceCount, sampleCapacity);
  if (!options.force && !(options.confirm && options.confirm(bytes))) {
    throw Error(ErrorCode::DiskSpaceWarningDeclined,
                "store would need " + std::to_string(bytes) + " bytes; not confirmed");
  }
  std::error_code ec;
  const fs::path dir = fs::absolute(path).parent_path();
  const auto space = fs::space(dir, ec);
  if (!ec && space.available < bytes) {
    throw Error(ErrorCode::DiskFull, "store needs " + std::to_string(bytes) + " bytes but only " +
                                         std::to_string(space.available) + " are available");
  }

  SampleStore s;
  s.path_ = path;
  s.header_.nx = nx;
  s.header_.ny = ny;
  s.header_.sliceCount = sliceCount;
  s.header_.sampleCapacity = sampleCapacity;
  s.header_.cellwidth = options.cellwidth;
  s.header_.x0 = options.x0;
  s.header_.y0 = options.y0;
  s.header_.lastonly = options.lastonly;
  s.header_.timeLabels = options.timeLabels;
  if (s.header_.timeLabels.empty()) {
    for (std::uint64_t i = 0; i < sliceCount; ++i) {
      s.header_.timeLabels.push_back(static_cast<std::int64_t>(i + 1));
    }
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const auto buf = encodeHeader(s.header_);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error(ErrorCode::IoError, "cannot write store header: " + path.string());
  }
  {
    std::ofstream meta(sidecarPath(path), std::ios::trunc);
    meta << options.metaJson;
    if (!meta) throw Error(ErrorCode::IoError, "cannot write store sidecar");
  }
  s.file_.open(path, std::ios::binary | std::ios::in | std::ios::out);
  if (!s.file_) throw Error(ErrorCode::IoError, "cannot reopen store: " + path.string());
  return s;
}

SampleStore SampleStore::open(const fs::path& path, OpenMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open store: " + path.string());
  char fixed[88];
  in.read(fixed, sizeof fixed);
  if (in.gcount() != static_cast<std::streamsize>(sizeof fixed) ||
      std::memcmp(fixed, kStoreMagic, 8) != 0) {
    throw Error(ErrorCode::CorruptStore, "not an LGD1 store: " + path.string());
  }
  SampleStore s;
  s.path_ = path;
  auto& h = s.header_;
  h.version = getU64(fixed + 8);
  h.nx = getU64(fixed + 16);
  h.ny = getU64(fixed + 24);
  h.sliceCount = getU64(fixed + 32);
  h.sampleCapacity = getU64(fixed + 40);
  h.samplesWritten = getU64(fixed + 48);
  h.cellwidth = std::bit_cast<double>(getU64(fixed + 56));
  h.x0 = std::bit_cast<double>(getU64(fixed + 64));
  h.y0 = std::bit_cast<double>(getU64(fixed + 72));
  h.lastonly = getU64(fixed + 80) != 0;
  if (h.version != kStoreVersion || h.nx == 0 || h.ny == 0 || h.sliceCount == 0 ||
      h.sliceCount > (1u << 20) || h.samplesWritten > h.sampleCapacity) {
    throw Error(ErrorCode::CorruptStore, "invalid LGD1 header: " + path.string());
  }
  std::vector<char> labels(8 * h.sliceCount);
  in.read(labels.data(), static_cast<std::streamsize>(labels.size()));
  if (in.gcount() != static_cast<std::streamsize>(labels.size())) {
    throw Error(ErrorCode::CorruptStore, "truncated LGD1 header: " + path.string());
  }
  for (std::uint64_t i = 0; i < h.sliceCount; ++i) {
    h.timeLabels.push_back(static_cast<std::int64_t>(getU64(labels.data() + 8 * i)));
  }
  in.close();

  const std::uint64_t committed = h.headerSize() + h.samplesWritten * h.frameBytes();
  const std::uint64_t actual = fs::file_size(path);
  if (actual < committed) {
    throw Error(ErrorCode::CorruptStore, "store shorter than its committed frames");
  }
  if (actual > committed && mode == OpenMode::Append) fs::resize_file(path, committed);
  const auto flags = mode == OpenMode::Append ? std::ios::binary | std::ios::in | std::ios::out
                                              : std::ios::binary | std::ios::in;
  s.file_.open(path, flags);
  if (!s.file_) throw Error(ErrorCode::IoError, "cannot open store: " + path.string());
  return s;
}

std::string SampleStore::metaJson() const {
  std::ifstream in(sidecarPath(path_));
  if (!in) return "{}";
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void SampleStore::writeCounter() {
  std::vector<char> buf;
  putU64(buf, header_.samplesWritten);
  file_.seekp(static_cast<std::streamoff>(kCounterOffset));
  file_.write(buf.data(), 8);
  file_.flush();
  if (!file_) throw Error(ErrorCode::ShortWrite, "failed to update the sample counter");
}

void SampleStore::appendFrame(std::span<const double> frame) {
  if (frame.size() != header_.frameValues()) {
    throw Error(ErrorCode::DimMismatch, "frame has " + std::to_string(frame.size()) +
                                            " values, expected " +
                                            std::to_string(header_.frameValues()));
  }
  if (header_.samplesWritten >= header_.sampleCapacity) {
    throw Error(ErrorCode::CapacityExceeded, "store capacity of " +
                                                 std::to_string(header_.sampleCapacity) +
                                                 " samples reached");
  }
  std::vector<char> buf;
  encodeDoubles(frame, buf);
  file_.seekp(static_cast<std::streamoff>(header_.headerSize() +
                                          header_.samplesWritten * header_.frameBytes()));
  file_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  file_.flush();
  if (!file_) {
    file_.clear();
    std::error_code ec;
    const auto space = fs::space(fs::absolute(path_).parent_path(), ec);
    if (!ec && space.available < buf.size()) {
      throw Error(ErrorCode::DiskFull, "disk full while appending a frame");
    }
    throw Error(ErrorCode::ShortWrite, "short write while appending a frame");
  }
  ++header_.samplesWritten;
  writeCounter();
}

void SampleStore::appendFrame(const std::vector<Array2>& slices) {
  if (slices.size() != header_.sliceCount) {
    throw Error(ErrorCode::DimMismatch, "frame needs " + std::to_string(header_.sliceCount) +
                                            " slices");
  }
  std::vector<double> flat;
  flat.reserve(header_.frameValues());
  for (const auto& a : slices) {
    if (a.nx() != header_.nx || a.ny() != header_.ny) {
      throw Error(ErrorCode::DimMismatch, "slice dimensions do not match the store");
    }
    flat.insert(flat.end(), a.raw().begin(), a.raw().end());
  }
  appendFrame(flat);
}

void SampleStore::readFrame(std::uint64_t s, std::span<double> out) const {
  if (s >= header_.samplesWritten) {
    throw Error(ErrorCode::IndexOutOfRange, "sample " + std::to_string(s + 1) + " not in store",
                static_cast<std::int64_t>(s + 1));
  }
  if (out.size() != header_.frameValues()) {
    throw Error(ErrorCode::DimMismatch, "frame buffer size mismatch");
  }
  std::vector<char> buf(header_.frameBytes());
  file_.seekg(static_cast<std::streamoff>(header_.headerSize() + s * header_.frameBytes()));
  file_.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!file_) {
    file_.clear();
    throw Error(ErrorCode::CorruptStore, "failed to read frame " + std::to_string(s + 1));
  }
  decodeDoubles(buf.data(), out);
}

Array4 SampleStore::extract(AxisSelection x, AxisSelection y, AxisSelection t,
                            AxisSelection s) const {
  const Resolved rx = resolve(x, header_.nx, "x");
  const Resolved ry = resolve(y, header_.ny, "y");
  const Resolved rt = resolve(t, header_.sliceCount, "t");
  const Resolved rs = resolve(s, header_.samplesWritten, "s");
  Array4 out({rx.count, ry.count, rt.count, rs.count});
  std::vector<char> buf(8 * rx.count);
  std::vector<double> row(rx.count);
  const std::uint64_t sliceBytes = 8 * header_.nx * header_.ny;
  for (std::size_t si = 0; si < rs.count; ++si) {
    const std::uint64_t frameStart =
        header_.headerSize() + (rs.first + si) * header_.frameBytes();
    for (std::size_t ti = 0; ti < rt.count; ++ti) {
      for (std::size_t yi = 0; yi < ry.count; ++yi) {
        const std::uint64_t off = frameStart + (rt.first + ti) * sliceBytes +
                                  8 * ((ry.first + yi) * header_.nx + rx.first);
        file_.seekg(static_cast<std::streamoff>(off));
        file_.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!file_) {
          file_.clear();
          throw Error(ErrorCode::CorruptStore, "failed to read store data");
        }
        decodeDoubles(buf.data(), row);
        for (std::size_t xi = 0; xi < rx.count; ++xi) out(xi, yi, ti, si) = row[xi];
      }
    }
  }
  return out;
}

PolygonExtract SampleStore::extractPolygon(const PolygonWindow& window, AxisSelection t) const {
  const Resolved rt = resolve(t, header_.sliceCount, "t");
  PolygonExtract out;
  std::vector<std::size_t> flatIndex;
  for (std::size_t y = 0; y < header_.ny; ++y) {
    for (std::size_t x = 0; x < header_.nx; ++x) {
      const Point2 c{header_.x0 + (static_cast<double>(x) + 0.5) * header_.cellwidth,
                     header_.y0 + (static_cast<double>(y) + 0.5) * header_.cellwidth};
      if (window.contains(c)) {
        out.cells.push_back({x + 1, y + 1});
        flatIndex.push_back(y * header_.nx + x);
      }
    }
  }
  if (out.cells.empty()) {
    throw Error(ErrorCode::EmptyIntersection, "polygon contains no cell centroid");
  }
  out.sliceCount = rt.count;
  out.sampleCount = header_.samplesWritten;
  out.values.resize(out.cells.size() * rt.count * out.sampleCount);
  const std::size_t sliceValues = header_.nx * header_.ny;
  std::vector<char> buf(8 * sliceValues);
  std::vector<double> slice(sliceValues);
  for (std::size_t s = 0; s < out.sampleCount; ++s) {
    for (std::size_t ti = 0; ti < rt.count; ++ti) {
      const std::uint64_t off = header_.headerSize() + s * header_.frameBytes() +
                                (rt.first + ti) * 8 * sliceValues;
      file_.seekg(static_cast<std::streamoff>(off));
      file_.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      if (!file_) {
        file_.clear();
        throw Error(ErrorCode::CorruptStore, "failed to read store data");
      }
      decodeDoubles(buf.data(), slice);
      for (std::size_t c = 0; c < flatIndex.size(); ++c) {
        out.values[(s * rt.count + ti) * flatIndex.size() + c] = slice[flatIndex[c]];
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> SampleStore::expectation(
    const std::function<std::vector<double>(const Array2&)>& fn) const {
  const std::uint64_t n = header_.samplesWritten;
  if (n == 0) throw Error(ErrorCode::InsufficientSamples, "store holds no samples");
  const std::size_t slices = header_.sliceCount;
  std::vector<std::vector<double>> sums(slices);
  std::vector<double> frame(header_.frameValues());
  Array2 slice(header_.nx, header_.ny);
  const std::size_t sliceValues = header_.nx * header_.ny;
  for (std::uint64_t s = 0; s < n; ++s) {
    readFrame(s, frame);
    for (std::size_t t = 0; t < slices; ++t) {
      std::copy_n(frame.begin() + static_cast<std::ptrdiff_t>(t * sliceValues), sliceValues,
                  slice.raw().begin());
      const std::vector<double> v = fn(slice);
      if (s == 0) {
        sums[t].assign(v.size(), 0.0);
      } else if (v.size() != sums[t].size()) {
        throw Error(ErrorCode::DimMismatch, "expectation function changed its output size");
      }
      for (std::size_t i = 0; i < v.size(); ++i) sums[t][i] += v[i];
    }
  }
  for (auto& v : sums) {
    for (double& x : v) x /= static_cast<double>(n);
  }
  return sums;
}

double quantileType7(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw Error(ErrorCode::InsufficientSamples, "no data for quantile");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<std::vector<Array2>> SampleStore::quantile(const std::vector<double>& probs,
                                                       const std::function<double(double)>& fn,
                                                       std::size_t blockCells) const {
  if (probs.empty()) throw Error(ErrorCode::InvalidArgument, "no probabilities given");
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "quantile probabilities must lie in (0, 1)");
    }
  }
  const std::uint64_t n = header_.samplesWritten;
  if (n < 2) throw Error(ErrorCode::InsufficientSamples, "quantiles need at least 2 samples");
  blockCells = std::max<std::size_t>(1, blockCells);
  const std::size_t sliceValues = header_.nx * header_.ny;
  std::vector<std::vector<Array2>> out(header_.sliceCount);
  std::vector<char> buf;
  std::vector<double> row;
  std::vector<double> column(n);
  for (std::size_t t = 0; t < header_.sliceCount; ++t) {
    out[t].assign(probs.size(), Array2(header_.nx, header_.ny));
    for (std::size_t c0 = 0; c0 < sliceValues; c0 += blockCells) {
      const std::size_t width = std::min(blockCells, sliceValues - c0);
      std::vector<double> block(width * n);  // block[c * n + s]
      buf.resize(8 * width);
      row.resize(width);
      for (std::uint64_t s = 0; s < n; ++s) {
        const std::uint64_t off =
            header_.headerSize() + s * header_.frameBytes() + 8 * (t * sliceValues + c0);
        file_.seekg(static_cast<std::streamoff>(off));
        file_.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!file_) {
          file_.clear();
          throw Error(ErrorCode::CorruptStore, "failed to read store data");
        }
        decodeDoubles(buf.data(), row);
        for (std::size_t c = 0; c < width; ++c) block[c * n + s] = fn(row[c]);
      }
      for (std::size_t c = 0; c < width; ++c) {
        std::copy_n(block.begin() + static_cast<std::ptrdiff_t>(c * n), n, column.begin());
        std::sort(column.begin(), column.end());
        for (std::size_t k = 0; k < probs.size(); ++k) {
          out[t][k][c0 + c] = quantileType7(column, probs[k]);
        }
      }
    }
  }
  return out;
}

AsyncFrameWriter::AsyncFrameWriter(SampleStore& store, std::size_t capacity)
    : store_(store), capacity_(std::max<std::size_t>(1, capacity)) {
  worker_ = std::thread([this] { run(); });
}

AsyncFrameWriter::~AsyncFrameWriter() {
  try {
    finish();
  } catch (...) {
  }
}

void AsyncFrameWriter::push(std::vector<double> frame) {
  std::unique_lock lock(mutex_);
  notFull_.wait(lock, [&] { return queue_.size() < capacity_ || failure_; });
  if (failure_) std::rethrow_exception(failure_);
  queue_.push_back(std::move(frame));
  notEmpty_.notify_one();
}

void AsyncFrameWriter::finish() {
  {
    std::lock_guard lock(mutex_);
    done_ = true;
  }
  notEmpty_.notify_all();
  if (worker_.joinable()) worker_.join();
  std::lock_guard lock(mutex_);
  if (failure_) {
    auto f = failure_;
    failure_ = nullptr;
    std::rethrow_exception(f);
  }
}

void AsyncFrameWriter::run() {
  for (;;) {
    std::vector<double> frame;
    {
      std::unique_lock lock(mutex_);
      notEmpty_.wait(lock, [&] { return !queue_.empty() || done_; });
      if (queue_.empty()) return;
      frame = std::move(queue_.front());
      queue_.pop_front();
    }
    notFull_.notify_one();
    try {
      store_.appendFrame(frame);
    } catch (...) {
      std::lock_guard lock(mutex_);
      failure_ = std::current_exception();
      queue_.clear();
      notFull_.notify_all();
      return;
    }
  }
}

}  // namespace lgcp
