#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "lgcp/estimation.hpp"
#include "lgcp/io.hpp"
#include "lgcp/project.hpp"

namespace httplib {
class Server;
}

namespace lgcp {

using QueryParams = std::map<std::string, std::string>;

/// Request handlers behind the tuner HTTP API. Every method is safe to call
/// concurrently; project reads and the parameter write are serialized.
class TunerService {
 public:
  explicit TunerService(std::filesystem::path projectPath);

  /// kind = g | k | acf. Empirical summary on the default r grid or lags.
  io::Json summary(const QueryParams& q);
  std::string summaryCsv(const QueryParams& q);
  /// Theoretical curve at the empirical grid, plus the contrast (g, k) or
  /// profiled residual and scale (acf) against the empirical summary.
  io::Json theoretical(const QueryParams& q);
  /// Kernel lambda estimate block-averaged down to at most `size` cells a side.
  io::Json lambdaPreview(const QueryParams& q);
  io::Json params();
  io::Json saveParams(const io::Json& body);

 private:
  struct Cached;
  std::shared_ptr<const Cached> cached();
  const SecondOrderSummary& spatialSummary(const Cached& c, SummaryKind kind);

  std::filesystem::path projectPath_;
  std::mutex mutex_;
  std::shared_ptr<Cached> cache_;
};

/// HTTP front end for TunerService.
class TunerServer {
 public:
  explicit TunerServer(std::filesystem::path projectPath);
  ~TunerServer();

  /// Binds to `port` (0 picks a free one) and serves on a background
  /// thread. Returns the bound port.
  int start(const std::string& host, int port);
  /// Blocks serving until stop() is called from another thread.
  void listen(const std::string& host, int port);
  void stop();

 private:
  void routes();
  TunerService service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace lgcp
