#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "lgcp/covariance.hpp"
#include "lgcp/geometry.hpp"
#include "lgcp/intensity.hpp"
#include "lgcp/io.hpp"

namespace lgcp {

/// JSON project file accumulating the outputs of each pipeline stage. Stage
/// artefacts are separate files whose paths are stored relative to the
/// project file.
class Project {
 public:
  /// A missing file yields an empty project bound to `path`.
  static Project load(const std::filesystem::path& path);
  void save() const;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path dir() const;
  std::filesystem::path resolve(const std::string& relative) const;

  io::Json& data() noexcept { return data_; }
  const io::Json& data() const noexcept { return data_; }

  /// Records a stage artefact path under `key`.
  void setArtifact(const std::string& key, const std::filesystem::path& file);
  std::optional<std::filesystem::path> artifact(const std::string& key) const;

  /// Throws InvalidArgument naming the missing stage.
  SpaceTimePointPattern pattern() const;
  std::optional<SpatialIntensity> lambda(const PolygonWindow& window) const;
  std::optional<TemporalIntensity> mu() const;
  /// Stored lambda, or uniform on a 64 x 64 grid over the window.
  SpatialIntensity lambdaOrUniform(const PolygonWindow& window) const;
  /// Stored mu, or the constant-in-time estimate.
  TemporalIntensity muOrConstant(const SpaceTimePointPattern& pattern) const;

  io::Json params() const;
  /// Merges `update` into the stored parameters after validation.
  io::Json mergeParams(const io::Json& update);
  /// Covariance model from stored parameters, with overrides taking priority.
  CovarianceModel model() const;

 private:
  std::filesystem::path path_;
  io::Json data_ = io::Json::object();
};

}  // namespace lgcp
