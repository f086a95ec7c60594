#include "lgcp/project.hpp"

#include <cmath>

#include "lgcp/error.hpp"

namespace lgcp {

namespace fs = std::filesystem;

Project Project::load(const fs::path& path) {
  Project p;
  p.path_ = path;
  if (fs::exists(path)) {
    p.data_ = io::readJson(path);
    if (!p.data_.is_object()) throw Error(ErrorCode::ParseError, "project file must be an object");
  }
  return p;
}

void Project::save() const { io::writeJson(path_, data_); }

fs::path Project::dir() const {
  const fs::path parent = fs::absolute(path_).parent_path();
  return parent.empty() ? fs::current_path() : parent;
}

fs::path Project::resolve(const std::string& relative) const {
  const fs::path p(relative);
  return p.is_absolute() ? p : dir() / p;
}

void Project::setArtifact(const std::string& key, const fs::path& file) {
  const fs::path abs = fs::absolute(file);
  std::error_code ec;
  fs::path rel = fs::relative(abs, dir(), ec);
  data_["artifacts"][key] = (ec || rel.empty()) ? abs.string() : rel.string();
}

std::optional<fs::path> Project::artifact(const std::string& key) const {
  if (!data_.contains("artifacts") || !data_["artifacts"].contains(key)) return std::nullopt;
  return resolve(data_["artifacts"][key].get<std::string>());
}

SpaceTimePointPattern Project::pattern() const {
  const auto p = artifact("pattern");
  if (!p) throw Error(ErrorCode::InvalidArgument, "project has no pattern; run `lgcp ingest` first");
  return io::patternFromJson(io::readJson(*p));
}

std::optional<SpatialIntensity> Project::lambda(const PolygonWindow& window) const {
  const auto p = artifact("lambda");
  if (!p) return std::nullopt;
  return io::spatialFromJson(io::readJson(*p), window);
}

std::optional<TemporalIntensity> Project::mu() const {
  const auto p = artifact("mu");
  if (!p) return std::nullopt;
  return io::temporalFromJson(io::readJson(*p));
}

SpatialIntensity Project::lambdaOrUniform(const PolygonWindow& window) const {
  auto l = lambda(window);
  return l ? *l : SpatialIntensity::uniform(buildGrid(window, 64, 64));
}

TemporalIntensity Project::muOrConstant(const SpaceTimePointPattern& pattern) const {
  auto m = mu();
  return m ? *m : constantInTime(pattern);
}

io::Json Project::params() const {
  return data_.contains("params") ? data_["params"] : io::Json::object();
}

io::Json Project::mergeParams(const io::Json& update) {
  if (!update.is_object()) throw Error(ErrorCode::InvalidArgument, "parameters must be an object");
  static const char* numeric[] = {"sigma", "phi", "theta", "nu", "bandwidth", "adjust"};
  io::Json merged = params();
  for (const auto& [key, value] : update.items()) {
    bool known = key == "family";
    for (const char* n : numeric) {
      if (key == n) {
        known = true;
        if (!value.is_number() || !std::isfinite(value.get<double>()) || value.get<double>() < 0) {
          throw Error(ErrorCode::InvalidArgument, "parameter '" + key + "' must be a number >= 0");
        }
      }
    }
    if (!known) throw Error(ErrorCode::InvalidArgument, "unknown parameter '" + key + "'");
    if (key == "family") parseFamily(value.get<std::string>());
    merged[key] = value;
  }
  data_["params"] = merged;
  return merged;
}

CovarianceModel Project::model() const {
  const io::Json p = params();
  CovarianceModel m;
  m.family = parseFamily(p.value("family", std::string("exponential")));
  m.sigma = p.value("sigma", 1.0);
  m.phi = p.value("phi", 1.0);
  m.theta = p.value("theta", 1.0);
  m.nu = p.value("nu", 0.5);
  return m;
}

}  // namespace lgcp
