#include "lgcp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lgcp/error.hpp"
#include "lgcp/estimation.hpp"
#include "lgcp/inference.hpp"
#include "lgcp/io.hpp"
#include "lgcp/plot.hpp"
#include "lgcp/project.hpp"
#include "lgcp/simulate.hpp"
#include "lgcp/storage.hpp"
#include "lgcp/tuner.hpp"

namespace lgcp::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

double parseNumber(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used == 0 || used != text.size()) {
    throw Error(ErrorCode::InvalidArgument, "'" + text + "' is not a number");
  }
  return v;
}

std::int64_t parseInteger(const std::string& text) {
  const double v = parseNumber(text);
  if (v != std::floor(v)) throw Error(ErrorCode::InvalidArgument, "'" + text + "' is not an integer");
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::vector<double> parseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parseNumber(item));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty list");
  return out;
}

std::pair<double, double> parsePair(const std::string& text) {
  const auto v = parseList(text);
  if (v.size() != 2) throw Error(ErrorCode::InvalidArgument, "expected 'a,b', got '" + text + "'");
  return {v[0], v[1]};
}

AxisSelection parseAxis(const std::string& text) {
  if (text == "all" || text == "-1") return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) return IndexRange::single(parseInteger(text));
  return IndexRange{parseInteger(text.substr(0, comma)), parseInteger(text.substr(comma + 1))};
}

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::istream& in;
  fs::path projectPath;

  Project project() const { return Project::load(projectPath); }
  fs::path defaultPath(const std::string& name) const { return project().dir() / name; }
  void notice(const Json& j) const { err << j.dump() << "\n"; }
};

std::pair<double, double> parseRange(const std::string& text) {
  const auto r = parsePair(text);
  if (!(r.first <= r.second)) throw Error(ErrorCode::InvalidArgument, "range '" + text + "' is empty");
  return r;
}

GridSpec gridFor(const PolygonWindow& window, const std::optional<double>& cellwidth,
                 const std::string& gridsize) {
  if (cellwidth) return buildGrid(window, *cellwidth);
  const auto [m, n] = parsePair(gridsize);
  if (m < 1 || n < 1 || m != std::floor(m) || n != std::floor(n)) {
    throw Error(ErrorCode::InvalidArgument, "grid size must be two positive integers");
  }
  return buildGrid(window, static_cast<std::size_t>(m), static_cast<std::size_t>(n));
}

Json rangeJson(std::pair<double, double> r) { return Json::array({r.first, r.second}); }

SecondOrderSummary spatialSummary(const Project& project, const SpaceTimePointPattern& pattern,
                                  SummaryKind kind) {
  const auto lambda = project.lambdaOrUniform(pattern.window());
  const auto mu = project.muOrConstant(pattern);
  const auto r = defaultRGrid(pattern.window());
  return kind == SummaryKind::Pcf ? ginhomAverage(pattern, lambda, mu, r)
                                  : kinhomAverage(pattern, lambda, mu, r);
}

void writeOrPrint(const Context& ctx, const std::string& out, const std::string& text) {
  if (out.empty()) {
    ctx.out << text;
  } else {
    io::writeText(out, text);
  }
}

// Subcommand: ingest

struct IngestArgs {
  std::string points, window, tlim, out;
};

void ingest(const Context& ctx, const IngestArgs& a) {
  const auto events = io::parsePointsCsv(io::readText(a.points));
  const auto window = io::parseWindowGeoJson(io::readJson(a.window));
  const auto [ta, tb] = parsePair(a.tlim);
  std::optional<SpaceTimePointPattern> pattern;
  try {
    pattern.emplace(events, window, TimeInterval{ta, tb});
  } catch (const Error& e) {
    if (e.index() && (e.code() == ErrorCode::PointOutsideWindow ||
                      e.code() == ErrorCode::TimeOutsideTlim)) {
      const auto row = *e.index() + 1;
      std::string detail = e.what();
      const std::string prefix = std::string(to_string(e.code())) + ": ";
      if (detail.rfind(prefix, 0) == 0) detail.erase(0, prefix.size());
      throw Error(e.code(),
                  "row " + std::to_string(row) + " (line " + std::to_string(row + 1) + " of " +
                      a.points + "): " + detail,
                  e.index());
    }
    throw;
  }
  const fs::path out = a.out.empty() ? ctx.defaultPath("pattern.json") : fs::path(a.out);
  io::writeJson(out, io::patternToJson(*pattern));
  Project project = ctx.project();
  project.setArtifact("pattern", out);
  project.save();
  ctx.out << pattern->summary();
}

// Subcommand: lambda

struct LambdaArgs {
  std::optional<double> bandwidth;
  double adjust = 1.0;
  std::optional<double> cellwidth;
  std::string gridsize = "64,64";
  std::string out;
};

void lambdaCmd(const Context& ctx, const LambdaArgs& a) {
  Project project = ctx.project();
  const auto pattern = project.pattern();
  const auto& window = pattern.window();
  Json defaults = Json::array();
  double bw = 0.0;
  if (a.bandwidth) {
    bw = *a.bandwidth;
  } else {
    bw = 0.1 * std::min(window.bbox().width(), window.bbox().height());
    defaults.push_back("bandwidth");
  }
  if (!a.cellwidth) defaults.push_back("gridsize");
  const GridSpec grid = gridFor(window, a.cellwidth, a.gridsize);
  const auto lambda = kernelLambda(pattern, grid, bw, a.adjust);
  const fs::path out = a.out.empty() ? ctx.defaultPath("lambda.json") : fs::path(a.out);
  io::writeJson(out, io::spatialToJson(lambda));
  project.setArtifact("lambda", out);
  project.mergeParams({{"bandwidth", bw}, {"adjust", a.adjust}});
  project.save();
  ctx.out << Json{{"output", out.string()},
                  {"bandwidth", bw},
                  {"adjust", a.adjust},
                  {"M", grid.nx},
                  {"N", grid.ny},
                  {"cellwidth", grid.cellwidth},
                  {"defaults", defaults}}
                 .dump(2)
          << "\n";
}

// Subcommand: mu

struct MuArgs {
  std::string method = "lowess";
  double f = 2.0 / 3.0;
  bool fDefault = true;
  std::string out;
};

void muCmd(const Context& ctx, const MuArgs& a) {
  Project project = ctx.project();
  const auto pattern = project.pattern();
  std::optional<TemporalIntensity> mu;
  if (a.method == "lowess") {
    mu = muEstimate(pattern, a.f);
  } else if (a.method == "constant") {
    mu = constantInTime(pattern);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown mu method '" + a.method + "'");
  }
  const fs::path out = a.out.empty() ? ctx.defaultPath("mu.json") : fs::path(a.out);
  io::writeJson(out, io::temporalToJson(*mu));
  project.setArtifact("mu", out);
  project.save();
  Json report{{"output", out.string()}, {"method", a.method}};
  if (a.method == "lowess") {
    report["f"] = a.f;
    report["defaults"] = a.fDefault ? Json::array({"f"}) : Json::array();
  }
  ctx.out << report.dump(2) << "\n";
}

// Subcommand: summaries

struct SummariesArgs {
  std::string kind = "g";
  int maxLag = 10;
  std::string out;
};

void summaries(const Context& ctx, const SummariesArgs& a) {
  const Project project = ctx.project();
  const auto pattern = project.pattern();
  const Json params = project.params();
  if (a.kind == "acf") {
    const auto acf = countAcf(pattern, a.maxLag, project.muOrConstant(pattern));
    std::optional<double> scale;
    if (params.contains("theta") && params["theta"].get<double>() > 0.0) {
      scale = acfScaleForTheta(acf, params["theta"].get<double>());
    }
    std::string csv = "lag,empirical,theoretical\n";
    for (std::size_t i = 0; i < acf.lags.size(); ++i) {
      csv += std::to_string(acf.lags[i]) + "," + io::formatDouble(acf.values[i]) + ",";
      if (scale) csv += io::formatDouble(*scale * std::exp(-params["theta"].get<double>() * acf.lags[i]));
      csv += "\n";
    }
    writeOrPrint(ctx, a.out, csv);
    return;
  }
  const SummaryKind kind = parseSummaryKind(a.kind);
  const auto summary = spatialSummary(project, pattern, kind);
  std::vector<double> theo;
  if (params.contains("sigma") && params.contains("phi")) {
    theo = theoreticalCurve(project.model(), kind, summary.r);
  }
  writeOrPrint(ctx, a.out, io::summaryToCsv(summary, theo));
  ctx.notice({{"defaults", {"rGrid"}},
              {"rGrid", "128 points up to a quarter of the shorter window side"},
              {"intervalsUsed", summary.intervalsUsed}});
}

// Subcommand: fit-spatial

struct FitSpatialArgs {
  std::string kind = "g";
  std::string family = "exponential";
  double nu = 0.5;
  std::string sigmaRange = "0,10";
  std::string phiRange = "0,10";
  std::string out;
};

void fitSpatial(const Context& ctx, const FitSpatialArgs& a) {
  Project project = ctx.project();
  const auto pattern = project.pattern();
  const SummaryKind kind = parseSummaryKind(a.kind);
  const CovarianceFamily family = parseFamily(a.family);
  const auto sr = parseRange(a.sigmaRange), pr = parseRange(a.phiRange);
  const auto summary = spatialSummary(project, pattern, kind);
  const SpatialFit fit = fitSpatialPars(summary, family, a.nu, sr, pr);
  const Json report{{"kind", to_string(kind)},
                    {"family", to_string(family)},
                    {"nu", a.nu},
                    {"sigma", fit.sigma},
                    {"phi", fit.phi},
                    {"contrastValue", fit.contrastValue},
                    {"argminOnBoundary", fit.argminOnBoundary},
                    {"sigmaRange", rangeJson(sr)},
                    {"phiRange", rangeJson(pr)}};
  if (fit.argminOnBoundary) {
    ctx.notice({{"warning", "ArgminOnBoundary"},
                {"message", "the minimum lies on the edge of the search rectangle"}});
  }
  project.mergeParams(
      {{"sigma", fit.sigma}, {"phi", fit.phi}, {"family", to_string(family)}, {"nu", a.nu}});
  project.save();
  if (!a.out.empty()) io::writeJson(a.out, report);
  ctx.out << report.dump(2) << "\n";
}

// Subcommand: fit-theta

struct FitThetaArgs {
  std::string thetaRange = "0,10";
  int maxLag = 10;
  std::string out;
};

void fitThetaCmd(const Context& ctx, const FitThetaArgs& a) {
  Project project = ctx.project();
  const auto pattern = project.pattern();
  const auto range = parseRange(a.thetaRange);
  const auto acf = countAcf(pattern, a.maxLag, project.muOrConstant(pattern));
  const ThetaFit fit = fitTheta(acf, range);
  const Json report{{"theta", fit.theta},
                    {"scale", fit.scale},
                    {"residual", fit.residual},
                    {"argminOnBoundary", fit.argminOnBoundary},
                    {"maxLag", a.maxLag},
                    {"thetaRange", rangeJson(range)}};
  if (fit.argminOnBoundary) {
    ctx.notice({{"warning", "ArgminOnBoundary"},
                {"message", "the minimum lies on the edge of the theta range"}});
  }
  project.mergeParams({{"theta", fit.theta}});
  project.save();
  if (!a.out.empty()) io::writeJson(a.out, report);
  ctx.out << report.dump(2) << "\n";
}

// Subcommand: predict

struct PredictArgs {
  int T = 0;
  int laglength = 0;
  std::optional<double> sigma, phi, theta, nu;
  std::optional<std::string> family;
  std::optional<double> cellwidth;
  std::string gridsize = "64,64";
  std::uint64_t malaLength = 1000;
  std::uint64_t burnin = 0;
  std::uint64_t retain = 1;
  std::size_t mcmcDiag = 0;
  std::string adaptive = "andrieuthomsh:1,0.5,1,0.574";
  std::string dump;
  bool lastonly = false;
  std::string exceed;
  bool autorotate = false;
  std::string gradtrunc = "auto";
  std::uint64_t seed = 1;
  std::string out = "prediction";
  bool force = false;
  bool yes = false;
  bool quiet = false;
};

AdaptiveScheme parseAdaptive(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::vector<double> args =
      colon == std::string::npos ? std::vector<double>{} : parseList(text.substr(colon + 1));
  if (name == "andrieuthomsh") {
    AndrieuThoms s;
    if (!args.empty()) {
      if (args.size() != 4) {
        throw Error(ErrorCode::InvalidArgument, "andrieuthomsh takes inith,alpha,C,target");
      }
      s = {args[0], args[1], args[2], args[3]};
    }
    return s;
  }
  if (name == "constanth") {
    if (args.size() != 1) throw Error(ErrorCode::InvalidArgument, "constanth takes one value");
    return ConstantH{args[0]};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown adaptive scheme '" + name + "'");
}

Json predictGrid(const GridSpec& grid, const Array2& values) {
  return io::gridToJson(grid, values.values());
}

std::string tracesCsv(const PredictionSummary& s) {
  std::ostringstream os;
  os << "iteration,h,acceptance\n";
  for (std::size_t i = 0; i < s.hTrace.size(); ++i) {
    os << i + 1 << "," << io::formatDouble(s.hTrace[i]) << ","
       << io::formatDouble(i < s.acceptanceTrace.size() ? s.acceptanceTrace[i] : 0.0) << "\n";
  }
  return os.str();
}

std::string diagCsv(const PredictionSummary& s) {
  std::ostringstream os;
  os << "sample";
  for (const auto& c : s.diagCells) os << ",y_t" << c[0] + 1 << "_x" << c[1] + 1 << "_y" << c[2] + 1;
  os << "\n";
  const std::size_t n = s.diagTraces.empty() ? 0 : s.diagTraces.front().size();
  for (std::size_t k = 0; k < n; ++k) {
    os << k + 1;
    for (const auto& tr : s.diagTraces) os << "," << io::formatDouble(tr[k]);
    os << "\n";
  }
  return os.str();
}

void predictCmd(const Context& ctx, const PredictArgs& a) {
  Project project = ctx.project();
  const auto original = project.pattern();
  CovarianceModel model = project.model();
  if (a.family) model.family = parseFamily(*a.family);
  if (a.sigma) model.sigma = *a.sigma;
  if (a.phi) model.phi = *a.phi;
  if (a.theta) model.theta = *a.theta;
  if (a.nu) model.nu = *a.nu;
  model.validate();

  SpaceTimePointPattern pattern = original;
  std::optional<RotationResult> rotation;
  const Point2 center = original.window().centroid();
  if (a.autorotate) {
    const double cw = a.cellwidth.value_or(
        std::max(original.window().bbox().width(), original.window().bbox().height()) /
        parsePair(a.gridsize).first);
    const RotationResult rot = rotationGain(original, cw);
    ctx.notice({{"rotation", rot.angle * 180.0 / M_PI},
                {"gainPercent", rot.gainPercent},
                {"worthwhile", rot.worthwhile}});
    if (rot.worthwhile) {
      rotation = rot;
      pattern = applyRotation(original, rot);
    }
  }
  const GridSpec grid = gridFor(pattern.window(), a.cellwidth, a.gridsize);
  std::optional<std::array<double, 4>> inverse;
  if (rotation) inverse = rotationMatrix(-rotation->angle);
  const auto stored = project.lambda(original.window());
  const SpatialIntensity lambda =
      stored ? resample(*stored, grid, inverse, center) : SpatialIntensity::uniform(grid);
  const TemporalIntensity mu = project.muOrConstant(original);

  std::optional<double> gradtrunc;
  if (a.gradtrunc != "auto") gradtrunc = parseNumber(a.gradtrunc);
  PredictConfig cfg{a.T, a.laglength, model, grid, lambda, mu, gradtrunc};

  McmcConfig mcmc;
  mcmc.malaLength = a.malaLength;
  mcmc.burnin = a.burnin;
  mcmc.retain = a.retain;
  mcmc.mcmcDiagCells = a.mcmcDiag;
  mcmc.adaptive = parseAdaptive(a.adaptive);
  mcmc.seed = a.seed;
  mcmc.validate();

  OutputConfig output;
  std::vector<double> thresholds;
  if (!a.exceed.empty()) {
    thresholds = parseList(a.exceed);
    output.gridFunctions.push_back(exceedProbs(thresholds));
  }
  output.lastonly = a.lastonly;
  output.force = a.force;
  fs::path storePath;
  if (!a.dump.empty()) {
    fs::create_directories(a.dump);
    storePath = fs::path(a.dump) / "samples.lgd1";
    output.dumpPath = storePath;
    output.confirmDump = [&](std::uint64_t bytes) {
      if (a.yes) return true;
      ctx.err << "The sample store will occupy about " << io::formatDouble(toMebibytes(bytes))
              << " MiB. Continue? [y/N] " << std::flush;
      std::string answer;
      if (!std::getline(ctx.in, answer)) return false;
      return answer == "y" || answer == "Y" || answer == "yes";
    };
    Json meta{{"model",
               {{"family", to_string(model.family)},
                {"sigma", model.sigma},
                {"phi", model.phi},
                {"theta", model.theta},
                {"nu", model.nu}}},
              {"T", a.T},
              {"laglength", a.laglength},
              {"seed", a.seed},
              {"window", io::windowToGeoJson(pattern.window())}};
    output.dumpMeta = meta.dump();
  }
  if (!a.quiet) {
    output.progress = [&](int pct) { ctx.err << "progress " << pct << "\n" << std::flush; };
  }

  const PredictionSummary summary = predict(pattern, cfg, mcmc, output);

  const fs::path dir = a.out;
  fs::create_directories(dir);
  Json slices = Json::array();
  for (std::size_t s = 0; s < summary.slices.size(); ++s) {
    const SliceSummary& sl = summary.slices[s];
    const std::string t = std::to_string(sl.time);
    Json files{{"time", sl.time}};
    const std::pair<const char*, const Array2*> fields[] = {
        {"meanfield", &sl.meanY}, {"varfield", &sl.varY},           {"rr", &sl.meanExpY},
        {"rrvar", &sl.varExpY},   {"serr", &sl.seExpY}, {"intens", &sl.meanIntensity}};
    for (const auto& [name, arr] : fields) {
      const std::string file = std::string(name) + "_" + t + ".json";
      io::writeJson(dir / file, predictGrid(grid, *arr));
      files[name] = file;
    }
    for (std::size_t f = 0; f < summary.gridNames.size(); ++f) {
      const Array3& avg = summary.gridAverages[f][s];
      Json layers = Json::array();
      for (std::size_t k = 0; k < avg.nz(); ++k) {
        const auto begin = avg.values().begin() + static_cast<std::ptrdiff_t>(k * grid.cellCount());
        layers.push_back(io::gridToJson(
            grid, std::span<const double>(&*begin, grid.cellCount())));
      }
      const std::string file = summary.gridNames[f] + "_" + t + ".json";
      io::writeJson(dir / file, Json{{"thresholds", thresholds}, {"layers", layers}});
      files[summary.gridNames[f]] = file;
    }
    slices.push_back(files);
  }
  io::writeText(dir / "htrace.csv", tracesCsv(summary));
  io::writeText(dir / "diag.csv", diagCsv(summary));
  Json diagCells = Json::array();
  for (const auto& c : summary.diagCells) diagCells.push_back({c[0], c[1], c[2]});
  io::writeJson(dir / "traces.json", Json{{"h", summary.hTrace},
                                          {"acceptance", summary.acceptanceTrace},
                                          {"diagCells", diagCells},
                                          {"diag", summary.diagTraces}});
  const std::string text = formatSummary(summary, cfg, mcmc, output);
  io::writeText(dir / "summary.txt", text);

  Json manifest{{"slices", slices},
                {"M", grid.nx},
                {"N", grid.ny},
                {"cellwidth", grid.cellwidth},
                {"window", io::windowToGeoJson(pattern.window())},
                {"thresholds", thresholds},
                {"retained", summary.retained},
                {"meanAcceptance", summary.meanAcceptance},
                {"lastH", summary.lastH},
                {"gradBound", summary.gradBound},
                {"seed", a.seed}};
  if (rotation) {
    manifest["rotation"] = {{"angle", rotation->angle},
                            {"matrix", rotation->matrix},
                            {"center", {center.x, center.y}}};
  }
  if (!storePath.empty()) manifest["store"] = fs::absolute(storePath).string();
  const fs::path manifestPath = dir / "prediction.json";
  io::writeJson(manifestPath, manifest);
  project.setArtifact("prediction", manifestPath);
  if (!storePath.empty()) project.setArtifact("store", storePath);
  project.save();
  ctx.out << text;
}

// Store subcommands

fs::path storePathFor(const Context& ctx, const std::string& given) {
  if (!given.empty()) return given;
  const auto p = ctx.project().artifact("store");
  if (!p) throw Error(ErrorCode::InvalidArgument, "no store given and the project has none");
  return *p;
}

struct ExtractArgs {
  std::string store, x = "all", y = "all", t = "all", s = "all", window, out;
};

void extractCmd(const Context& ctx, const ExtractArgs& a) {
  const SampleStore store = SampleStore::open(storePathFor(ctx, a.store));
  Json j;
  if (!a.window.empty()) {
    const auto window = io::parseWindowGeoJson(io::readJson(a.window));
    const PolygonExtract e = store.extractPolygon(window, parseAxis(a.t));
    Json cells = Json::array();
    for (const auto& c : e.cells) cells.push_back({c[0], c[1]});
    j = {{"cells", cells},
         {"sliceCount", e.sliceCount},
         {"sampleCount", e.sampleCount},
         {"values", e.values}};
  } else {
    const Array4 e = store.extract(parseAxis(a.x), parseAxis(a.y), parseAxis(a.t), parseAxis(a.s));
    j = {{"dims", e.dims()},
         {"values", std::vector<double>(e.values().begin(), e.values().end())}};
  }
  writeOrPrint(ctx, a.out, j.dump() + "\n");
}

std::function<std::vector<double>(const Array2&)> storeFunction(const std::string& fun,
                                                                std::size_t& depth) {
  depth = 1;
  if (fun == "identity") {
    return [](const Array2& y) { return y.raw(); };
  }
  if (fun == "exp") {
    return [](const Array2& y) {
      std::vector<double> v(y.raw());
      for (double& e : v) e = std::exp(e);
      return v;
    };
  }
  if (fun.rfind("exceed:", 0) == 0) {
    const GridFunction g = exceedProbs(parseList(fun.substr(7)));
    depth = g.depth;
    return g.fn;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown function '" + fun + "'");
}

GridSpec storeGrid(const SampleStore& store) {
  const auto& h = store.header();
  GridSpec g;
  g.nx = h.nx;
  g.ny = h.ny;
  g.cellwidth = h.cellwidth;
  g.x0 = h.x0;
  g.y0 = h.y0;
  return g;
}

struct ExpectationArgs {
  std::string store, fun = "exp", out;
};

void expectationCmd(const Context& ctx, const ExpectationArgs& a) {
  const SampleStore store = SampleStore::open(storePathFor(ctx, a.store));
  std::size_t depth = 1;
  const auto fn = storeFunction(a.fun, depth);
  const auto result = store.expectation(fn);
  const GridSpec g = storeGrid(store);
  Json slices = Json::array();
  for (std::size_t s = 0; s < result.size(); ++s) {
    Json layers = Json::array();
    for (std::size_t k = 0; k < depth; ++k) {
      layers.push_back(io::gridToJson(
          g, std::span<const double>(result[s].data() + k * g.cellCount(), g.cellCount())));
    }
    slices.push_back({{"time", store.header().timeLabels[s]}, {"layers", layers}});
  }
  const Json j{{"fun", a.fun}, {"samples", store.samples()}, {"slices", slices}};
  writeOrPrint(ctx, a.out, j.dump() + "\n");
}

struct QuantileArgs {
  std::string store, probs = "0.5", fun = "exp", out;
};

void quantileCmd(const Context& ctx, const QuantileArgs& a) {
  const SampleStore store = SampleStore::open(storePathFor(ctx, a.store));
  std::function<double(double)> fn;
  if (a.fun == "identity") {
    fn = [](double v) { return v; };
  } else if (a.fun == "exp") {
    fn = [](double v) { return std::exp(v); };
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown function '" + a.fun + "'");
  }
  const auto probs = parseList(a.probs);
  const auto result = store.quantile(probs, fn);
  const GridSpec g = storeGrid(store);
  Json slices = Json::array();
  for (std::size_t s = 0; s < result.size(); ++s) {
    Json layers = Json::array();
    for (const auto& q : result[s]) layers.push_back(predictGrid(g, q));
    slices.push_back({{"time", store.header().timeLabels[s]}, {"layers", layers}});
  }
  const Json j{{"fun", a.fun}, {"probs", probs}, {"samples", store.samples()}, {"slices", slices}};
  writeOrPrint(ctx, a.out, j.dump() + "\n");
}

// Subcommand: simulate

struct SimulateArgs {
  std::string window, tlim = "0,100", lambda, out = "simulated.csv";
  double cellwidth = 1.0;
  double sigma = 2.0, phi = 5.0, theta = 2.0, nu = 0.5, mu = 100.0;
  std::string family = "exponential";
  std::uint64_t seed = 1;
};

void simulateCmd(const Context& ctx, const SimulateArgs& a) {
  const auto window = io::parseWindowGeoJson(io::readJson(a.window));
  const auto [ta, tb] = parsePair(a.tlim);
  const TimeInterval tlim{ta, tb};
  CovarianceModel model{parseFamily(a.family), a.sigma, a.phi, a.theta, a.nu};
  model.validate();
  const SpatialIntensity lambda = a.lambda.empty()
                                      ? SpatialIntensity::uniform(buildGrid(window, a.cellwidth))
                                      : io::spatialFromJson(io::readJson(a.lambda), window);
  const TemporalIntensity mu = TemporalIntensity::constant(tlim, a.mu);
  const SimulationResult sim = lgcpSim(window, tlim, lambda, mu, a.cellwidth, model, a.seed);
  for (const auto& w : sim.warnings) ctx.notice({{"warning", "CellwidthWarning"}, {"message", w}});
  const fs::path out = a.out;
  io::writeText(out, io::pointsToCsv(sim.pattern.events()));
  fs::path manifestPath = out;
  manifestPath.replace_extension(".manifest.json");
  fs::path windowPath = out;
  windowPath.replace_extension(".window.geojson");
  io::writeJson(windowPath, io::windowToGeoJson(window));
  const Json manifest{{"points", out.filename().string()},
                      {"window", windowPath.filename().string()},
                      {"tlim", {ta, tb}},
                      {"cellwidth", a.cellwidth},
                      {"model",
                       {{"family", to_string(model.family)},
                        {"sigma", model.sigma},
                        {"phi", model.phi},
                        {"theta", model.theta},
                        {"nu", model.nu}}},
                      {"mu", a.mu},
                      {"seed", a.seed},
                      {"timeStep", sim.timeStep},
                      {"count", sim.pattern.size()},
                      {"warnings", sim.warnings}};
  io::writeJson(manifestPath, manifest);
  ctx.out << manifest.dump(2) << "\n";
}

// Subcommand: rotate-check

struct RotateArgs {
  double cellwidth = 1.0;
  std::string window;
};

void rotateCheck(const Context& ctx, const RotateArgs& a) {
  const RotationResult r =
      a.window.empty() ? rotationGain(ctx.project().pattern(), a.cellwidth)
                       : rotationGain(io::parseWindowGeoJson(io::readJson(a.window)), a.cellwidth);
  ctx.out << Json{{"angle", r.angle},
                  {"angleDegrees", r.angle * 180.0 / M_PI},
                  {"matrix", r.matrix},
                  {"gainPercent", r.gainPercent},
                  {"worthwhile", r.worthwhile},
                  {"cellsUnrotated", r.cellsUnrotated},
                  {"cellsRotated", r.cellsRotated}}
                 .dump(2)
          << "\n";
}

// Subcommand: tune

struct TuneArgs {
  bool serve = false;
  std::string host = "127.0.0.1";
  int port = 8765;
};

void tune(const Context& ctx, const TuneArgs& a) {
  if (!a.serve) {
    ctx.out << ctx.project().params().dump(2) << "\n";
    return;
  }
  TunerServer server(ctx.projectPath);
  ctx.out << Json{{"listening", a.host + ":" + std::to_string(a.port)}}.dump() << "\n"
          << std::flush;
  server.listen(a.host, a.port);
}

// Subcommand: plot

struct PlotArgs {
  std::string what, out, from, store;
  std::optional<int> time;
  std::size_t threshold = 1;
  double prob = 0.5;
  std::size_t pixels = 4;
};

std::vector<Point2> casePoints(const Project& project, const Json& manifest, int time) {
  std::vector<Point2> pts;
  const auto pattern = project.pattern();
  std::array<double, 4> m{1, 0, 0, 1};
  Point2 c{};
  if (manifest.contains("rotation")) {
    m = manifest["rotation"]["matrix"].get<std::array<double, 4>>();
    c = {manifest["rotation"]["center"][0].get<double>(),
         manifest["rotation"]["center"][1].get<double>()};
  }
  for (const auto& e : pattern.events()) {
    if (pattern.timeIndex(e.t) != time) continue;
    const double dx = e.x - c.x, dy = e.y - c.y;
    pts.push_back({m[0] * dx + m[1] * dy + c.x, m[2] * dx + m[3] * dy + c.y});
  }
  return pts;
}

void plotCmd(const Context& ctx, const PlotArgs& a) {
  const Project project = ctx.project();
  fs::path manifestPath;
  if (!a.from.empty()) {
    manifestPath = a.from;
  } else if (auto p = project.artifact("prediction")) {
    manifestPath = *p;
  } else {
    throw Error(ErrorCode::InvalidArgument, "no prediction found; run `lgcp predict` first");
  }
  const Json manifest = io::readJson(manifestPath);
  const fs::path dir = manifestPath.parent_path();
  const fs::path out = a.out.empty() ? fs::path(a.what + ".png") : fs::path(a.out);

  if (a.what == "htrace" || a.what == "trace") {
    const Json traces = io::readJson(dir / "traces.json");
    std::vector<std::vector<double>> series;
    if (a.what == "htrace") {
      series.push_back(traces["h"].get<std::vector<double>>());
    } else {
      series = traces["diag"].get<std::vector<std::vector<double>>>();
      if (series.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no diagnostic traces; rerun predict with --mcmc-diag");
      }
    }
    plot::writePng(out, plot::lineChart(series));
    ctx.out << Json{{"output", out.string()}}.dump() << "\n";
    return;
  }

  const Json& slices = manifest["slices"];
  if (slices.empty()) throw Error(ErrorCode::InvalidArgument, "prediction has no slices");
  const Json* slice = &slices.back();
  if (a.time) {
    slice = nullptr;
    for (const auto& s : slices) {
      if (s["time"].get<int>() == *a.time) slice = &s;
    }
    if (!slice) throw Error(ErrorCode::TimeIndexOutOfRange, "time " + std::to_string(*a.time) + " was not predicted");
  }
  const int time = (*slice)["time"].get<int>();
  Json grid;
  if (a.what == "rr" || a.what == "serr" || a.what == "intensity") {
    const std::string key = a.what == "intensity" ? "intens" : a.what;
    grid = io::readJson(dir / (*slice)[key].get<std::string>());
  } else if (a.what == "exceed") {
    if (!slice->contains("exceed")) {
      throw Error(ErrorCode::EmptyThresholds, "prediction has no exceedance output; use --exceed");
    }
    const Json ex = io::readJson(dir / (*slice)["exceed"].get<std::string>());
    if (a.threshold < 1 || a.threshold > ex["layers"].size()) {
      throw Error(ErrorCode::IndexOutOfRange, "threshold index out of range");
    }
    grid = ex["layers"][a.threshold - 1];
  } else if (a.what == "quantile") {
    const fs::path storePath =
        !a.store.empty() ? fs::path(a.store)
                         : fs::path(manifest.value("store", std::string()));
    if (storePath.empty()) throw Error(ErrorCode::InvalidArgument, "prediction has no store; use --dump");
    const SampleStore store = SampleStore::open(storePath);
    const auto& labels = store.header().timeLabels;
    const auto it = std::find(labels.begin(), labels.end(), time);
    if (it == labels.end()) throw Error(ErrorCode::TimeIndexOutOfRange, "time not in store");
    const auto q = store.quantile({a.prob}, [](double v) { return std::exp(v); });
    grid = predictGrid(storeGrid(store), q[static_cast<std::size_t>(it - labels.begin())][0]);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown plot '" + a.what + "'");
  }
  const PolygonWindow window = io::parseWindowGeoJson(manifest["window"]);
  GridSpec g = io::gridFromJson(grid);
  if (g.insideMask.empty()) g = buildGrid(window, g.nx, g.ny);
  plot::HeatmapOptions opts;
  opts.pixelsPerCell = a.pixels;
  opts.window = &window;
  opts.points = casePoints(project, manifest, time);
  plot::writePng(out, plot::heatmap(g, io::valuesFromGridJson(grid), opts));
  ctx.out << Json{{"output", out.string()}, {"time", time}}.dump() << "\n";
}

void reportError(std::ostream& err, const std::string& code, const std::string& message,
                 std::optional<std::int64_t> index = std::nullopt) {
  Json j{{"error", code}, {"message", message}};
  if (index) j["index"] = *index;
  err << j.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Spatio-temporal log-Gaussian Cox process toolkit", "lgcp"};
  app.require_subcommand(1);
  std::string projectPath = "lgcp_project.json";
  app.add_option("--project", projectPath, "Project file accumulating stage outputs")
      ->capture_default_str();
  std::function<void(const Context&)> action;
  auto bind = [&](CLI::App* sub, auto fn, auto& args) {
    sub->callback([&action, fn, &args] { action = [fn, &args](const Context& c) { fn(c, args); }; });
  };

  IngestArgs ingestArgs;
  auto* ingestApp = app.add_subcommand("ingest", "Validate points and window into a pattern file");
  ingestApp->add_option("--points", ingestArgs.points, "CSV with header x,y,t")->required();
  ingestApp->add_option("--window", ingestArgs.window, "GeoJSON polygon")->required();
  ingestApp->add_option("--tlim", ingestArgs.tlim, "Observation interval a,b")->required();
  ingestApp->add_option("--out", ingestArgs.out, "Pattern file");
  bind(ingestApp, ingest, ingestArgs);

  LambdaArgs lambdaArgs;
  auto* lambdaApp = app.add_subcommand("lambda", "Kernel estimate of the spatial component");
  lambdaApp->add_option("--bandwidth", lambdaArgs.bandwidth);
  lambdaApp->add_option("--adjust", lambdaArgs.adjust)->capture_default_str();
  auto* lcw = lambdaApp->add_option("--cellwidth", lambdaArgs.cellwidth);
  lambdaApp->add_option("--gridsize", lambdaArgs.gridsize, "M,N")->excludes(lcw)->capture_default_str();
  lambdaApp->add_option("--out", lambdaArgs.out);
  bind(lambdaApp, lambdaCmd, lambdaArgs);

  MuArgs muArgs;
  auto* muApp = app.add_subcommand("mu", "Estimate the temporal component");
  muApp->add_option("--method", muArgs.method)->check(CLI::IsMember({"lowess", "constant"}))->capture_default_str();
  auto* fOpt = muApp->add_option("--f", muArgs.f, "lowess span")->capture_default_str();
  muApp->add_option("--out", muArgs.out);
  muApp->callback([&] {
    muArgs.fDefault = fOpt->count() == 0;
    action = [&](const Context& c) { muCmd(c, muArgs); };
  });

  SummariesArgs sumArgs;
  auto* sumApp = app.add_subcommand("summaries", "Empirical second-order or autocorrelation summaries");
  sumApp->add_option("--kind", sumArgs.kind)->check(CLI::IsMember({"g", "k", "acf"}))->capture_default_str();
  sumApp->add_option("--max-lag", sumArgs.maxLag)->capture_default_str();
  sumApp->add_option("--out", sumArgs.out, "CSV file (stdout when omitted)");
  bind(sumApp, summaries, sumArgs);

  FitSpatialArgs fsArgs;
  auto* fsApp = app.add_subcommand("fit-spatial", "Minimum-contrast estimate of sigma and phi");
  fsApp->add_option("--kind", fsArgs.kind)->check(CLI::IsMember({"g", "k"}))->capture_default_str();
  fsApp->add_option("--family", fsArgs.family)->capture_default_str();
  fsApp->add_option("--nu", fsArgs.nu)->capture_default_str();
  fsApp->add_option("--sigma-range", fsArgs.sigmaRange)->capture_default_str();
  fsApp->add_option("--phi-range", fsArgs.phiRange)->capture_default_str();
  fsApp->add_option("--out", fsArgs.out);
  bind(fsApp, fitSpatial, fsArgs);

  FitThetaArgs ftArgs;
  auto* ftApp = app.add_subcommand("fit-theta", "Least-squares estimate of theta");
  ftApp->add_option("--theta-range", ftArgs.thetaRange)->capture_default_str();
  ftApp->add_option("--max-lag", ftArgs.maxLag)->capture_default_str();
  ftApp->add_option("--out", ftArgs.out);
  bind(ftApp, fitThetaCmd, ftArgs);

  PredictArgs pa;
  auto* pApp = app.add_subcommand("predict", "MALA prediction of the latent field");
  pApp->add_option("--T", pa.T, "Prediction time index")->required();
  pApp->add_option("--laglength", pa.laglength)->capture_default_str();
  pApp->add_option("--sigma", pa.sigma);
  pApp->add_option("--phi", pa.phi);
  pApp->add_option("--theta", pa.theta);
  pApp->add_option("--nu", pa.nu);
  pApp->add_option("--family", pa.family);
  auto* pcw = pApp->add_option("--cellwidth", pa.cellwidth);
  pApp->add_option("--gridsize", pa.gridsize, "M,N")->excludes(pcw)->capture_default_str();
  pApp->add_option("--mala-length", pa.malaLength)->capture_default_str();
  pApp->add_option("--burnin", pa.burnin)->capture_default_str();
  pApp->add_option("--retain", pa.retain)->capture_default_str();
  pApp->add_option("--mcmc-diag", pa.mcmcDiag)->capture_default_str();
  pApp->add_option("--adaptive", pa.adaptive, "andrieuthomsh:inith,alpha,C,target | constanth:h")
      ->capture_default_str();
  pApp->add_option("--dump", pa.dump, "Directory for the sample store");
  pApp->add_flag("--lastonly", pa.lastonly);
  pApp->add_option("--exceed", pa.exceed, "Exceedance thresholds k1,k2,...");
  pApp->add_flag("--autorotate", pa.autorotate);
  pApp->add_option("--gradtrunc", pa.gradtrunc, "auto or a positive bound")->capture_default_str();
  pApp->add_option("--seed", pa.seed)->capture_default_str();
  pApp->add_option("--out", pa.out, "Output directory")->capture_default_str();
  pApp->add_flag("--force", pa.force, "Overwrite an existing store");
  pApp->add_flag("--yes", pa.yes, "Accept the projected store size");
  pApp->add_flag("--quiet", pa.quiet, "No progress lines");
  bind(pApp, predictCmd, pa);

  ExtractArgs ea;
  auto* eApp = app.add_subcommand("extract", "Extract samples from a store");
  eApp->add_option("--store", ea.store);
  eApp->add_option("--x", ea.x)->capture_default_str();
  eApp->add_option("--y", ea.y)->capture_default_str();
  eApp->add_option("--t", ea.t)->capture_default_str();
  eApp->add_option("--s", ea.s)->capture_default_str();
  eApp->add_option("--window", ea.window, "GeoJSON polygon selecting cells");
  eApp->add_option("--out", ea.out);
  bind(eApp, extractCmd, ea);

  ExpectationArgs xa;
  auto* xApp = app.add_subcommand("expectation", "Monte Carlo mean of a function of the stored fields");
  xApp->add_option("--store", xa.store);
  xApp->add_option("--fun", xa.fun, "identity | exp | exceed:k1,k2,...")->capture_default_str();
  xApp->add_option("--out", xa.out);
  bind(xApp, expectationCmd, xa);

  QuantileArgs qa;
  auto* qApp = app.add_subcommand("quantile", "Cellwise quantiles of the stored fields");
  qApp->add_option("--store", qa.store);
  qApp->add_option("--probs", qa.probs)->capture_default_str();
  qApp->add_option("--fun", qa.fun, "identity | exp")->capture_default_str();
  qApp->add_option("--out", qa.out);
  bind(qApp, quantileCmd, qa);

  SimulateArgs sa;
  auto* sApp = app.add_subcommand("simulate", "Simulate a space-time log-Gaussian Cox process");
  sApp->add_option("--window", sa.window, "GeoJSON polygon")->required();
  sApp->add_option("--tlim", sa.tlim)->capture_default_str();
  sApp->add_option("--cellwidth", sa.cellwidth)->capture_default_str();
  sApp->add_option("--sigma", sa.sigma)->capture_default_str();
  sApp->add_option("--phi", sa.phi)->capture_default_str();
  sApp->add_option("--theta", sa.theta)->capture_default_str();
  sApp->add_option("--nu", sa.nu)->capture_default_str();
  sApp->add_option("--family", sa.family)->capture_default_str();
  sApp->add_option("--mu", sa.mu, "Constant temporal rate")->capture_default_str();
  sApp->add_option("--lambda", sa.lambda, "grid-json spatial component (uniform by default)");
  sApp->add_option("--seed", sa.seed)->capture_default_str();
  sApp->add_option("--out", sa.out, "Points CSV")->capture_default_str();
  bind(sApp, simulateCmd, sa);

  RotateArgs ra;
  auto* rApp = app.add_subcommand("rotate-check", "Report the FFT grid saving from rotating the window");
  rApp->add_option("--cellwidth", ra.cellwidth)->required();
  rApp->add_option("--window", ra.window, "GeoJSON polygon (project window by default)");
  bind(rApp, rotateCheck, ra);

  TuneArgs ta;
  auto* tApp = app.add_subcommand("tune", "Serve the parameter tuning HTTP API");
  tApp->add_flag("--serve", ta.serve);
  tApp->add_option("--host", ta.host)->capture_default_str();
  tApp->add_option("--port", ta.port)->capture_default_str();
  bind(tApp, tune, ta);

  PlotArgs pl;
  auto* plApp = app.add_subcommand("plot", "Write PNG heatmaps and trace plots");
  plApp->add_option("--what", pl.what)
      ->required()
      ->check(CLI::IsMember({"rr", "serr", "intensity", "exceed", "quantile", "htrace", "trace"}));
  plApp->add_option("--out", pl.out, "PNG file");
  plApp->add_option("--from", pl.from, "prediction.json manifest");
  plApp->add_option("--store", pl.store);
  plApp->add_option("--time", pl.time);
  plApp->add_option("--threshold", pl.threshold, "1-based exceedance threshold index")
      ->capture_default_str();
  plApp->add_option("--prob", pl.prob)->capture_default_str();
  plApp->add_option("--pixels", pl.pixels, "Pixels per cell")->capture_default_str();
  bind(plApp, plotCmd, pl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    reportError(err, "InvalidArgument", e.what());
    return 1;
  } catch (const Error& e) {
    reportError(err, std::string(to_string(e.code())), e.what(), e.index());
    return 1;
  }
  if (!action) return 1;
  try {
    action(Context{out, err, in, projectPath});
  } catch (const Error& e) {
    reportError(err, std::string(to_string(e.code())), e.what(), e.index());
    return 1;
  } catch (const Json::exception& e) {
    reportError(err, "ParseError", e.what());
    return 1;
  } catch (const std::exception& e) {
    reportError(err, "IoError", e.what());
    return 1;
  }
  return 0;
}

}  // namespace lgcp::cli
