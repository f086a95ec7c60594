#include "lgcp/tuner.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "lgcp/error.hpp"
#include "lgcp/intensity.hpp"

namespace lgcp {

namespace {

double numberParam(const QueryParams& q, const std::string& key, double fallback) {
  const auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return fallback;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, "query parameter '" + key + "' is not a number");
  }
  return v;
}

std::string kindParam(const QueryParams& q) {
  const auto it = q.find("kind");
  const std::string k = it == q.end() ? "g" : it->second;
  if (k == "acf") return k;
  return to_string(parseSummaryKind(k));
}

}  // namespace

struct TunerService::Cached {
  io::Json artifacts;
  std::optional<SpaceTimePointPattern> pattern;
  std::optional<SpatialIntensity> lambda;
  std::optional<TemporalIntensity> mu;
  std::vector<double> rGrid;
  std::optional<SecondOrderSummary> g, k;
  std::optional<TemporalAcf> acf;
  std::string acfError;
  int maxLag = 10;
};

TunerService::TunerService(std::filesystem::path projectPath)
    : projectPath_(std::move(projectPath)) {}

std::shared_ptr<const TunerService::Cached> TunerService::cached() {
  std::lock_guard lock(mutex_);
  Project project = Project::load(projectPath_);
  const io::Json artifacts =
      project.data().contains("artifacts") ? project.data()["artifacts"] : io::Json::object();
  if (cache_ && cache_->artifacts == artifacts) return cache_;
  auto c = std::make_shared<Cached>();
  c->artifacts = artifacts;
  c->pattern = project.pattern();
  const auto& window = c->pattern->window();
  c->lambda = project.lambdaOrUniform(window);
  c->mu = project.muOrConstant(*c->pattern);
  c->rGrid = defaultRGrid(window);
  c->g = ginhomAverage(*c->pattern, *c->lambda, *c->mu, c->rGrid);
  c->k = kinhomAverage(*c->pattern, *c->lambda, *c->mu, c->rGrid);
  try {
    c->acf = countAcf(*c->pattern, c->maxLag, *c->mu);
  } catch (const Error& e) {
    c->acfError = e.what();
  }
  cache_ = c;
  return cache_;
}

const SecondOrderSummary& TunerService::spatialSummary(const Cached& c, SummaryKind kind) {
  return kind == SummaryKind::Pcf ? *c.g : *c.k;
}

io::Json TunerService::summary(const QueryParams& q) {
  const std::string kind = kindParam(q);
  const auto c = cached();
  if (kind == "acf") {
    if (!c->acf) throw Error(ErrorCode::SeriesTooShort, c->acfError);
    return {{"kind", "acf"}, {"lags", c->acf->lags}, {"empirical", c->acf->values}};
  }
  const auto& s = spatialSummary(*c, parseSummaryKind(kind));
  return {{"kind", kind},
          {"r", s.r},
          {"empirical", s.empirical},
          {"intervalsUsed", s.intervalsUsed}};
}

std::string TunerService::summaryCsv(const QueryParams& q) {
  const io::Json j = summary(q);
  std::string out;
  if (j["kind"] == "acf") {
    out = "lag,empirical\n";
    for (std::size_t i = 0; i < j["lags"].size(); ++i) {
      out += std::to_string(j["lags"][i].get<int>()) + "," +
             io::formatDouble(j["empirical"][i].get<double>()) + "\n";
    }
    return out;
  }
  out = "r,empirical\n";
  for (std::size_t i = 0; i < j["r"].size(); ++i) {
    out += io::formatDouble(j["r"][i].get<double>()) + "," +
           io::formatDouble(j["empirical"][i].get<double>()) + "\n";
  }
  return out;
}

io::Json TunerService::theoretical(const QueryParams& q) {
  const std::string kind = kindParam(q);
  const io::Json saved = params();
  const auto c = cached();
  if (kind == "acf") {
    if (!c->acf) throw Error(ErrorCode::SeriesTooShort, c->acfError);
    const double theta = numberParam(q, "theta", saved.value("theta", 1.0));
    if (!(theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
    const double scale = acfScaleForTheta(*c->acf, theta);
    std::vector<double> theo;
    for (int lag : c->acf->lags) theo.push_back(scale * std::exp(-theta * lag));
    return {{"kind", "acf"},
            {"lags", c->acf->lags},
            {"theoretical", theo},
            {"scale", scale},
            {"theta", theta},
            {"residual", acfResidual(*c->acf, theta)}};
  }
  CovarianceModel m;
  const auto fam = q.find("family");
  m.family = parseFamily(fam != q.end() && !fam->second.empty()
                             ? fam->second
                             : saved.value("family", std::string("exponential")));
  m.sigma = numberParam(q, "sigma", saved.value("sigma", 1.0));
  m.phi = numberParam(q, "phi", saved.value("phi", 1.0));
  m.nu = numberParam(q, "nu", saved.value("nu", 0.5));
  m.theta = 1.0;
  m.validate();
  const SecondOrderSummary& s = spatialSummary(*c, parseSummaryKind(kind));
  return {{"kind", kind},
          {"r", s.r},
          {"theoretical", theoreticalCurve(m, s.kind, s.r)},
          {"contrast", contrast(s, m)},
          {"sigma", m.sigma},
          {"phi", m.phi},
          {"family", to_string(m.family)},
          {"nu", m.nu}};
}

io::Json TunerService::lambdaPreview(const QueryParams& q) {
  const auto c = cached();
  const PolygonWindow& w = c->pattern->window();
  const double shorter = std::min(w.bbox().width(), w.bbox().height());
  const double bw = numberParam(q, "bandwidth", 0.1 * shorter);
  const double adjust = numberParam(q, "adjust", 1.0);
  const auto size = static_cast<std::size_t>(numberParam(q, "size", 64));
  if (size == 0) throw Error(ErrorCode::InvalidArgument, "size must be positive");
  const SpatialIntensity lam = kernelLambda(*c->pattern, c->lambda->grid(), bw, adjust);
  const GridSpec& g = lam.grid();
  const std::size_t fx = (g.nx + size - 1) / size, fy = (g.ny + size - 1) / size;
  const std::size_t mx = (g.nx + fx - 1) / fx, my = (g.ny + fy - 1) / fy;
  std::vector<double> values(mx * my, 0.0);
  std::vector<int> counts(mx * my, 0);
  for (std::size_t y = 0; y < g.ny; ++y) {
    for (std::size_t x = 0; x < g.nx; ++x) {
      if (!g.inside(x, y)) continue;
      const std::size_t i = (y / fy) * mx + x / fx;
      values[i] += lam(x, y);
      ++counts[i];
    }
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  io::Json vals = io::Json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (counts[i] > 0) {
      values[i] /= counts[i];
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
      vals.push_back(values[i]);
    } else {
      vals.push_back(nullptr);
    }
  }
  return {{"M", mx},
          {"N", my},
          {"values", vals},
          {"min", lo},
          {"max", hi},
          {"ratio", lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()},
          {"bandwidth", bw},
          {"adjust", adjust}};
}

io::Json TunerService::params() {
  std::lock_guard lock(mutex_);
  return Project::load(projectPath_).params();
}

io::Json TunerService::saveParams(const io::Json& body) {
  std::lock_guard lock(mutex_);
  Project project = Project::load(projectPath_);
  io::Json merged = project.mergeParams(body);
  project.save();
  return merged;
}

TunerServer::TunerServer(std::filesystem::path projectPath)
    : service_(std::move(projectPath)), server_(std::make_unique<httplib::Server>()) {
  routes();
}

TunerServer::~TunerServer() { stop(); }

namespace {

QueryParams toQuery(const httplib::Request& req) {
  QueryParams q;
  for (const auto& [k, v] : req.params) q[k] = v;
  return q;
}

void sendJson(httplib::Response& res, const io::Json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      sendJson(res, {{"error", to_string(e.code())}, {"message", e.what()}}, 400);
    } catch (const io::Json::exception& e) {
      sendJson(res, {{"error", "ParseError"}, {"message", e.what()}}, 400);
    } catch (const std::exception& e) {
      sendJson(res, {{"error", "InternalError"}, {"message", e.what()}}, 500);
    }
  };
}

}  // namespace

void TunerServer::routes() {
  auto& s = *server_;
  s.Get("/api/summary", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const auto q = toQuery(req);
          const auto fmt = q.find("format");
          if (fmt != q.end() && fmt->second == "csv") {
            res.set_content(service_.summaryCsv(q), "text/csv");
          } else {
            sendJson(res, service_.summary(q));
          }
        }));
  s.Get("/api/theoretical", guarded([this](const httplib::Request& req, httplib::Response& res) {
          sendJson(res, service_.theoretical(toQuery(req)));
        }));
  s.Get("/api/lambda-preview",
        guarded([this](const httplib::Request& req, httplib::Response& res) {
          sendJson(res, service_.lambdaPreview(toQuery(req)));
        }));
  s.Get("/api/params", guarded([this](const httplib::Request&, httplib::Response& res) {
          sendJson(res, service_.params());
        }));
  s.Post("/api/params", guarded([this](const httplib::Request& req, httplib::Response& res) {
           sendJson(res, service_.saveParams(io::Json::parse(req.body)));
         }));
}

int TunerServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void TunerServer::listen(const std::string& host, int port) {
  if (!server_->listen(host, port)) {
    throw Error(ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void TunerServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace lgcp
