#include "lgcp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lgcp/error.hpp"

namespace lgcp::io {

std::string readText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void writeText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

Json readJson(const std::filesystem::path& path) {
  try {
    return Json::parse(readText(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void writeJson(const std::filesystem::path& path, const Json& j) {
  writeText(path, j.dump(2) + "\n");
}

std::string formatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parseNumber(const std::string& field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": '" + field + "' is not a finite number",
                static_cast<std::int64_t>(line));
  }
  return v;
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad field '") + key + "': " + e.what());
  }
}

std::vector<std::uint8_t> maskFor(const GridSpec& g, const PolygonWindow& window) {
  std::vector<std::uint8_t> mask(g.nx * g.ny);
  for (std::size_t y = 0; y < g.ny; ++y) {
    for (std::size_t x = 0; x < g.nx; ++x) mask[y * g.nx + x] = window.contains(g.centroid(x, y));
  }
  return mask;
}

}  // namespace

std::vector<Event> parsePointsCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineNo = 0;
  bool header = false;
  std::vector<Event> events;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(t);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(trim(c));
    if (!header) {
      if (cols != std::vector<std::string>{"x", "y", "t"}) {
        throw Error(ErrorCode::ParseError, "line 1: expected header 'x,y,t'", 1);
      }
      header = true;
      continue;
    }
    if (cols.size() != 3) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineNo) + ": expected 3 columns",
                  static_cast<std::int64_t>(lineNo));
    }
    events.push_back({parseNumber(cols[0], lineNo), parseNumber(cols[1], lineNo),
                      parseNumber(cols[2], lineNo)});
  }
  if (!header) throw Error(ErrorCode::ParseError, "empty points file");
  return events;
}

std::string pointsToCsv(const std::vector<Event>& events) {
  std::string out = "x,y,t\n";
  for (const auto& e : events) {
    out += formatDouble(e.x) + "," + formatDouble(e.y) + "," + formatDouble(e.t) + "\n";
  }
  return out;
}

PolygonWindow parseWindowGeoJson(const Json& j) {
  const Json* geom = &j;
  if (j.value("type", "") == "FeatureCollection") {
    const auto& feats = j.at("features");
    if (feats.size() != 1) {
      throw Error(ErrorCode::ParseError, "window collection must hold exactly one feature");
    }
    geom = &feats[0].at("geometry");
  } else if (j.value("type", "") == "Feature") {
    geom = &j.at("geometry");
  }
  if (geom->value("type", "") != "Polygon") {
    throw Error(ErrorCode::ParseError, "window geometry must be a Polygon");
  }
  std::vector<Ring> rings;
  try {
    for (const auto& r : geom->at("coordinates")) {
      Ring ring;
      for (const auto& p : r) ring.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      rings.push_back(std::move(ring));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad polygon coordinates: ") + e.what());
  }
  return PolygonWindow(std::move(rings));
}

Json windowToGeoJson(const PolygonWindow& window) {
  Json coords = Json::array();
  for (const auto& ring : window.rings()) {
    Json r = Json::array();
    for (const auto& p : ring) r.push_back({p.x, p.y});
    r.push_back({ring.front().x, ring.front().y});
    coords.push_back(r);
  }
  return {{"type", "Polygon"}, {"coordinates", coords}};
}

Json gridToJson(const GridSpec& grid, std::span<const double> values) {
  Json j;
  j["M"] = grid.nx;
  j["N"] = grid.ny;
  j["cellwidth"] = grid.cellwidth;
  j["x0"] = grid.x0;
  j["y0"] = grid.y0;
  j["values"] = std::vector<double>(values.begin(), values.end());
  if (!grid.insideMask.empty()) {
    std::vector<int> mask(grid.insideMask.begin(), grid.insideMask.end());
    j["inside"] = mask;
  }
  return j;
}

GridSpec gridFromJson(const Json& j) {
  GridSpec g;
  g.nx = field<std::size_t>(j, "M");
  g.ny = field<std::size_t>(j, "N");
  g.cellwidth = field<double>(j, "cellwidth");
  g.x0 = field<double>(j, "x0");
  g.y0 = field<double>(j, "y0");
  if (g.nx == 0 || g.ny == 0 || !(g.cellwidth > 0.0)) {
    throw Error(ErrorCode::ParseError, "grid dimensions and cellwidth must be positive");
  }
  if (j.contains("inside")) {
    const auto mask = field<std::vector<int>>(j, "inside");
    if (mask.size() != g.nx * g.ny) throw Error(ErrorCode::ParseError, "inside mask size mismatch");
    g.insideMask.assign(mask.begin(), mask.end());
  } else {
    g.insideMask.assign(g.nx * g.ny, 1);
  }
  return g;
}

Array2 valuesFromGridJson(const Json& j) {
  const GridSpec g = gridFromJson(j);
  const auto v = field<std::vector<double>>(j, "values");
  if (v.size() != g.nx * g.ny) {
    throw Error(ErrorCode::ParseError, "grid values must hold M*N entries");
  }
  Array2 a(g.nx, g.ny);
  std::copy(v.begin(), v.end(), a.raw().begin());
  return a;
}

Json spatialToJson(const SpatialIntensity& lambda) {
  return gridToJson(lambda.grid(), lambda.values().values());
}

SpatialIntensity spatialFromJson(const Json& j, const PolygonWindow& window) {
  GridSpec g = gridFromJson(j);
  if (!j.contains("inside")) g.insideMask = maskFor(g, window);
  return SpatialIntensity::fromValues(std::move(g), valuesFromGridJson(j));
}

Json temporalToJson(const TemporalIntensity& mu) {
  Json j;
  j["tlim"] = {mu.tlim().start, mu.tlim().end};
  if (mu.isConstant()) {
    j["constant"] = *mu.constantRate();
  } else {
    j["values"] = mu.tableValues();
  }
  return j;
}

TemporalIntensity temporalFromJson(const Json& j) {
  const auto tl = field<std::vector<double>>(j, "tlim");
  if (tl.size() != 2) throw Error(ErrorCode::ParseError, "tlim must be [a, b]");
  const TimeInterval tlim{tl[0], tl[1]};
  if (j.contains("constant")) return TemporalIntensity::constant(tlim, field<double>(j, "constant"));
  return TemporalIntensity::table(tlim, field<std::vector<double>>(j, "values"));
}

Json patternToJson(const SpaceTimePointPattern& pattern) {
  Json pts = Json::array();
  for (const auto& e : pattern.events()) pts.push_back({e.x, e.y, e.t});
  return {{"window", windowToGeoJson(pattern.window())},
          {"tlim", {pattern.tlim().start, pattern.tlim().end}},
          {"points", pts}};
}

SpaceTimePointPattern patternFromJson(const Json& j) {
  PolygonWindow w = parseWindowGeoJson(field<Json>(j, "window"));
  const auto tl = field<std::vector<double>>(j, "tlim");
  if (tl.size() != 2) throw Error(ErrorCode::ParseError, "tlim must be [a, b]");
  std::vector<Event> events;
  for (const auto& p : field<Json>(j, "points")) {
    events.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  }
  return SpaceTimePointPattern(std::move(events), std::move(w), {tl[0], tl[1]});
}

std::string summaryToCsv(const SecondOrderSummary& summary,
                         const std::vector<double>& theoretical) {
  std::string out = "r,empirical,theoretical\n";
  for (std::size_t k = 0; k < summary.r.size(); ++k) {
    out += formatDouble(summary.r[k]) + "," + formatDouble(summary.empirical[k]) + "," +
           (k < theoretical.size() ? formatDouble(theoretical[k]) : std::string()) + "\n";
  }
  return out;
}

}  // namespace lgcp::io
