#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgcp/array.hpp"
#include "lgcp/estimation.hpp"
#include "lgcp/geometry.hpp"
#include "lgcp/intensity.hpp"

namespace lgcp::io {

using Json = nlohmann::json;

std::string readText(const std::filesystem::path& path);
void writeText(const std::filesystem::path& path, const std::string& text);
Json readJson(const std::filesystem::path& path);
void writeJson(const std::filesystem::path& path, const Json& j);

/// Points CSV with header `x,y,t`. ParseError names the offending line.
std::vector<Event> parsePointsCsv(const std::string& text);
std::string pointsToCsv(const std::vector<Event>& events);

/// GeoJSON Polygon geometry, Feature or single-feature FeatureCollection.
PolygonWindow parseWindowGeoJson(const Json& j);
Json windowToGeoJson(const PolygonWindow& window);

/// grid-json: {M, N, cellwidth, x0, y0, values[M*N] (x fastest), inside?}.
Json gridToJson(const GridSpec& grid, std::span<const double> values);
GridSpec gridFromJson(const Json& j);
Array2 valuesFromGridJson(const Json& j);

Json spatialToJson(const SpatialIntensity& lambda);
/// Rebuilds lambda on the stored grid; the inside mask is recomputed from
/// `window` when the file does not carry one.
SpatialIntensity spatialFromJson(const Json& j, const PolygonWindow& window);

/// {tlim: [a, b], values: [...]} or {tlim: [a, b], constant: r}.
Json temporalToJson(const TemporalIntensity& mu);
TemporalIntensity temporalFromJson(const Json& j);

Json patternToJson(const SpaceTimePointPattern& pattern);
SpaceTimePointPattern patternFromJson(const Json& j);

/// Full-precision decimal text for a double.
std::string formatDouble(double v);

/// CSV with columns r,empirical,theoretical.
std::string summaryToCsv(const SecondOrderSummary& summary, const std::vector<double>& theoretical);

}  // namespace lgcp::io
