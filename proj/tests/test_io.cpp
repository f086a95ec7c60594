#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lgcp/error.hpp"
#include "lgcp/io.hpp"
#include "support.hpp"

using namespace lgcp;

namespace {

ErrorCode parseCode(const std::string& csv, std::optional<std::int64_t>* index = nullptr) {
  try {
    io::parsePointsCsv(csv);
  } catch (const Error& e) {
    if (index) *index = e.index();
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << csv;
  return ErrorCode::IoError;
}

}  // namespace

TEST(Io, PointsCsvRoundTrip) {
  const std::vector<Event> ev{{1.5, 2.25, 0.1}, {-3e-7, 1e12, 99.999}, {0.1 + 0.2, 1.0 / 3, 7}};
  const auto back = io::parsePointsCsv(io::pointsToCsv(ev));
  EXPECT_EQ(back, ev);
  EXPECT_EQ(io::parsePointsCsv("x,y,t\r\n1, 2 ,3\r\n\n").size(), 1u);
}

TEST(Io, PointsCsvErrorsNameTheLine) {
  std::optional<std::int64_t> idx;
  EXPECT_EQ(parseCode("x,y,t\n1,2,3\n4,abc,6\n", &idx), ErrorCode::ParseError);
  EXPECT_EQ(idx, 3);
  EXPECT_EQ(parseCode("x,y,t\n1,2\n", &idx), ErrorCode::ParseError);
  EXPECT_EQ(idx, 2);
  EXPECT_EQ(parseCode("x,y,t\n1,2,nan\n"), ErrorCode::ParseError);
  EXPECT_EQ(parseCode("a,b,c\n1,2,3\n"), ErrorCode::ParseError);
  EXPECT_EQ(parseCode(""), ErrorCode::ParseError);
}

TEST(Io, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> e(-300, 300);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::pow(10.0, e(rng)) * (i % 2 ? -1 : 1);
    EXPECT_EQ(std::stod(io::formatDouble(v)), v);
  }
}

TEST(Io, WindowGeoJsonRoundTrip) {
  const PolygonWindow w({{{0, 0}, {10, 0}, {10, 10}, {0, 10}}, {{2, 2}, {4, 2}, {4, 4}, {2, 4}}});
  const auto j = io::windowToGeoJson(w);
  const auto back = io::parseWindowGeoJson(j);
  EXPECT_EQ(back.rings(), w.rings());
  EXPECT_DOUBLE_EQ(back.area(), 96.0);
  const io::Json feature{{"type", "Feature"}, {"properties", io::Json::object()}, {"geometry", j}};
  EXPECT_DOUBLE_EQ(io::parseWindowGeoJson(feature).area(), 96.0);
  const io::Json coll{{"type", "FeatureCollection"}, {"features", {feature}}};
  EXPECT_DOUBLE_EQ(io::parseWindowGeoJson(coll).area(), 96.0);
  const io::Json two{{"type", "FeatureCollection"}, {"features", {feature, feature}}};
  EXPECT_THROW(io::parseWindowGeoJson(two), Error);
  EXPECT_THROW(io::parseWindowGeoJson(io::Json{{"type", "Point"}, {"coordinates", {1, 2}}}), Error);
}

TEST(Io, GridAndIntensityJsonRoundTrip) {
  const auto w = test::hexagon();
  const auto lam = SpatialIntensity::fromFunction(buildGrid(w, 8.0),
                                                  [](Point2 p) { return 1.0 + 0.01 * p.x; });
  const auto j = io::spatialToJson(lam);
  EXPECT_EQ(j["values"].size(), lam.grid().cellCount());
  const auto back = io::spatialFromJson(j, w);
  EXPECT_EQ(back.grid().insideMask, lam.grid().insideMask);
  for (std::size_t i = 0; i < lam.grid().cellCount(); ++i) {
    EXPECT_NEAR(back.values()[i], lam.values()[i], 1e-15);
  }
  io::Json noMask = j;
  noMask.erase("inside");
  EXPECT_EQ(io::spatialFromJson(noMask, w).grid().insideMask, lam.grid().insideMask);
  io::Json bad = j;
  bad["values"].erase(0);
  EXPECT_THROW(io::valuesFromGridJson(bad), Error);
}

TEST(Io, TemporalAndPatternJsonRoundTrip) {
  const auto w = PolygonWindow::rectangle(0, 0, 10, 10);
  const auto p = test::uniformPattern(w, 4, 5, 2);
  const auto back = io::patternFromJson(io::patternToJson(p));
  EXPECT_EQ(back.events(), p.events());
  EXPECT_DOUBLE_EQ(back.tlim().end, 4.0);

  const auto c = io::temporalFromJson(io::temporalToJson(TemporalIntensity::constant({0, 4}, 2.5)));
  EXPECT_TRUE(c.isConstant());
  EXPECT_DOUBLE_EQ(c.at(2), 2.5);
  const auto t =
      io::temporalFromJson(io::temporalToJson(TemporalIntensity::table({0, 4}, {1, 2, 3, 4})));
  EXPECT_DOUBLE_EQ(t.at(3), 3.0);
  EXPECT_THROW(io::temporalFromJson(io::Json{{"tlim", {0}}, {"constant", 1}}), Error);
}
