#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lgcp/error.hpp"
#include "lgcp/geometry.hpp"
#include "support.hpp"

using namespace lgcp;

namespace {

// Even-odd ray casting, written independently of the winding-number test.
bool rayCast(const Ring& ring, Point2 p) {
  bool in = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Point2 a = ring[i], b = ring[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      in = !in;
    }
  }
  return in;
}

Ring star(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> radius(2.0, 10.0);
  Ring r;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    const double rad = radius(rng);
    r.push_back({50 + rad * std::cos(a), 50 + rad * std::sin(a)});
  }
  return r;
}

}  // namespace

TEST(Geometry, ContainsAgreesWithRayCastingOnRandomStarPolygons) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(38.0, 62.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Ring ring = star(rng, 5 + trial % 9);
    const PolygonWindow w({ring});
    for (int i = 0; i < 500; ++i) {
      const Point2 p{u(rng), u(rng)};
      EXPECT_EQ(w.contains(p), rayCast(ring, p)) << p.x << "," << p.y;
    }
  }
}

TEST(Geometry, ClockwiseOuterRingIsReoriented) {
  const PolygonWindow w({{{0, 0}, {0, 2}, {3, 2}, {3, 0}}});
  EXPECT_GT(signedArea(w.outer()), 0.0);
  EXPECT_DOUBLE_EQ(w.area(), 6.0);
}

TEST(Geometry, HoleIsExcludedAndBoundaryCountsInside) {
  const PolygonWindow w({{{0, 0}, {10, 0}, {10, 10}, {0, 10}}, {{4, 4}, {6, 4}, {6, 6}, {4, 6}}});
  EXPECT_DOUBLE_EQ(w.area(), 96.0);
  EXPECT_FALSE(w.contains({5, 5}));
  EXPECT_TRUE(w.contains({4, 5}));
  EXPECT_TRUE(w.contains({0, 3}));
  EXPECT_FALSE(w.contains({-0.1, 3}));
}

TEST(Geometry, InvalidWindowsAreRejected) {
  EXPECT_THROW(PolygonWindow({{{0, 0}, {1, 1}}}), Error);
  EXPECT_THROW(PolygonWindow({{{0, 0}, {2, 2}, {2, 0}, {0, 2}}}), Error);  // bow tie
  EXPECT_THROW(PolygonWindow({{{0, 0}, {1, 0}, {2, 0}}}), Error);
  try {
    PolygonWindow({{{0, 0}, {2, 2}, {2, 0}, {0, 2}}});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidWindow);
  }
}

TEST(Geometry, PatternValidationReportsOffendingIndex) {
  const auto w = PolygonWindow::rectangle(0, 0, 10, 10);
  try {
    SpaceTimePointPattern({{1, 1, 0.5}, {11, 1, 0.5}}, w, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointOutsideWindow);
    EXPECT_EQ(e.index().value(), 1);
  }
  try {
    SpaceTimePointPattern({{1, 1, 0.5}, {1, 1, 0.2}, {2, 2, 3.0}}, w, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TimeOutsideTlim);
    EXPECT_EQ(e.index().value(), 2);
  }
}

TEST(Geometry, TimeIndexUsesHalfOpenUnitIntervals) {
  const auto p = SpaceTimePointPattern({{1, 1, 0.0}, {1, 1, 1.0}, {1, 1, 1.5}, {1, 1, 3.0}},
                                       PolygonWindow::rectangle(0, 0, 10, 10), {0, 3});
  EXPECT_EQ(p.intervalCount(), 3);
  EXPECT_EQ(p.timeIndex(0.0), 1);
  EXPECT_EQ(p.timeIndex(1.0), 1);
  EXPECT_EQ(p.timeIndex(1.5), 2);
  EXPECT_EQ(p.timeIndex(3.0), 3);
  const auto counts = p.intervalCounts();
  EXPECT_EQ(counts, (std::vector<double>{2, 1, 1}));
}

TEST(Geometry, GridDimensionsArePowersOfTwoAndCoverTheWindow) {
  const auto w = test::hexagon();
  for (double cw : {0.5, 1.0, 1.7, 2.0, 3.3, 9.0}) {
    const GridSpec g = buildGrid(w, cw);
    EXPECT_EQ(g.nx & (g.nx - 1), 0u);
    EXPECT_EQ(g.ny & (g.ny - 1), 0u);
    EXPECT_LE(g.x0, w.bbox().xmin);
    EXPECT_LE(g.y0, w.bbox().ymin);
    EXPECT_GE(g.x0 + g.nx * cw, w.bbox().xmax);
    EXPECT_GE(g.y0 + g.ny * cw, w.bbox().ymax);
    EXPECT_LT(g.nx / 2 * cw, w.bbox().width() + 1e-9);
  }
  EXPECT_THROW(buildGrid(w, 0.0), Error);
  EXPECT_THROW(buildGrid(w, -1.0), Error);
}

TEST(Geometry, InsideMaskMatchesCentroidContainment) {
  const auto w = test::hexagon();
  const GridSpec g = buildGrid(w, 4.0);
  std::size_t inside = 0;
  for (std::size_t y = 0; y < g.ny; ++y) {
    for (std::size_t x = 0; x < g.nx; ++x) {
      EXPECT_EQ(g.inside(x, y), rayCast(w.outer(), g.centroid(x, y)));
      inside += g.inside(x, y);
    }
  }
  EXPECT_EQ(inside, g.insideCount());
  EXPECT_NEAR(inside * g.cellArea(), w.area(), 0.05 * w.area());
}

TEST(Geometry, CellOfIsHalfOpen) {
  const GridSpec g = buildGrid(PolygonWindow::rectangle(0, 0, 4, 4), 1.0);
  ASSERT_EQ(g.nx, 4u);
  EXPECT_EQ(g.cellOf({1.0, 0.5}).value(), (std::array<std::size_t, 2>{1, 0}));
  EXPECT_EQ(g.cellOf({0.999, 0.5}).value(), (std::array<std::size_t, 2>{0, 0}));
  EXPECT_EQ(g.cellOf({4.0, 4.0}).value(), (std::array<std::size_t, 2>{3, 3}));
  EXPECT_FALSE(g.cellOf({4.5, 1}).has_value());
}

TEST(Geometry, BinnedCountsSumToEventsPerInterval) {
  const auto w = PolygonWindow::rectangle(0, 0, 32, 32);
  const auto p = test::uniformPattern(w, 5, 40, 3);
  const GridSpec g = buildGrid(w, 1.0);
  const CountStack c = binCounts(p, g, {2, 3, 5});
  ASSERT_EQ(c.slices.size(), 3u);
  EXPECT_DOUBLE_EQ(c.total(), 120.0);
  EXPECT_THROW(binCounts(p, g, {6}), Error);
}

TEST(Geometry, RotationOfAxisAlignedWindowIsNotWorthwhile) {
  const auto r = rotationGain(PolygonWindow::rectangle(0, 0, 100, 30), 1.0);
  EXPECT_DOUBLE_EQ(r.gainPercent, 0.0);
  EXPECT_FALSE(r.worthwhile);
  EXPECT_EQ(r.cellsRotated, r.cellsUnrotated);
}

TEST(Geometry, RotationPreservesAreaAndInvertsExactly) {
  const auto w = test::hexagon();
  const auto p = test::uniformPattern(w, 2, 30, 9);
  const double angle = 0.37;
  const auto rotated = applyRotation(p, rotationMatrix(angle), w.centroid());
  EXPECT_NEAR(rotated.window().area(), w.area(), 1e-9 * w.area());
  const auto back = applyRotation(rotated, rotationMatrix(-angle), w.centroid());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(back.events()[i].x, p.events()[i].x, 1e-9);
    EXPECT_NEAR(back.events()[i].y, p.events()[i].y, 1e-9);
    EXPECT_TRUE(rotated.window().contains({rotated.events()[i].x, rotated.events()[i].y}));
  }
}

TEST(Geometry, ConvexHullOfSquareWithInteriorPoints) {
  const auto h = convexHull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.7}});
  EXPECT_EQ(h.size(), 4u);
  EXPECT_DOUBLE_EQ(std::abs(signedArea(h)), 1.0);
}

TEST(Geometry, EfficiencyGainFormula) {
  EXPECT_DOUBLE_EQ(efficiencyGain(256, 32), 700.0);
  EXPECT_DOUBLE_EQ(efficiencyGain(32, 64), 0.0);
  EXPECT_EQ(fftCellCount(100, 30, 1.0), 4u * 128 * 32);
}
