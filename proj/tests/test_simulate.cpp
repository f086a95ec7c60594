#include <gtest/gtest.h>

#include <cmath>

#include "lgcp/error.hpp"
#include "lgcp/simulate.hpp"
#include "support.hpp"

using namespace lgcp;

namespace {

SimulationResult simulateSquare(double side, double T, double rate, const CovarianceModel& m,
                                double cw, std::uint64_t seed) {
  const auto w = PolygonWindow::rectangle(0, 0, side, side);
  const auto lambda = SpatialIntensity::uniform(buildGrid(w, cw));
  return lgcpSim(w, {0, T}, lambda, TemporalIntensity::constant({0, T}, rate), cw, m, seed);
}

}  // namespace

TEST(Simulate, TimeStepRule) {
  CovarianceModel m{CovarianceFamily::Exponential, 1.0, 2.0, 0.05, 0.5};
  EXPECT_DOUBLE_EQ(chooseTimeStep(m), 1.0);
  m.theta = 0.1;
  EXPECT_DOUBLE_EQ(chooseTimeStep(m), 1.0);
  m.theta = 2.0;
  EXPECT_DOUBLE_EQ(chooseTimeStep(m), 0.05);
  m.theta = 0.0;
  EXPECT_THROW(chooseTimeStep(m), Error);
}

TEST(Simulate, SameSeedGivesSamePattern) {
  const CovarianceModel m{CovarianceFamily::Exponential, 1.0, 3.0, 1.0, 0.5};
  const auto a = simulateSquare(16, 5, 50, m, 1.0, 42);
  const auto b = simulateSquare(16, 5, 50, m, 1.0, 42);
  const auto c = simulateSquare(16, 5, 50, m, 1.0, 43);
  EXPECT_EQ(a.pattern.events(), b.pattern.events());
  EXPECT_NE(a.pattern.events(), c.pattern.events());
  EXPECT_DOUBLE_EQ(a.timeStep, 0.1);
}

TEST(Simulate, EventsLieInWindowAndTimeInterval) {
  const auto w = test::hexagon();
  const CovarianceModel m{CovarianceFamily::Exponential, 1.5, 10.0, 0.5, 0.5};
  const auto lambda = SpatialIntensity::uniform(buildGrid(w, 4.0));
  const auto r =
      lgcpSim(w, {2, 7.5}, lambda, TemporalIntensity::constant({2, 7.5}, 40), 4.0, m, 3);
  ASSERT_GT(r.pattern.size(), 0u);
  double last = -INFINITY;
  for (const auto& e : r.pattern.events()) {
    EXPECT_TRUE(w.contains({e.x, e.y}));
    EXPECT_GT(e.t, 2.0);
    EXPECT_LE(e.t, 7.5);
    EXPECT_GE(e.t, last);
    last = e.t;
  }
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Simulate, CoarseCellwidthWarns) {
  const CovarianceModel m{CovarianceFamily::Exponential, 1.0, 1.5, 1.0, 0.5};
  const auto r = simulateSquare(8, 1, 10, m, 1.0, 1);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].rfind("CellwidthWarning", 0), 0u);
}

TEST(Simulate, MeanCountMatchesIntensity) {
  // E exp(Y) = 1, so the expected count is rate * T.
  const CovarianceModel m{CovarianceFamily::Exponential, 0.5, 2.0, 2.0, 0.5};
  double total = 0.0;
  const int reps = 10;
  for (int s = 0; s < reps; ++s) total += simulateSquare(20, 20, 200, m, 1.0, 100 + s).pattern.size();
  EXPECT_NEAR(total / reps, 4000.0, 0.05 * 4000.0);
}

TEST(Simulate, RejectsMismatchedTemporalDomain) {
  const auto w = PolygonWindow::rectangle(0, 0, 8, 8);
  const CovarianceModel m{CovarianceFamily::Exponential, 1.0, 3.0, 1.0, 0.5};
  const auto lambda = SpatialIntensity::uniform(buildGrid(w, 1.0));
  EXPECT_THROW(lgcpSim(w, {0, 5}, lambda, TemporalIntensity::constant({0, 4}, 1), 1.0, m, 1),
               Error);
}
