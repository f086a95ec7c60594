#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "lgcp/error.hpp"
#include "lgcp/estimation.hpp"
#include "support.hpp"

using namespace lgcp;

namespace {

double simpsonK(const CovarianceModel& m, double r, int n = 20000) {
  auto f = [&](double s) { return s * std::exp(m.sigma * m.sigma * m.correlation(s)); };
  const double h = r / n;
  double sum = f(0) + f(r);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4 : 2) * f(i * h);
  return 2 * std::numbers::pi * sum * h / 3;
}

// Area of W ∩ (W + h) by counting lattice points.
double latticeSetCovariance(const PolygonWindow& w, double hx, double hy, int n = 1500) {
  const auto& bb = w.bbox();
  const double dx = bb.width() / n, dy = bb.height() / n;
  long hits = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Point2 p{bb.xmin + (i + 0.5) * dx, bb.ymin + (j + 0.5) * dy};
      if (w.contains(p) && w.contains({p.x - hx, p.y - hy})) ++hits;
    }
  }
  return hits * dx * dy;
}

}  // namespace

TEST(Estimation, TheoreticalKMatchesSimpsonQuadrature) {
  for (auto fam : {CovarianceFamily::Exponential, CovarianceFamily::Whittle, CovarianceFamily::Matern}) {
    const CovarianceModel m{fam, 1.6, 1.9, 1.0, 1.5};
    for (double r : {0.1, 1.0, 4.0, 12.0}) {
      const double oracle = simpsonK(m, r);
      EXPECT_NEAR(theoreticalK(m, r), oracle, 1e-9 * oracle) << to_string(fam) << " r=" << r;
    }
  }
  const CovarianceModel m{CovarianceFamily::Exponential, 1.2, 3.0, 1.0, 0.5};
  const std::vector<double> r{0.5, 1.0, 2.0, 6.0};
  const auto curve = theoreticalCurve(m, SummaryKind::KFunction, r);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(curve[i], simpsonK(m, r[i]), 1e-9 * curve[i]);
}

TEST(Estimation, TheoreticalPcfOfZeroVarianceFieldIsOne) {
  const CovarianceModel m{CovarianceFamily::Exponential, 0.0, 3.0, 1.0, 0.5};
  EXPECT_DOUBLE_EQ(theoreticalG(m, 0.7), 1.0);
  EXPECT_NEAR(theoreticalK(m, 2.0), std::numbers::pi * 4.0, 1e-10);
}

TEST(Estimation, SetCovarianceOfRectangleIsExact) {
  const auto w = PolygonWindow::rectangle(0, 0, 100, 50);
  const SetCovariance a(w);
  for (auto [hx, hy] : {std::pair{0.0, 0.0}, {3.3, 1.7}, {-12.0, 4.1}, {20.5, -7.2}, {-1.1, -30.0}}) {
    EXPECT_NEAR(a(hx, hy), (100 - std::abs(hx)) * (50 - std::abs(hy)), 1e-8) << hx << "," << hy;
  }
  EXPECT_EQ(a(150.0, 0.0), 0.0);
}

TEST(Estimation, SetCovarianceDistinguishesMixedSignLags) {
  const PolygonWindow tri({{{0, 0}, {40, 0}, {0, 40}}});
  const SetCovariance a(tri);
  for (auto [hx, hy] : {std::pair{5.0, 5.0}, {5.0, -5.0}, {-8.0, 3.0}, {10.0, 0.0}}) {
    const double oracle = latticeSetCovariance(tri, hx, hy);
    EXPECT_NEAR(a(hx, hy), oracle, 0.03 * 800.0) << hx << "," << hy;
  }
  EXPECT_GT(a(5.0, -5.0), a(5.0, 5.0));
}

TEST(Estimation, PoissonPatternHasUnitPairCorrelation) {
  const auto w = PolygonWindow::rectangle(0, 0, 100, 100);
  const auto p = test::uniformPattern(w, 20, 150, 13);
  const auto lambda = SpatialIntensity::uniform(buildGrid(w, 32, 32));
  const auto mu = constantInTime(p);
  const auto r = defaultRGrid(w);
  EXPECT_EQ(r.size(), 128u);
  EXPECT_DOUBLE_EQ(r.back(), 25.0);
  const auto g = ginhomAverage(p, lambda, mu, r);
  const auto k = kinhomAverage(p, lambda, mu, r);
  EXPECT_EQ(g.intervalsUsed, 20);
  double gmean = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 3.0) continue;
    gmean += g.empirical[i];
    ++used;
  }
  EXPECT_NEAR(gmean / used, 1.0, 0.05);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 5.0) continue;
    EXPECT_NEAR(k.empirical[i] / (std::numbers::pi * r[i] * r[i]), 1.0, 0.12) << r[i];
  }
}

TEST(Estimation, SummariesRequireTwoEventsInSomeInterval) {
  const auto w = PolygonWindow::rectangle(0, 0, 10, 10);
  const SpaceTimePointPattern p({{1, 1, 0.5}, {2, 2, 1.5}}, w, {0, 2});
  const auto lambda = SpatialIntensity::uniform(buildGrid(w, 8, 8));
  try {
    ginhomAverage(p, lambda, constantInTime(p), defaultRGrid(w));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewEvents);
  }
}

TEST(Estimation, FitSpatialRecoversNoiseFreeCurve) {
  const auto w = PolygonWindow::rectangle(0, 0, 100, 100);
  const CovarianceModel truth{CovarianceFamily::Exponential, 1.6, 4.0, 1.0, 0.5};
  SecondOrderSummary s;
  s.kind = SummaryKind::Pcf;
  s.r = defaultRGrid(w);
  s.weights.assign(s.r.size(), 1.0);
  s.empirical = theoreticalCurve(truth, SummaryKind::Pcf, s.r);
  EXPECT_NEAR(contrast(s, truth), 0.0, 1e-20);
  const SpatialFit fit = fitSpatialPars(s, truth.family, truth.nu, {0, 10}, {0, 10});
  EXPECT_NEAR(fit.sigma, 1.6, 1e-3);
  EXPECT_NEAR(fit.phi, 4.0, 1e-3);
  EXPECT_FALSE(fit.argminOnBoundary);
  const SpatialFit edge = fitSpatialPars(s, truth.family, truth.nu, {0, 1}, {0, 10});
  EXPECT_TRUE(edge.argminOnBoundary);
}

TEST(Estimation, CountAcfMatchesDirectFormula) {
  const auto w = PolygonWindow::rectangle(0, 0, 10, 10);
  std::vector<Event> ev;
  std::vector<double> counts{3, 8, 2, 7, 7, 1, 9, 4, 6, 5, 2, 8};
  for (std::size_t k = 0; k < counts.size(); ++k) {
    for (int i = 0; i < counts[k]; ++i) ev.push_back({5, 5, k + 0.5});
  }
  const SpaceTimePointPattern p(ev, w, {0, 12});
  const auto acf = countAcf(p, 4);
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / counts.size();
  double var = 0;
  for (double c : counts) var += (c - mean) * (c - mean);
  for (int lag = 1; lag <= 4; ++lag) {
    double cov = 0;
    for (std::size_t i = 0; i + lag < counts.size(); ++i) cov += (counts[i] - mean) * (counts[i + lag] - mean);
    EXPECT_NEAR(acf.values[lag - 1], cov / var, 1e-14);
  }
  EXPECT_THROW(countAcf(p, 11), Error);
  EXPECT_THROW(countAcf(p, 0), Error);
}

TEST(Estimation, FitThetaRecoversExactExponentialDecay) {
  TemporalAcf acf;
  for (int v = 1; v <= 10; ++v) {
    acf.lags.push_back(v);
    acf.values.push_back(0.8 * std::exp(-1.3 * v));
  }
  const ThetaFit fit = fitTheta(acf, {0, 10});
  EXPECT_NEAR(fit.theta, 1.3, 1e-6);
  EXPECT_NEAR(fit.scale, 0.8, 1e-6);
  EXPECT_LT(fit.residual, 1e-14);
  EXPECT_FALSE(fit.argminOnBoundary);
  EXPECT_DOUBLE_EQ(acfResidual(acf, fit.theta), fit.residual);
  EXPECT_TRUE(fitTheta(acf, {2, 5}).argminOnBoundary);
}

TEST(Estimation, AcfScaleIsClampedToOne) {
  TemporalAcf acf{{1, 2}, {0.9, 0.85}};
  EXPECT_DOUBLE_EQ(acfScaleForTheta(acf, 2.0), 1.0);
}
