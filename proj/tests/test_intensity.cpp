#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lgcp/error.hpp"
#include "lgcp/intensity.hpp"
#include "support.hpp"

using namespace lgcp;

namespace {

// Local linear weighted least squares with tricube weights over the
// ceil(f n) nearest neighbours, solved by QR.
std::vector<double> wlsLowess(const std::vector<double>& x, const std::vector<double>& y,
                              double f) {
  const std::size_t n = x.size();
  const std::size_t q = static_cast<std::size_t>(std::ceil(f * n - 1e-9));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = std::abs(x[j] - x[i]);
    std::vector<double> sorted = d;
    std::sort(sorted.begin(), sorted.end());
    const double h = sorted[q - 1];
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = d[j] / h;
      const double w = d[j] <= 0.999 * h ? std::pow(1 - u * u * u, 3) : 0.0;
      a(j, 0) = std::sqrt(w);
      a(j, 1) = std::sqrt(w) * x[j];
      b(j) = std::sqrt(w) * y[j];
    }
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
    out[i] = coef(0) + coef(1) * x[i];
  }
  return out;
}

}  // namespace

TEST(Intensity, FromValuesNormalizesAndZeroesMaskedCells) {
  const auto w = test::hexagon();
  const GridSpec g = buildGrid(w, 8.0);
  Array2 raw(g.nx, g.ny, 3.0);
  const auto lam = SpatialIntensity::fromValues(g, raw);
  EXPECT_NEAR(lam.integral(), 1.0, 1e-12);
  for (std::size_t y = 0; y < g.ny; ++y) {
    for (std::size_t x = 0; x < g.nx; ++x) {
      if (!g.inside(x, y)) {
        EXPECT_EQ(lam(x, y), 0.0);
      }
    }
  }
  EXPECT_THROW(SpatialIntensity::fromValues(g, Array2(g.nx, g.ny, 0.0)), Error);
  Array2 negative(g.nx, g.ny, 1.0);
  negative[0] = -1.0;
  EXPECT_THROW(SpatialIntensity::fromValues(g, negative), Error);
}

TEST(Intensity, KernelEstimateIntegratesToOneForAnyBandwidth) {
  const auto w = test::hexagon();
  const auto p = test::uniformPattern(w, 3, 100, 4);
  const GridSpec g = buildGrid(w, 64, 64);
  for (double bw : {1.0, 5.0, 20.0, 200.0}) {
    const auto lam = kernelLambda(p, g, bw, 1.0);
    EXPECT_NEAR(lam.integral(), 1.0, 1e-12) << bw;
  }
  EXPECT_THROW(kernelLambda(p, g, 0.0), Error);
  EXPECT_THROW(kernelLambda(p, g, 1.0, -1.0), Error);
}

TEST(Intensity, OversmoothedKernelEstimateIsFlat) {
  const auto w = test::hexagon();
  const auto p = test::uniformPattern(w, 2, 60, 5);
  const GridSpec g = buildGrid(w, 32, 32);
  const auto lam = kernelLambda(p, g, 1e5, 1.0);
  double lo = INFINITY, hi = 0;
  for (std::size_t y = 0; y < g.ny; ++y) {
    for (std::size_t x = 0; x < g.nx; ++x) {
      if (!g.inside(x, y)) continue;
      lo = std::min(lo, lam(x, y));
      hi = std::max(hi, lam(x, y));
    }
  }
  EXPECT_LT(hi / lo, 1.05);
}

TEST(Intensity, ResampleOntoSameGridIsIdentity) {
  const auto w = test::hexagon();
  const GridSpec g = buildGrid(w, 4.0);
  const auto lam = SpatialIntensity::fromFunction(g, [](Point2 p) { return 1.0 + p.x * p.y; });
  const auto same = resample(lam, g);
  for (std::size_t i = 0; i < g.cellCount(); ++i) {
    EXPECT_NEAR(same.values()[i], lam.values()[i], 1e-15);
  }
  const auto finer = resample(lam, buildGrid(w, 2.0));
  EXPECT_NEAR(finer.integral(), 1.0, 1e-12);
}

TEST(Intensity, LowessWithoutRobustnessMatchesWeightedLeastSquares) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::normal_distribution<double> noise(0.0, 3.0);
  std::vector<double> x(60);
  for (double& v : x) v = u(rng);
  std::sort(x.begin(), x.end());
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 10 + 5 * std::sin(x[i] / 15) + noise(rng);
  for (double f : {0.2, 0.5, 2.0 / 3.0, 1.0}) {
    const auto fit = lowess(x, y, f, 0);
    const auto oracle = wlsLowess(x, y, f);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(fit[i], oracle[i], 1e-9) << f << " " << i;
  }
}

TEST(Intensity, LowessReproducesLinesExactly) {
  std::vector<double> x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    x[i] = i + 1;
    y[i] = 3.0 - 0.25 * x[i];
  }
  const auto fit = lowess(x, y, 2.0 / 3.0, 3);
  for (int i = 0; i < 30; ++i) EXPECT_NEAR(fit[i], y[i], 1e-10);
  EXPECT_THROW(lowess(x, y, 0.0), Error);
}

TEST(Intensity, TemporalComponents) {
  const auto w = PolygonWindow::rectangle(0, 0, 10, 10);
  const auto p = test::uniformPattern(w, 10, 20, 6);
  const auto mu = constantInTime(p);
  EXPECT_TRUE(mu.isConstant());
  EXPECT_DOUBLE_EQ(mu.at(3), 20.0);
  const auto smooth = muEstimate(p);
  EXPECT_EQ(smooth.intervalCount(), 10);
  for (double v : smooth.perInterval()) EXPECT_NEAR(v, 20.0, 1e-9);
  const auto scaled = scaleTemporal(std::vector<double>(10, 7.0), p);
  const auto per = scaled.perInterval();
  EXPECT_NEAR(std::accumulate(per.begin(), per.end(), 0.0), 200.0, 1e-9);
  EXPECT_THROW(TemporalIntensity::table({0, 5}, std::vector<double>(5, 1.0)).checkCompatible(p),
               Error);
}
