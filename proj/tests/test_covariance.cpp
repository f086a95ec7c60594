#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "lgcp/covariance.hpp"
#include "lgcp/error.hpp"

using namespace lgcp;

namespace {

double torusDistance(std::size_t i, std::size_t j, std::size_t nx, std::size_t ny, double cw) {
  const auto ax = static_cast<long>(i % nx) - static_cast<long>(j % nx);
  const auto ay = static_cast<long>(i / nx) - static_cast<long>(j / nx);
  const double dx = std::min<double>(std::labs(ax), nx - std::labs(ax)) * cw;
  const double dy = std::min<double>(std::labs(ay), ny - std::labs(ay)) * cw;
  return std::hypot(dx, dy);
}

Eigen::MatrixXd denseCirculant(const CovarianceModel& m, std::size_t nx, std::size_t ny,
                               double cw) {
  const std::size_t n = nx * ny;
  Eigen::MatrixXd c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c(i, j) = m.sigma * m.sigma * m.correlation(torusDistance(i, j, nx, ny, cw));
    }
  }
  return c;
}

}  // namespace

TEST(Covariance, MaternMatchesStandardLibraryBessel) {
  for (double nu : {0.5, 1.0, 1.5, 2.5, 3.7}) {
    for (double d : {0.01, 0.3, 1.0, 2.2, 7.5}) {
      const double u = d / 1.3;
      const double oracle = std::pow(2.0, 1 - nu) / std::tgamma(nu) * std::pow(u, nu) *
                            std::cyl_bessel_k(nu, u);
      EXPECT_NEAR(maternCorrelation(d, 1.3, nu), oracle, 1e-12 * std::max(1.0, oracle));
    }
  }
  EXPECT_DOUBLE_EQ(maternCorrelation(0.0, 1.3, 2.0), 1.0);
  EXPECT_NEAR(maternCorrelation(2.0, 1.3, 0.5), std::exp(-2.0 / 1.3), 1e-14);
}

TEST(Covariance, FamiliesAndValidation) {
  CovarianceModel m{CovarianceFamily::Exponential, 1.5, 2.0, 1.0, 0.5};
  EXPECT_DOUBLE_EQ(spatialCovariance(m, 0.0), 2.25);
  EXPECT_NEAR(spatialCovariance(m, 3.0), 2.25 * std::exp(-1.5), 1e-14);
  EXPECT_NEAR(temporalCorrelation(m, 2.0), std::exp(-2.0), 1e-15);
  EXPECT_THROW(spatialCovariance(m, -1.0), Error);
  EXPECT_THROW(temporalCorrelation(m, -1.0), Error);
  m.family = CovarianceFamily::Whittle;
  EXPECT_NEAR(m.correlation(2.0), maternCorrelation(2.0, 2.0, 1.0), 1e-14);
  EXPECT_DOUBLE_EQ(m.fieldMean(), -1.125);
  m.phi = 0.0;
  EXPECT_THROW(m.validate(), Error);
  EXPECT_EQ(parseFamily("matern"), CovarianceFamily::Matern);
  EXPECT_THROW(parseFamily("spherical"), Error);
}

TEST(Covariance, BaseRowUsesMinimumImageDistances) {
  const CovarianceModel m{CovarianceFamily::Exponential, 1.0, 2.0, 1.0, 0.5};
  const Array2 row = circulantBaseRow(m, 8, 8, 0.5);
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      EXPECT_NEAR(row(x, y), m.correlation(torusDistance(y * 8 + x, 0, 8, 8, 0.5)), 1e-15);
    }
  }
}

TEST(Covariance, EigenvaluesMatchDenseDecomposition) {
  const CovarianceModel m{CovarianceFamily::Matern, 1.3, 0.8, 1.0, 1.5};
  const auto emb = buildEmbedding(m, 16, 8, 1.0);
  const Eigen::MatrixXd c = denseCirculant(m, 16, 8, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  std::vector<double> dense(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + solver.eigenvalues().size());
  std::vector<double> fft(emb.eigenvalues().raw());
  std::sort(fft.begin(), fft.end());
  ASSERT_EQ(fft.size(), dense.size());
  for (std::size_t i = 0; i < fft.size(); ++i) EXPECT_NEAR(fft[i], dense[i], 1e-10);
  EXPECT_LT(emb.relativeImaginary(), 1e-12);
}

TEST(Covariance, SquareRootSquaresToTheDenseCirculant) {
  const CovarianceModel m{CovarianceFamily::Exponential, 1.6, 1.9, 1.4, 0.5};
  const auto emb = buildEmbedding(m, 16, 16, 2.0);
  SpectralWorkspace ws(emb);
  const Eigen::MatrixXd c = denseCirculant(m, 16, 16, 2.0);
  std::vector<double> e(256), half(256), col(256);
  double worst = 0.0;
  for (std::size_t j = 0; j < 256; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    ws.applySqrt(e, half);
    ws.applySqrt(half, col);
    for (std::size_t i = 0; i < 256; ++i) worst = std::max(worst, std::abs(col[i] - c(i, j)));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Covariance, SquareRootIsSymmetric) {
  const CovarianceModel m{CovarianceFamily::Whittle, 1.0, 1.2, 1.0, 1.0};
  const auto emb = buildEmbedding(m, 8, 8, 1.0);
  SpectralWorkspace ws(emb);
  Eigen::MatrixXd s(64, 64);
  std::vector<double> e(64), col(64);
  for (std::size_t j = 0; j < 64; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    ws.applySqrt(e, col);
    for (std::size_t i = 0; i < 64; ++i) s(i, j) = col[i];
  }
  EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Covariance, WhitenInvertsUnwhiten) {
  const CovarianceModel m{CovarianceFamily::Exponential, 1.2, 3.0, 1.0, 0.5};
  const auto emb = buildEmbedding(m, 32, 32, 1.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  Array2 gamma(32, 32);
  for (double& v : gamma.raw()) v = z(rng);
  const Array2 y = unwhiten(emb, gamma);
  const Array2 back = whiten(emb, y);
  // Gamma components on clamped (zero) eigenvalues are not recoverable.
  ASSERT_EQ(emb.clampedCount(), 0u);
  for (std::size_t i = 0; i < gamma.size(); ++i) EXPECT_NEAR(back[i], gamma[i], 1e-9);
}

TEST(Covariance, NonEmbeddableModelIsRejected) {
  // A very smooth, long-range field does not embed on a small torus.
  const CovarianceModel m{CovarianceFamily::Matern, 1.0, 6.0, 1.0, 4.0};
  try {
    buildEmbedding(m, 8, 8, 1.0);
    FAIL() << "expected EmbeddingNotPSD";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmbeddingNotPSD);
  }
}

TEST(Covariance, SampleFieldIsDeterministicGivenNoise) {
  const CovarianceModel m{CovarianceFamily::Exponential, 1.0, 2.0, 1.0, 0.5};
  const auto emb = buildEmbedding(m, 16, 16, 1.0);
  Array2 noise(16, 16);
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = std::sin(1.0 + i);
  const Array2 a = sampleField(emb, noise);
  const Array2 b = sampleField(emb, noise);
  EXPECT_EQ(a, b);
  const Array2 zero = sampleField(emb, Array2(16, 16));
  for (double v : zero.raw()) EXPECT_NEAR(v, m.fieldMean(), 1e-15);
}
