#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "lgcp/array.hpp"
#include "lgcp/fft.hpp"
#include "lgcp/geometry.hpp"

namespace lgcp {

enum class CovarianceFamily { Exponential, Whittle, Matern };

std::string to_string(CovarianceFamily family);
CovarianceFamily parseFamily(const std::string& name);

/// Separable stationary covariance
///   cov[Y(s1,t1), Y(s2,t2)] = sigma^2 r(|s2 - s1|; phi) exp(-theta |t2 - t1|).
struct CovarianceModel {
  CovarianceFamily family = CovarianceFamily::Exponential;
  double sigma = 1.0;
  double phi = 1.0;
  double theta = 1.0;
  double nu = 0.5;  // Matern smoothness, treated as known

  /// Spatial correlation r(d; phi); r(0) = 1.
  double correlation(double distance) const;
  /// Mean of the latent field, -sigma^2 / 2, so that E[exp Y] = 1.
  double fieldMean() const { return -0.5 * sigma * sigma; }
  void validate() const;
};

/// Matern correlation 2^(1-nu)/Gamma(nu) u^nu K_nu(u) at u = d / phi.
double maternCorrelation(double distance, double phi, double nu);

double spatialCovariance(const CovarianceModel& model, double distance);
double temporalCorrelation(const CovarianceModel& model, double lag);

/// Eigen-decomposition of the block-circulant embedding of the spatial
/// covariance on the doubled (2M x 2N) torus.
class SpectralEmbedding {
 public:
  std::size_t extNx() const noexcept { return extNx_; }
  std::size_t extNy() const noexcept { return extNy_; }
  std::size_t size() const noexcept { return extNx_ * extNy_; }
  double cellwidth() const noexcept { return cellwidth_; }
  double fieldMean() const noexcept { return fieldMean_; }
  /// Full extNx x extNy eigenvalue array (Lambda).
  const Array2& eigenvalues() const noexcept { return eigenvalues_; }
  double maxEigenvalue() const noexcept { return maxEigenvalue_; }
  /// Largest imaginary part seen in the DFT of the base row, relative to the
  /// largest eigenvalue.
  double relativeImaginary() const noexcept { return relativeImaginary_; }
  /// Number of eigenvalues that were clamped from small negatives to zero.
  std::size_t clampedCount() const noexcept { return clampedCount_; }

  /// Half-spectrum sqrt(Lambda) and its pseudo-inverse, matching RealFft2's
  /// packing.
  const std::vector<double>& sqrtHalf() const noexcept { return sqrtHalf_; }
  const std::vector<double>& invSqrtHalf() const noexcept { return invSqrtHalf_; }

 private:
  friend SpectralEmbedding buildEmbedding(const CovarianceModel&, std::size_t,
                                          std::size_t, double);
  std::size_t extNx_ = 0;
  std::size_t extNy_ = 0;
  double cellwidth_ = 1.0;
  double fieldMean_ = 0.0;
  Array2 eigenvalues_;
  double maxEigenvalue_ = 0.0;
  double relativeImaginary_ = 0.0;
  std::size_t clampedCount_ = 0;
  std::vector<double> sqrtHalf_;
  std::vector<double> invSqrtHalf_;
};

/// Relative tolerance below which negative eigenvalues are clamped to zero.
inline constexpr double kEigenClampTolerance = 1e-6;

/// Throws EmbeddingNotPSD if any eigenvalue is below -1e-6 * max.
SpectralEmbedding buildEmbedding(const CovarianceModel& model, const GridSpec& grid);
SpectralEmbedding buildEmbedding(const CovarianceModel& model, std::size_t extNx,
                                 std::size_t extNy, double cellwidth);

/// Base row of the circulant on the torus: sigma^2 r(d) with per-axis
/// minimum-image offsets.
Array2 circulantBaseRow(const CovarianceModel& model, std::size_t extNx,
                        std::size_t extNy, double cellwidth);

/// Per-worker FFT scratch for the spectral operators.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const SpectralEmbedding& embedding);

  /// out = C^{1/2} in (symmetric square root, hence self-adjoint).
  void applySqrt(std::span<const double> in, std::span<double> out);
  /// out = C^{-1/2} in on the positive-eigenvalue subspace, zero elsewhere.
  void applyInvSqrt(std::span<const double> in, std::span<double> out);

  const SpectralEmbedding& embedding() const noexcept { return *embedding_; }

 private:
  void applyDiagonal(const std::vector<double>& diag, std::span<const double> in,
                     std::span<double> out);
  const SpectralEmbedding* embedding_;
  RealFft2 fft_;
  std::vector<std::complex<double>> spectrum_;
};

/// fieldMean + C^{1/2} noise.
Array2 sampleField(const SpectralEmbedding& embedding, const Array2& whiteNoise);
Array2 sampleField(SpectralWorkspace& ws, const Array2& whiteNoise);

/// Gamma = Lambda^{-1/2}-whitened (Y - mean).
Array2 whiten(const SpectralEmbedding& embedding, const Array2& yExt);
Array2 whiten(SpectralWorkspace& ws, const Array2& yExt);
/// Y = mean + C^{1/2} Gamma.
Array2 unwhiten(const SpectralEmbedding& embedding, const Array2& gamma);
Array2 unwhiten(SpectralWorkspace& ws, const Array2& gamma);

}  // namespace lgcp
