#include "lgcp/covariance.hpp"

#include <algorithm>
#include <cmath>

#include "lgcp/error.hpp"

namespace lgcp {

std::string to_string(CovarianceFamily family) {
  switch (family) {
    case CovarianceFamily::Exponential: return "exponential";
    case CovarianceFamily::Whittle: return "whittle";
    case CovarianceFamily::Matern: return "matern";
  }
  return "exponential";
}

CovarianceFamily parseFamily(const std::string& name) {
  if (name == "exponential") return CovarianceFamily::Exponential;
  if (name == "whittle") return CovarianceFamily::Whittle;
  if (name == "matern") return CovarianceFamily::Matern;
  throw Error(ErrorCode::InvalidArgument, "unknown covariance family '" + name + "'");
}

double maternCorrelation(double distance, double phi, double nu) {
  const double u = distance / phi;
  if (u < 1e-12) return 1.0;
  if (u > 700.0) return 0.0;
  const double logr = (1.0 - nu) * std::log(2.0) - std::lgamma(nu) + nu * std::log(u) +
                      std::log(std::cyl_bessel_k(nu, u));
  return std::min(1.0, std::exp(logr));
}

double CovarianceModel::correlation(double distance) const {
  switch (family) {
    case CovarianceFamily::Exponential: return std::exp(-distance / phi);
    case CovarianceFamily::Whittle: return maternCorrelation(distance, phi, 1.0);
    case CovarianceFamily::Matern: return maternCorrelation(distance, phi, nu);
  }
  return 0.0;
}

void CovarianceModel::validate() const {
  if (!(sigma >= 0.0) || !(phi > 0.0) || !(theta > 0.0) || !std::isfinite(sigma) ||
      !std::isfinite(phi) || !std::isfinite(theta)) {
    throw Error(ErrorCode::InvalidArgument, "covariance needs sigma >= 0, phi > 0, theta > 0");
  }
  if (family == CovarianceFamily::Matern && !(nu > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "matern smoothness nu must be positive");
  }
}

double spatialCovariance(const CovarianceModel& model, double distance) {
  if (!(distance >= 0.0)) {
    throw Error(ErrorCode::NegativeDistance, "distance must be non-negative");
  }
  return model.sigma * model.sigma * model.correlation(distance);
}

double temporalCorrelation(const CovarianceModel& model, double lag) {
  if (!(lag >= 0.0)) throw Error(ErrorCode::NegativeLag, "time lag must be non-negative");
  return std::exp(-model.theta * lag);
}

Array2 circulantBaseRow(const CovarianceModel& model, std::size_t extNx,
                        std::size_t extNy, double cellwidth) {
  Array2 row(extNx, extNy);
  const double var = model.sigma * model.sigma;
  for (std::size_t j = 0; j < extNy; ++j) {
    const double dy = static_cast<double>(std::min(j, extNy - j)) * cellwidth;
    for (std::size_t i = 0; i < extNx; ++i) {
      const double dx = static_cast<double>(std::min(i, extNx - i)) * cellwidth;
      row(i, j) = var * model.correlation(std::hypot(dx, dy));
    }
  }
  return row;
}

SpectralEmbedding buildEmbedding(const CovarianceModel& model, const GridSpec& grid) {
  return buildEmbedding(model, grid.extNx(), grid.extNy(), grid.cellwidth);
}

SpectralEmbedding buildEmbedding(const CovarianceModel& model, std::size_t extNx,
                                 std::size_t extNy, double cellwidth) {
  model.validate();
  if (extNx == 0 || extNy == 0 || (extNx & (extNx - 1)) || (extNy & (extNy - 1))) {
    throw Error(ErrorCode::DimMismatch, "extended grid dimensions must be powers of two");
  }
  const Array2 row = circulantBaseRow(model, extNx, extNy, cellwidth);
  RealFft2 fft(extNx, extNy);
  std::vector<std::complex<double>> spec(fft.spectrumSize());
  fft.forward(row.values(), spec);

  SpectralEmbedding e;
  e.extNx_ = extNx;
  e.extNy_ = extNy;
  e.cellwidth_ = cellwidth;
  e.fieldMean_ = model.fieldMean();

  double maxEig = 0.0, maxImag = 0.0;
  for (const auto& c : spec) {
    maxEig = std::max(maxEig, c.real());
    maxImag = std::max(maxImag, std::abs(c.imag()));
  }
  if (!(maxEig > 0.0)) {
    throw Error(ErrorCode::EmbeddingNotPSD, "circulant embedding has no positive eigenvalue");
  }
  e.maxEigenvalue_ = maxEig;
  e.relativeImaginary_ = maxImag / maxEig;

  const std::size_t halfX = extNx / 2 + 1;
  e.sqrtHalf_.resize(spec.size());
  e.invSqrtHalf_.resize(spec.size());
  std::vector<double> half(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    double lam = spec[i].real();
    if (lam < 0.0) {
      if (lam < -kEigenClampTolerance * maxEig) {
        throw Error(ErrorCode::EmbeddingNotPSD,
                    "circulant embedding has eigenvalue " + std::to_string(lam) +
                        "; enlarge the grid or reduce phi");
      }
      lam = 0.0;
      ++e.clampedCount_;
    }
    half[i] = lam;
    e.sqrtHalf_[i] = std::sqrt(lam);
    e.invSqrtHalf_[i] = lam > 1e-12 * maxEig ? 1.0 / std::sqrt(lam) : 0.0;
  }

  e.eigenvalues_ = Array2(extNx, extNy);
  for (std::size_t ky = 0; ky < extNy; ++ky) {
    for (std::size_t kx = 0; kx < extNx; ++kx) {
      if (kx < halfX) {
        e.eigenvalues_(kx, ky) = half[ky * halfX + kx];
      } else {
        // Hermitian symmetry of a real input: X(k) = conj X(-k).
        const std::size_t mx = extNx - kx;
        const std::size_t my = (extNy - ky) % extNy;
        e.eigenvalues_(kx, ky) = half[my * halfX + mx];
      }
    }
  }
  return e;
}

SpectralWorkspace::SpectralWorkspace(const SpectralEmbedding& embedding)
    : embedding_(&embedding),
      fft_(embedding.extNx(), embedding.extNy()),
      spectrum_(fft_.spectrumSize()) {}

void SpectralWorkspace::applyDiagonal(const std::vector<double>& diag,
                                      std::span<const double> in, std::span<double> out) {
  if (in.size() != fft_.realSize() || out.size() != fft_.realSize()) {
    throw Error(ErrorCode::DimMismatch, "field size does not match the embedding");
  }
  fft_.forward(in, spectrum_);
  for (std::size_t i = 0; i < spectrum_.size(); ++i) spectrum_[i] *= diag[i];
  fft_.inverse(spectrum_, out);
  const double scale = 1.0 / static_cast<double>(fft_.realSize());
  for (double& v : out) v *= scale;
}

void SpectralWorkspace::applySqrt(std::span<const double> in, std::span<double> out) {
  applyDiagonal(embedding_->sqrtHalf(), in, out);
}

void SpectralWorkspace::applyInvSqrt(std::span<const double> in, std::span<double> out) {
  applyDiagonal(embedding_->invSqrtHalf(), in, out);
}

namespace {
void checkDims(const SpectralEmbedding& e, const Array2& a) {
  if (a.nx() != e.extNx() || a.ny() != e.extNy()) {
    throw Error(ErrorCode::DimMismatch, "array must be " + std::to_string(e.extNx()) + "x" +
                                            std::to_string(e.extNy()));
  }
}
}  // namespace

Array2 sampleField(SpectralWorkspace& ws, const Array2& whiteNoise) {
  return unwhiten(ws, whiteNoise);
}

Array2 sampleField(const SpectralEmbedding& embedding, const Array2& whiteNoise) {
  SpectralWorkspace ws(embedding);
  return sampleField(ws, whiteNoise);
}

Array2 unwhiten(SpectralWorkspace& ws, const Array2& gamma) {
  const auto& e = ws.embedding();
  checkDims(e, gamma);
  Array2 y(e.extNx(), e.extNy());
  ws.applySqrt(gamma.values(), y.values());
  for (double& v : y.values()) v += e.fieldMean();
  return y;
}

Array2 unwhiten(const SpectralEmbedding& embedding, const Array2& gamma) {
  SpectralWorkspace ws(embedding);
  return unwhiten(ws, gamma);
}

Array2 whiten(SpectralWorkspace& ws, const Array2& yExt) {
  const auto& e = ws.embedding();
  checkDims(e, yExt);
  Array2 centred = yExt;
  for (double& v : centred.values()) v -= e.fieldMean();
  Array2 gamma(e.extNx(), e.extNy());
  ws.applyInvSqrt(centred.values(), gamma.values());
  return gamma;
}

Array2 whiten(const SpectralEmbedding& embedding, const Array2& yExt) {
  SpectralWorkspace ws(embedding);
  return whiten(ws, yExt);
}

}  // namespace lgcp
