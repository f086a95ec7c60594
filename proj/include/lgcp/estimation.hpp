#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lgcp/array.hpp"
#include "lgcp/covariance.hpp"
#include "lgcp/geometry.hpp"
#include "lgcp/intensity.hpp"

namespace lgcp {

enum class SummaryKind { Pcf, KFunction };

std::string to_string(SummaryKind kind);
SummaryKind parseSummaryKind(const std::string& name);  // "g" / "pcf" / "k" / "kfun"

struct SecondOrderSummary {
  SummaryKind kind = SummaryKind::Pcf;
  std::vector<double> r;
  std::vector<double> empirical;
  std::vector<double> weights;
  int intervalsUsed = 0;
};

struct TemporalAcf {
  std::vector<int> lags;
  std::vector<double> values;
};

/// Set covariance A(h) = |W ∩ (W + h)| of a window, tabulated on a raster by
/// FFT autocorrelation of the window mask and bilinearly interpolated.
class SetCovariance {
 public:
  explicit SetCovariance(const PolygonWindow& window, std::size_t resolution = 256);
  double operator()(double hx, double hy) const;

 private:
  std::size_t n_;  // padded raster size per axis (2 * resolution)
  double step_;    // raster cell size
  Array2 table_;   // wrapped lags, index (i, j) <-> (i * step, j * step)
};

/// `count` equally spaced distances up to a quarter of the window's shorter
/// side, excluding zero.
std::vector<double> defaultRGrid(const PolygonWindow& window, std::size_t count = 128);

/// Event-count weighted average over unit intervals of the inhomogeneous
/// pair correlation function, using intensity lambda(s) mu(t), an
/// Epanechnikov smoothing kernel of half-width 0.15 / sqrt(n_t / |W|) and
/// translation edge correction.
SecondOrderSummary ginhomAverage(const SpaceTimePointPattern& pattern,
                                 const SpatialIntensity& lambda,
                                 const TemporalIntensity& mu,
                                 const std::vector<double>& rGrid);

/// As ginhomAverage for the inhomogeneous K-function.
SecondOrderSummary kinhomAverage(const SpaceTimePointPattern& pattern,
                                 const SpatialIntensity& lambda,
                                 const TemporalIntensity& mu,
                                 const std::vector<double>& rGrid);

/// g(r) = exp(sigma^2 r(r; phi)).
double theoreticalG(const CovarianceModel& model, double r);
/// K(r) = 2 pi int_0^r s g(s) ds by adaptive quadrature.
double theoreticalK(const CovarianceModel& model, double r);
/// Theoretical curve on an ascending r grid (K integrated segment by segment).
std::vector<double> theoreticalCurve(const CovarianceModel& model, SummaryKind kind,
                                     const std::vector<double>& rGrid);

/// Weighted contrast sum_r w(r) (emp^(1/4) - theo^(1/4))^2.
double contrast(const SecondOrderSummary& summary, const CovarianceModel& model);

struct SpatialFit {
  double sigma = 0.0;
  double phi = 0.0;
  double contrastValue = 0.0;
  bool argminOnBoundary = false;
};

/// Minimum-contrast estimate of (sigma, phi): 64 x 64 grid search over the
/// rectangle followed by Nelder-Mead refinement.
SpatialFit fitSpatialPars(const SecondOrderSummary& summary, CovarianceFamily family,
                          double nu, std::pair<double, double> sigmaRange,
                          std::pair<double, double> phiRange);

/// Sample autocorrelation at lags 1..maxLag of the per-interval counts minus
/// mu(t).
TemporalAcf countAcf(const SpaceTimePointPattern& pattern, int maxLag,
                     const TemporalIntensity& mu);
/// Uses the constant-in-time mu.
TemporalAcf countAcf(const SpaceTimePointPattern& pattern, int maxLag);

struct ThetaFit {
  double theta = 0.0;
  double scale = 1.0;  // nuisance c in rho(v) = c exp(-theta v)
  double residual = 0.0;
  bool argminOnBoundary = false;
};

/// Optimal c in (0, 1] for a given theta.
double acfScaleForTheta(const TemporalAcf& acf, double theta);
/// Residual sum of squares of c exp(-theta v) with c profiled out.
double acfResidual(const TemporalAcf& acf, double theta);

/// Least-squares fit of c exp(-theta v) to the empirical autocorrelation.
ThetaFit fitTheta(const TemporalAcf& acf, std::pair<double, double> thetaRange);

}  // namespace lgcp
