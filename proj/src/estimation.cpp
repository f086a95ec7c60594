#include "lgcp/estimation.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>

#include "lgcp/error.hpp"
#include "lgcp/fft.hpp"

namespace lgcp {

std::string to_string(SummaryKind kind) {
  return kind == SummaryKind::Pcf ? "g" : "k";
}

SummaryKind parseSummaryKind(const std::string& name) {
  if (name == "g" || name == "pcf") return SummaryKind::Pcf;
  if (name == "k" || name == "K" || name == "kfun") return SummaryKind::KFunction;
  throw Error(ErrorCode::InvalidArgument, "unknown summary kind '" + name + "'");
}

SetCovariance::SetCovariance(const PolygonWindow& window, std::size_t resolution)
    : n_(2 * resolution) {
  const auto& bb = window.bbox();
  step_ = std::max(bb.width(), bb.height()) / static_cast<double>(resolution);
  std::vector<double> mask(n_ * n_, 0.0);
  for (std::size_t j = 0; j < resolution; ++j) {
    for (std::size_t i = 0; i < resolution; ++i) {
      const Point2 c{bb.xmin + (static_cast<double>(i) + 0.5) * step_,
                     bb.ymin + (static_cast<double>(j) + 0.5) * step_};
      if (window.contains(c)) mask[j * n_ + i] = 1.0;
    }
  }
  RealFft2 fft(n_, n_);
  std::vector<std::complex<double>> spec(fft.spectrumSize());
  fft.forward(mask, spec);
  for (auto& c : spec) c = std::norm(c);
  table_ = Array2(n_, n_);
  fft.inverse(spec, table_.values());
  const double scale = step_ * step_ / static_cast<double>(n_ * n_);
  for (double& v : table_.values()) v = std::max(0.0, v * scale);
}

double SetCovariance::operator()(double hx, double hy) const {
  const double fx = std::abs(hx) / step_;
  const double fy = std::abs(hy) / step_;
  const double half = static_cast<double>(n_ / 2);
  if (fx >= half - 1.0 || fy >= half - 1.0) return 0.0;
  const auto ix = static_cast<std::size_t>(fx);
  const auto iy = static_cast<std::size_t>(fy);
  const double tx = fx - static_cast<double>(ix);
  const double ty = fy - static_cast<double>(iy);
  // |h| lookup is valid because A(hx, hy) = A(-hx, -hy); the mixed-sign case
  // uses the wrapped negative x lag.
  auto at = [&](std::size_t i, std::size_t j) {
    const bool flip = (hx < 0) != (hy < 0);
    const std::size_t col = (flip && i != 0) ? n_ - i : i;
    return table_(col, j);
  };
  return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix + 1, iy) +
         (1 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
}

std::vector<double> defaultRGrid(const PolygonWindow& window, std::size_t count) {
  const auto& bb = window.bbox();
  const double rmax = 0.25 * std::min(bb.width(), bb.height());
  std::vector<double> r(count);
  for (std::size_t k = 0; k < count; ++k) {
    r[k] = rmax * static_cast<double>(k + 1) / static_cast<double>(count);
  }
  return r;
}

namespace {

void checkRGrid(const std::vector<double>& r) {
  if (r.empty()) throw Error(ErrorCode::InvalidArgument, "empty r grid");
  if (!(r.front() >= 0.0)) throw Error(ErrorCode::InvalidArgument, "r grid must be >= 0");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "r grid must be strictly increasing");
    }
  }
}

// lambda at an event; events in boundary cells whose centroid falls outside
// the window take the value of the nearest inside cell.
double lambdaAtEvent(const SpatialIntensity& lambda, Point2 p) {
  const double v = lambda.at(p);
  if (v > 0.0) return v;
  const GridSpec& g = lambda.grid();
  auto cell = g.cellOf(p);
  if (!cell) return 0.0;
  const auto cx = static_cast<long>((*cell)[0]);
  const auto cy = static_cast<long>((*cell)[1]);
  for (long radius = 1; radius <= 3; ++radius) {
    double best = 0.0, bestDist = std::numeric_limits<double>::infinity();
    for (long dy = -radius; dy <= radius; ++dy) {
      for (long dx = -radius; dx <= radius; ++dx) {
        const long x = cx + dx, y = cy + dy;
        if (x < 0 || y < 0 || x >= static_cast<long>(g.nx) || y >= static_cast<long>(g.ny)) {
          continue;
        }
        const double val = lambda(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
        const double dist = double(dx * dx + dy * dy);
        if (val > 0.0 && dist < bestDist) {
          best = val;
          bestDist = dist;
        }
      }
    }
    if (best > 0.0) return best;
  }
  return 0.0;
}

struct IntervalPoints {
  int interval;
  double mu;
  std::vector<Point2> pts;
  std::vector<double> rho;
};

std::vector<IntervalPoints> groupByInterval(const SpaceTimePointPattern& pattern,
                                            const SpatialIntensity& lambda,
                                            const TemporalIntensity& mu) {
  mu.checkCompatible(pattern);
  const int k = pattern.intervalCount();
  std::vector<IntervalPoints> groups(static_cast<std::size_t>(k));
  for (int t = 1; t <= k; ++t) {
    groups[static_cast<std::size_t>(t - 1)].interval = t;
    groups[static_cast<std::size_t>(t - 1)].mu = mu.at(t);
  }
  for (const auto& e : pattern.events()) {
    auto& g = groups[static_cast<std::size_t>(pattern.timeIndex(e.t) - 1)];
    const double l = lambdaAtEvent(lambda, {e.x, e.y});
    if (!(l > 0.0) || !(g.mu > 0.0)) continue;
    g.pts.push_back({e.x, e.y});
    g.rho.push_back(l * g.mu);
  }
  std::erase_if(groups, [](const IntervalPoints& g) { return g.pts.size() < 2; });
  if (groups.empty()) {
    throw Error(ErrorCode::TooFewEvents, "no unit interval has two or more events");
  }
  return groups;
}

double epanechnikov(double u, double h) {
  const double z = u / h;
  return std::abs(z) <= 1.0 ? 0.75 * (1.0 - z * z) / h : 0.0;
}

}  // namespace

SecondOrderSummary ginhomAverage(const SpaceTimePointPattern& pattern,
                                 const SpatialIntensity& lambda,
                                 const TemporalIntensity& mu,
                                 const std::vector<double>& rGrid) {
  checkRGrid(rGrid);
  const auto groups = groupByInterval(pattern, lambda, mu);
  const SetCovariance setcov(pattern.window());
  const double area = pattern.window().area();
  const std::size_t nr = rGrid.size();
  const double rmax = rGrid.back();

  std::vector<double> total(nr, 0.0);
  double weightSum = 0.0;
  std::vector<double> g(nr);
  for (const auto& grp : groups) {
    const std::size_t n = grp.pts.size();
    const double bw = 0.15 / std::sqrt(static_cast<double>(n) / area);
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = grp.pts[j].x - grp.pts[i].x;
        const double dy = grp.pts[j].y - grp.pts[i].y;
        const double d = std::hypot(dx, dy);
        if (d > rmax + bw) continue;
        const double a = setcov(dx, dy);
        if (!(a > 0.0)) continue;
        const double w = 2.0 / (grp.rho[i] * grp.rho[j] * a);
        auto it = std::lower_bound(rGrid.begin(), rGrid.end(), d - bw);
        for (; it != rGrid.end() && *it <= d + bw; ++it) {
          const double r = *it;
          // Reflection at r = 0 keeps the kernel mass near the origin.
          const double k = epanechnikov(r - d, bw) + epanechnikov(r + d, bw);
          g[static_cast<std::size_t>(it - rGrid.begin())] += w * k;
        }
      }
    }
    for (std::size_t k = 0; k < nr; ++k) {
      g[k] = rGrid[k] > 0.0 ? g[k] / (2.0 * std::numbers::pi * rGrid[k]) : 0.0;
      total[k] += static_cast<double>(n) * g[k];
    }
    weightSum += static_cast<double>(n);
  }
  SecondOrderSummary s;
  s.kind = SummaryKind::Pcf;
  s.r = rGrid;
  s.empirical.resize(nr);
  for (std::size_t k = 0; k < nr; ++k) s.empirical[k] = total[k] / weightSum;
  s.weights.assign(nr, 1.0);
  s.intervalsUsed = static_cast<int>(groups.size());
  return s;
}

SecondOrderSummary kinhomAverage(const SpaceTimePointPattern& pattern,
                                 const SpatialIntensity& lambda,
                                 const TemporalIntensity& mu,
                                 const std::vector<double>& rGrid) {
  checkRGrid(rGrid);
  const auto groups = groupByInterval(pattern, lambda, mu);
  const SetCovariance setcov(pattern.window());
  const std::size_t nr = rGrid.size();
  const double rmax = rGrid.back();

  std::vector<double> total(nr, 0.0);
  double weightSum = 0.0;
  std::vector<double> hist(nr);
  for (const auto& grp : groups) {
    const std::size_t n = grp.pts.size();
    std::fill(hist.begin(), hist.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = grp.pts[j].x - grp.pts[i].x;
        const double dy = grp.pts[j].y - grp.pts[i].y;
        const double d = std::hypot(dx, dy);
        if (d > rmax) continue;
        const double a = setcov(dx, dy);
        if (!(a > 0.0)) continue;
        const auto idx =
            static_cast<std::size_t>(std::lower_bound(rGrid.begin(), rGrid.end(), d) - rGrid.begin());
        hist[idx] += 2.0 / (grp.rho[i] * grp.rho[j] * a);
      }
    }
    double cumulative = 0.0;
    for (std::size_t k = 0; k < nr; ++k) {
      cumulative += hist[k];
      total[k] += static_cast<double>(n) * cumulative;
    }
    weightSum += static_cast<double>(n);
  }
  SecondOrderSummary s;
  s.kind = SummaryKind::KFunction;
  s.r = rGrid;
  s.empirical.resize(nr);
  for (std::size_t k = 0; k < nr; ++k) s.empirical[k] = total[k] / weightSum;
  s.weights.assign(nr, 1.0);
  s.intervalsUsed = static_cast<int>(groups.size());
  return s;
}

double theoreticalG(const CovarianceModel& model, double r) {
  return std::exp(model.sigma * model.sigma * model.correlation(r));
}

namespace {

struct QuadWorkspace {
  gsl_integration_workspace* ws;
  QuadWorkspace() : ws(gsl_integration_workspace_alloc(1000)) {}
  ~QuadWorkspace() { gsl_integration_workspace_free(ws); }
  QuadWorkspace(const QuadWorkspace&) = delete;
  QuadWorkspace& operator=(const QuadWorkspace&) = delete;
};

double kIntegrand(double s, void* params) {
  const auto* m = static_cast<const CovarianceModel*>(params);
  return 2.0 * std::numbers::pi * s * theoreticalG(*m, s);
}

double integrateK(const CovarianceModel& model, double a, double b, QuadWorkspace& ws) {
  if (b <= a) return 0.0;
  gsl_function fn{&kIntegrand, const_cast<CovarianceModel*>(&model)};
  double result = 0.0, abserr = 0.0;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  const int status = gsl_integration_qag(&fn, a, b, 1e-10, 1e-13, 1000, GSL_INTEG_GAUSS21,
                                         ws.ws, &result, &abserr);
  gsl_set_error_handler(old);
  if (status != GSL_SUCCESS && status != GSL_EROUND) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("K quadrature failed: ") + gsl_strerror(status));
  }
  return result;
}

}  // namespace

double theoreticalK(const CovarianceModel& model, double r) {
  if (!(r >= 0.0)) throw Error(ErrorCode::NegativeDistance, "r must be non-negative");
  QuadWorkspace ws;
  return integrateK(model, 0.0, r, ws);
}

std::vector<double> theoreticalCurve(const CovarianceModel& model, SummaryKind kind,
                                     const std::vector<double>& rGrid) {
  std::vector<double> out(rGrid.size());
  if (kind == SummaryKind::Pcf) {
    for (std::size_t k = 0; k < rGrid.size(); ++k) out[k] = theoreticalG(model, rGrid[k]);
    return out;
  }
  QuadWorkspace ws;
  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < rGrid.size(); ++k) {
    acc += integrateK(model, prev, rGrid[k], ws);
    prev = rGrid[k];
    out[k] = acc;
  }
  return out;
}

double contrast(const SecondOrderSummary& summary, const CovarianceModel& model) {
  const std::vector<double> theo = theoreticalCurve(model, summary.kind, summary.r);
  double c = 0.0;
  for (std::size_t k = 0; k < theo.size(); ++k) {
    const double d = std::pow(std::max(0.0, summary.empirical[k]), 0.25) -
                     std::pow(std::max(0.0, theo[k]), 0.25);
    c += summary.weights[k] * d * d;
  }
  return c;
}

namespace {

struct ContrastProblem {
  const SecondOrderSummary* summary;
  CovarianceModel model;
  std::pair<double, double> sigmaRange, phiRange;
};

double contrastAt(const ContrastProblem& p, double sigma, double phi) {
  CovarianceModel m = p.model;
  m.sigma = sigma;
  m.phi = phi;
  return contrast(*p.summary, m);
}

double nmObjective(const gsl_vector* v, void* params) {
  const auto* p = static_cast<const ContrastProblem*>(params);
  const double s = gsl_vector_get(v, 0), f = gsl_vector_get(v, 1);
  if (s < p->sigmaRange.first || s > p->sigmaRange.second || f <= p->phiRange.first ||
      f > p->phiRange.second || f <= 0.0) {
    return std::numeric_limits<double>::max();
  }
  return contrastAt(*p, s, f);
}

}  // namespace

SpatialFit fitSpatialPars(const SecondOrderSummary& summary, CovarianceFamily family,
                          double nu, std::pair<double, double> sigmaRange,
                          std::pair<double, double> phiRange) {
  if (!(sigmaRange.first >= 0.0 && sigmaRange.second > sigmaRange.first &&
        phiRange.first >= 0.0 && phiRange.second > phiRange.first)) {
    throw Error(ErrorCode::InvalidArgument, "parameter ranges must be positive and non-degenerate");
  }
  ContrastProblem prob{&summary, CovarianceModel{family, 1.0, 1.0, 1.0, nu}, sigmaRange,
                       phiRange};
  constexpr int kGrid = 64;
  const double ds = (sigmaRange.second - sigmaRange.first) / kGrid;
  const double dp = (phiRange.second - phiRange.first) / kGrid;
  double best = std::numeric_limits<double>::infinity();
  double bestS = 0.0, bestP = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double s = sigmaRange.first + (i + 0.5) * ds;
    for (int j = 0; j < kGrid; ++j) {
      const double f = phiRange.first + (j + 0.5) * dp;
      const double c = contrastAt(prob, s, f);
      if (c < best) {
        best = c;
        bestS = s;
        bestP = f;
      }
    }
  }

  gsl_multimin_function fn{&nmObjective, 2, &prob};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(2),
                                                               gsl_vector_free);
  gsl_vector_set(x.get(), 0, bestS);
  gsl_vector_set(x.get(), 1, bestP);
  gsl_vector_set(step.get(), 0, 0.5 * ds);
  gsl_vector_set(step.get(), 1, 0.5 * dp);
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2),
      gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get());
  for (int iter = 0; iter < 5000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), 1e-6) == GSL_SUCCESS) {
      break;
    }
  }
  SpatialFit fit;
  fit.sigma = bestS;
  fit.phi = bestP;
  fit.contrastValue = best;
  if (nm->fval < best) {
    fit.sigma = gsl_vector_get(nm->x, 0);
    fit.phi = gsl_vector_get(nm->x, 1);
    fit.contrastValue = nm->fval;
  }
  const double ts = 1e-3 * (sigmaRange.second - sigmaRange.first);
  const double tp = 1e-3 * (phiRange.second - phiRange.first);
  fit.argminOnBoundary = fit.sigma - sigmaRange.first < ts ||
                         sigmaRange.second - fit.sigma < ts ||
                         fit.phi - phiRange.first < tp || phiRange.second - fit.phi < tp;
  return fit;
}

TemporalAcf countAcf(const SpaceTimePointPattern& pattern, int maxLag,
                     const TemporalIntensity& mu) {
  mu.checkCompatible(pattern);
  const int t = pattern.intervalCount();
  if (maxLag < 1 || t < maxLag + 2) {
    throw Error(ErrorCode::SeriesTooShort,
                "need at least maxLag + 2 unit intervals for the autocorrelation");
  }
  std::vector<double> e = pattern.intervalCounts();
  const std::vector<double> m = mu.perInterval();
  double mean = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] -= m[i];
    mean += e[i];
  }
  mean /= static_cast<double>(e.size());
  double denom = 0.0;
  for (double& v : e) {
    v -= mean;
    denom += v * v;
  }
  if (!(denom > 1e-12)) {
    throw Error(ErrorCode::ZeroVariance, "count residuals have zero variance");
  }
  TemporalAcf acf;
  for (int lag = 1; lag <= maxLag; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < e.size(); ++i) {
      s += e[i] * e[i + static_cast<std::size_t>(lag)];
    }
    acf.lags.push_back(lag);
    acf.values.push_back(s / denom);
  }
  return acf;
}

TemporalAcf countAcf(const SpaceTimePointPattern& pattern, int maxLag) {
  return countAcf(pattern, maxLag, constantInTime(pattern));
}

double acfScaleForTheta(const TemporalAcf& acf, double theta) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < acf.lags.size(); ++i) {
    const double b = std::exp(-theta * acf.lags[i]);
    num += acf.values[i] * b;
    den += b * b;
  }
  constexpr double kMinScale = 1e-12;
  if (!(den > 0.0)) return kMinScale;
  return std::clamp(num / den, kMinScale, 1.0);
}

double acfResidual(const TemporalAcf& acf, double theta) {
  const double c = acfScaleForTheta(acf, theta);
  double rss = 0.0;
  for (std::size_t i = 0; i < acf.lags.size(); ++i) {
    const double d = acf.values[i] - c * std::exp(-theta * acf.lags[i]);
    rss += d * d;
  }
  return rss;
}

ThetaFit fitTheta(const TemporalAcf& acf, std::pair<double, double> thetaRange) {
  if (acf.lags.empty()) throw Error(ErrorCode::SeriesTooShort, "empty autocorrelation");
  if (!(thetaRange.first >= 0.0 && thetaRange.second > thetaRange.first)) {
    throw Error(ErrorCode::InvalidArgument, "theta range must be positive and non-degenerate");
  }
  constexpr int kGrid = 2000;
  const double lo = std::max(thetaRange.first, 1e-9);
  const double hi = thetaRange.second;
  const double step = (hi - lo) / kGrid;
  int bestK = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    const double r = acfResidual(acf, lo + k * step);
    if (r < best) {
      best = r;
      bestK = k;
    }
  }
  const double a = lo + std::max(0, bestK - 1) * step;
  const double b = lo + std::min(kGrid, bestK + 1) * step;
  auto [theta, rss] = boost::math::tools::brent_find_minima(
      [&](double th) { return acfResidual(acf, th); }, a, b, 52);
  ThetaFit fit;
  fit.theta = rss <= best ? theta : lo + bestK * step;
  fit.residual = std::min(rss, best);
  fit.scale = acfScaleForTheta(acf, fit.theta);
  const double tol = 1e-3 * (hi - lo);
  fit.argminOnBoundary = fit.theta - lo < tol || hi - fit.theta < tol;
  return fit;
}

}  // namespace lgcp
