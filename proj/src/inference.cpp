#include "lgcp/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <boost/random/normal_distribution.hpp>

#include "lgcp/error.hpp"
#include "lgcp/storage.hpp"

namespace lgcp {

std::size_t LatentBlock::size() const {
  std::size_t n = 0;
  for (const auto& g : gammas) n += g.size();
  return n;
}

double LatentBlock::squaredNorm() const {
  double s = 0.0;
  for (const auto& g : gammas) {
    for (double v : g.values()) s += v * v;
  }
  return s;
}

void LatentBlock::axpy(double a, const LatentBlock& other) {
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    auto dst = gammas[k].values();
    auto src = other.gammas[k].values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a * src[i];
  }
}

void LatentBlock::scale(double a) {
  for (auto& g : gammas) {
    for (double& v : g.values()) v *= a;
  }
}

bool LatentBlock::allFinite() const {
  for (const auto& g : gammas) {
    for (double v : g.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::vector<int> PredictConfig::times() const {
  std::vector<int> t;
  for (int k = firstTime(); k <= T; ++k) t.push_back(k);
  return t;
}

LatentPosterior::LatentPosterior(const CovarianceModel& model, const GridSpec& grid,
                                 std::vector<Array2> exposure, std::vector<Array2> counts)
    : model_(model),
      grid_(grid),
      embedding_(buildEmbedding(model, grid)),
      workspace_(embedding_),
      exposure_(std::move(exposure)),
      counts_(std::move(counts)),
      a_(std::exp(-model.theta)),
      y_(grid.extNx(), grid.extNy()),
      resid_(grid.extNx(), grid.extNy()),
      back_(grid.extNx(), grid.extNy()) {
  if (exposure_.empty() || exposure_.size() != counts_.size()) {
    throw Error(ErrorCode::DimMismatch, "exposure and counts need one slice per time");
  }
  for (std::size_t s = 0; s < exposure_.size(); ++s) {
    const auto& e = exposure_[s];
    const auto& c = counts_[s];
    if (e.nx() != grid.nx || e.ny() != grid.ny || c.nx() != grid.nx || c.ny() != grid.ny) {
      throw Error(ErrorCode::DimMismatch, "exposure/count slices must match the output grid");
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!(e[i] >= 0.0) || !std::isfinite(e[i]) || !(c[i] >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "exposure and counts must be non-negative");
      }
      if (e[i] > 0.0) countConstant_ -= std::lgamma(c[i] + 1.0);
    }
  }
}

namespace {

std::vector<Array2> exposureFromConfig(const PredictConfig& cfg) {
  const GridSpec& lg = cfg.lambda.grid();
  if (lg.nx != cfg.grid.nx || lg.ny != cfg.grid.ny) {
    throw Error(ErrorCode::DimMismatch, "lambda grid does not match the prediction grid");
  }
  std::vector<Array2> out;
  const double area = cfg.grid.cellArea();
  for (int t : cfg.times()) {
    Array2 e(cfg.grid.nx, cfg.grid.ny);
    const double m = cfg.mu.at(t);
    for (std::size_t y = 0; y < cfg.grid.ny; ++y) {
      for (std::size_t x = 0; x < cfg.grid.nx; ++x) {
        if (cfg.grid.inside(x, y)) e(x, y) = m * cfg.lambda(x, y) * area;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

LatentPosterior::LatentPosterior(const PredictConfig& cfg, const CountStack& counts)
    : LatentPosterior(cfg.model, cfg.grid, exposureFromConfig(cfg), counts.slices) {
  if (counts.times != cfg.times()) {
    throw Error(ErrorCode::DimMismatch, "count times do not match the prediction window");
  }
}

void LatentPosterior::checkBlock(const LatentBlock& block) const {
  if (block.slices() != slices()) {
    throw Error(ErrorCode::DimMismatch, "latent block has " + std::to_string(block.slices()) +
                                            " slices, expected " + std::to_string(slices()));
  }
  for (const auto& g : block.gammas) {
    if (g.nx() != extNx() || g.ny() != extNy()) {
      throw Error(ErrorCode::DimMismatch, "latent slice does not match the extended grid");
    }
  }
}

Array2 LatentPosterior::field(const Array2& gamma) { return unwhiten(workspace_, gamma); }

Array2 LatentPosterior::outputField(const Array2& gamma) {
  const Array2 full = field(gamma);
  Array2 out(grid_.nx, grid_.ny);
  for (std::size_t y = 0; y < grid_.ny; ++y) {
    for (std::size_t x = 0; x < grid_.nx; ++x) out(x, y) = full(x, y);
  }
  return out;
}

double LatentPosterior::logTarget(const LatentBlock& block) {
  checkBlock(block);
  double total = countConstant_;
  const double mean = embedding_.fieldMean();
  for (std::size_t s = 0; s < slices(); ++s) {
    const auto& e = exposure_[s];
    const auto& c = counts_[s];
    workspace_.applySqrt(block.gammas[s].values(), y_.values());
    for (std::size_t y = 0; y < grid_.ny; ++y) {
      for (std::size_t x = 0; x < grid_.nx; ++x) {
        const double ex = e(x, y);
        if (ex <= 0.0) continue;
        const double ly = mean + y_(x, y);
        total += c(x, y) * (std::log(ex) + ly) - ex * std::exp(ly);
      }
    }
  }
  double prior = 0.0;
  for (double v : block.gammas[0].values()) prior += v * v;
  total -= 0.5 * prior;
  const double v = 1.0 - a_ * a_;
  for (std::size_t s = 1; s < slices(); ++s) {
    auto cur = block.gammas[s].values();
    auto prev = block.gammas[s - 1].values();
    double q = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double d = cur[i] - a_ * prev[i];
      q += d * d;
    }
    total -= q / (2.0 * v);
  }
  return total;
}

double LatentPosterior::logTargetAndGradient(const LatentBlock& block, LatentBlock& grad) {
  checkBlock(block);
  if (grad.slices() != slices()) grad = zeroBlock();
  double total = countConstant_;
  const double mean = embedding_.fieldMean();
  for (std::size_t s = 0; s < slices(); ++s) {
    const auto& e = exposure_[s];
    const auto& c = counts_[s];
    workspace_.applySqrt(block.gammas[s].values(), y_.values());
    std::fill(resid_.raw().begin(), resid_.raw().end(), 0.0);
    bool any = false;
    for (std::size_t y = 0; y < grid_.ny; ++y) {
      for (std::size_t x = 0; x < grid_.nx; ++x) {
        const double ex = e(x, y);
        if (ex <= 0.0) continue;
        any = true;
        const double ly = mean + y_(x, y);
        const double rate = ex * std::exp(ly);
        total += c(x, y) * (std::log(ex) + ly) - rate;
        resid_(x, y) = c(x, y) - rate;
      }
    }
    auto& g = grad.gammas[s];
    if (any) {
      // C^{1/2} is symmetric, so it is its own adjoint.
      workspace_.applySqrt(resid_.values(), g.values());
    } else {
      std::fill(g.raw().begin(), g.raw().end(), 0.0);
    }
  }

  const double v = 1.0 - a_ * a_;
  {
    auto g0 = block.gammas[0].values();
    auto d0 = grad.gammas[0].values();
    double q = 0.0;
    for (std::size_t i = 0; i < g0.size(); ++i) {
      q += g0[i] * g0[i];
      d0[i] -= g0[i];
    }
    total -= 0.5 * q;
  }
  for (std::size_t s = 1; s < slices(); ++s) {
    auto cur = block.gammas[s].values();
    auto prev = block.gammas[s - 1].values();
    auto dcur = grad.gammas[s].values();
    auto dprev = grad.gammas[s - 1].values();
    double q = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double d = cur[i] - a_ * prev[i];
      q += d * d;
      dcur[i] -= d / v;
      dprev[i] += a_ * d / v;
    }
    total -= q / (2.0 * v);
  }
  return total;
}

LatentBlock LatentPosterior::drawPrior(Rng& rng) const {
  boost::random::normal_distribution<double> norm;
  LatentBlock b = zeroBlock();
  const double sd = std::sqrt(1.0 - a_ * a_);
  for (std::size_t s = 0; s < slices(); ++s) {
    auto cur = b.gammas[s].values();
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double z = norm(rng);
      cur[i] = s == 0 ? z : a_ * b.gammas[s - 1][i] + sd * z;
    }
  }
  return b;
}

namespace {

CountStack checkedCounts(const CountStack& counts, const PredictConfig& cfg) {
  if (counts.times != cfg.times()) {
    throw Error(ErrorCode::DimMismatch, "count times do not match the prediction window");
  }
  return counts;
}

}  // namespace

double logTarget(const LatentBlock& block, const CountStack& counts, const PredictConfig& cfg) {
  LatentPosterior post(cfg, checkedCounts(counts, cfg));
  return post.logTarget(block);
}

LatentBlock gradLogTarget(const LatentBlock& block, const CountStack& counts,
                          const PredictConfig& cfg) {
  LatentPosterior post(cfg, checkedCounts(counts, cfg));
  LatentBlock grad = post.zeroBlock();
  post.logTargetAndGradient(block, grad);
  return grad;
}

void truncateGradient(LatentBlock& grad, double bound) {
  if (!(bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "gradient bound must be positive");
  const double n = grad.norm();
  if (n > bound) grad.scale(bound / n);
}

double autoGradTrunc(LatentPosterior& posterior, std::uint64_t seed, int draws) {
  Rng rng(seed);
  LatentBlock grad = posterior.zeroBlock();
  double best = 0.0;
  for (int i = 0; i < draws; ++i) {
    const LatentBlock b = posterior.drawPrior(rng);
    posterior.logTargetAndGradient(b, grad);
    const double n = grad.norm();
    if (std::isfinite(n)) best = std::max(best, n);
  }
  return best > 0.0 ? best : 1.0;
}

double initialH(const AdaptiveScheme& scheme) {
  return std::visit(
      [](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ConstantH>) {
          return s.h;
        } else {
          return s.inith;
        }
      },
      scheme);
}

double adaptH(double h, double acceptProb, std::uint64_t iter, const AdaptiveScheme& scheme) {
  if (const auto* at = std::get_if<AndrieuThoms>(&scheme)) {
    const double eta = at->C / std::pow(static_cast<double>(std::max<std::uint64_t>(iter, 1)),
                                        at->alpha);
    return std::max(1e-12, h + eta * (acceptProb - at->targetAcceptance));
  }
  return h;
}

std::string schemeName(const AdaptiveScheme& scheme) {
  return std::holds_alternative<ConstantH>(scheme) ? "constanth" : "andrieuthomsh";
}

void McmcConfig::validate() const {
  if (malaLength == 0 || retain == 0 || burnin >= malaLength) {
    throw Error(ErrorCode::InvalidArgument, "need mala length > burnin and retain >= 1");
  }
  if (const auto* at = std::get_if<AndrieuThoms>(&adaptive)) {
    if (!(at->inith > 0.0) || !(at->alpha > 0.0 && at->alpha <= 1.0) || !(at->C > 0.0) ||
        !(at->targetAcceptance > 0.0 && at->targetAcceptance < 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "andrieuthomsh needs inith > 0, alpha in (0,1], C > 0, target in (0,1)");
    }
  } else if (!(std::get<ConstantH>(adaptive).h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "constant h must be positive");
  }
}

std::uint64_t McmcConfig::retainedCount() const { return (malaLength - burnin) / retain; }

ChainState initChain(LatentPosterior& posterior, LatentBlock gamma, double h,
                     double gradBound) {
  ChainState st;
  st.gamma = std::move(gamma);
  st.grad = posterior.zeroBlock();
  st.logTarget = posterior.logTargetAndGradient(st.gamma, st.grad);
  if (!std::isfinite(st.logTarget)) {
    throw Error(ErrorCode::NonFiniteTarget, "initial latent state has a non-finite target");
  }
  truncateGradient(st.grad, gradBound);
  st.h = h;
  return st;
}

double logProposal(const LatentBlock& to, const LatentBlock& from, const LatentBlock& gradFrom,
                   double h) {
  const double drift = 0.5 * h * h;
  double q = 0.0;
  for (std::size_t s = 0; s < to.slices(); ++s) {
    auto t = to.gammas[s].values();
    auto f = from.gammas[s].values();
    auto g = gradFrom.gammas[s].values();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double d = t[i] - f[i] - drift * g[i];
      q += d * d;
    }
  }
  return -q / (2.0 * h * h);
}

void malaStep(ChainState& state, LatentPosterior& posterior, double gradBound, Rng& rng) {
  boost::random::normal_distribution<double> norm;
  const double h = state.h;
  LatentBlock prop = state.gamma;
  const double drift = 0.5 * h * h;
  for (std::size_t s = 0; s < prop.slices(); ++s) {
    auto p = prop.gammas[s].values();
    auto g = state.grad.gammas[s].values();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += drift * g[i] + h * norm(rng);
  }
  LatentBlock propGrad = posterior.zeroBlock();
  const double lp = posterior.logTargetAndGradient(prop, propGrad);
  ++state.iterations;
  state.lastAccepted = false;
  state.lastNonFinite = false;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (!std::isfinite(lp) || !propGrad.allFinite()) {
    state.lastNonFinite = true;
    state.lastAcceptProb = 0.0;
    return;
  }
  truncateGradient(propGrad, gradBound);
  const double logRatio = lp - state.logTarget +
                          logProposal(state.gamma, prop, propGrad, h) -
                          logProposal(prop, state.gamma, state.grad, h);
  state.lastAcceptProb = logRatio >= 0.0 ? 1.0 : std::exp(logRatio);
  if (std::log(u) < logRatio) {
    state.gamma = std::move(prop);
    state.grad = std::move(propGrad);
    state.logTarget = lp;
    state.lastAccepted = true;
    ++state.accepted;
  }
}

GridFunction exceedProbs(std::vector<double> thresholds) {
  if (thresholds.empty()) throw Error(ErrorCode::EmptyThresholds, "no exceedance thresholds");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw Error(ErrorCode::NonAscending, "exceedance thresholds must be ascending");
    }
  }
  GridFunction f;
  f.name = "exceed";
  f.depth = thresholds.size();
  f.fn = [thresholds = std::move(thresholds)](const Array2& y) {
    const std::size_t cells = y.size();
    std::vector<double> out(cells * thresholds.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      for (std::size_t i = 0; i < cells; ++i) {
        out[k * cells + i] = std::exp(y[i]) > thresholds[k] ? 1.0 : 0.0;
      }
    }
    return out;
  };
  return f;
}

void OnlineStats::add(std::span<const double> v) {
  if (n == 0) {
    mean.assign(v.size(), 0.0);
    m2.assign(v.size(), 0.0);
  }
  ++n;
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - mean[i];
    mean[i] += d * inv;
    m2[i] += d * (v[i] - mean[i]);
  }
}

std::vector<double> OnlineStats::variance() const {
  std::vector<double> out(m2.size(), 0.0);
  if (n < 2) return out;
  for (std::size_t i = 0; i < m2.size(); ++i) {
    out[i] = std::max(0.0, m2[i] / static_cast<double>(n - 1));
  }
  return out;
}

namespace {

Array2 toArray(const std::vector<double>& v, std::size_t nx, std::size_t ny) {
  Array2 a(nx, ny);
  std::copy(v.begin(), v.end(), a.raw().begin());
  return a;
}

}  // namespace

PredictionSummary predict(const SpaceTimePointPattern& pattern, const PredictConfig& cfg,
                          const McmcConfig& mcmc, const OutputConfig& output) {
  const auto start = std::chrono::steady_clock::now();
  cfg.model.validate();
  mcmc.validate();
  if (cfg.laglength < 0) throw Error(ErrorCode::InvalidArgument, "laglength must be >= 0");
  const int k = pattern.intervalCount();
  if (cfg.T < 1 || cfg.T > k) {
    throw Error(ErrorCode::TimeIndexOutOfRange,
                "prediction time " + std::to_string(cfg.T) + " outside 1.." + std::to_string(k),
                cfg.T);
  }
  if (cfg.firstTime() < 1) {
    throw Error(ErrorCode::TimeIndexOutOfRange,
                "laglength " + std::to_string(cfg.laglength) +
                    " reaches before the first time interval",
                cfg.firstTime());
  }
  cfg.mu.checkCompatible(pattern);
  const CountStack counts = binCounts(pattern, cfg.grid, cfg.times());
  LatentPosterior post(cfg, counts);
  const std::size_t slices = post.slices();
  const GridSpec& grid = cfg.grid;
  const std::size_t cells = grid.cellCount();

  PredictionSummary sum;
  sum.extNx = post.extNx();
  sum.extNy = post.extNy();
  for (const auto& s : counts.slices) {
    sum.counts.push_back(static_cast<int>(std::lround(std::accumulate(
        s.raw().begin(), s.raw().end(), 0.0))));
  }
  sum.gradBound = cfg.gradtrunc ? *cfg.gradtrunc : autoGradTrunc(post, mcmc.seed + 0x9e3779b9);
  if (!(sum.gradBound > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gradient truncation bound must be positive");
  }

  LatentBlock init = mcmc.inits ? *mcmc.inits : post.zeroBlock();
  Rng rng(mcmc.seed);
  ChainState state = initChain(post, std::move(init), initialH(mcmc.adaptive), sum.gradBound);

  if (mcmc.mcmcDiagCells > 0) {
    Rng diagRng(mcmc.seed + 1);
    std::vector<std::array<std::size_t, 3>> candidates;
    for (std::size_t y = 0; y < grid.ny; ++y) {
      for (std::size_t x = 0; x < grid.nx; ++x) {
        if (grid.inside(x, y)) candidates.push_back({slices - 1, x, y});
      }
    }
    std::shuffle(candidates.begin(), candidates.end(), diagRng);
    candidates.resize(std::min(candidates.size(), mcmc.mcmcDiagCells));
    sum.diagCells = candidates;
    sum.diagTraces.resize(candidates.size());
  }

  const std::uint64_t retainTotal = mcmc.retainedCount();
  std::optional<SampleStore> store;
  std::optional<AsyncFrameWriter> writer;
  if (output.dumpPath) {
    StoreCreateOptions opts;
    opts.force = output.force;
    opts.lastonly = output.lastonly;
    opts.cellwidth = grid.cellwidth;
    opts.x0 = grid.x0;
    opts.y0 = grid.y0;
    opts.metaJson = output.dumpMeta;
    opts.confirm = output.confirmDump;
    const auto times = cfg.times();
    if (output.lastonly) {
      opts.timeLabels = {times.back()};
    } else {
      opts.timeLabels.assign(times.begin(), times.end());
    }
    store.emplace(SampleStore::create(*output.dumpPath, grid.nx, grid.ny,
                                      output.lastonly ? 1 : slices, retainTotal, opts));
    writer.emplace(*store);
  }

  std::vector<OnlineStats> statY(slices), statExp(slices);
  sum.gridNames.clear();
  for (const auto& f : output.gridFunctions) sum.gridNames.push_back(f.name);
  std::vector<std::vector<std::vector<double>>> gridSums(
      output.gridFunctions.size(), std::vector<std::vector<double>>(slices));
  for (std::size_t f = 0; f < output.gridFunctions.size(); ++f) {
    for (auto& v : gridSums[f]) v.assign(cells * output.gridFunctions[f].depth, 0.0);
  }

  sum.hTrace.reserve(mcmc.malaLength);
  sum.acceptanceTrace.reserve(mcmc.malaLength);
  int lastPercent = -1;
  double acceptSum = 0.0;
  std::vector<double> expBuf(cells);
  for (std::uint64_t iter = 1; iter <= mcmc.malaLength; ++iter) {
    malaStep(state, post, sum.gradBound, rng);
    if (state.lastNonFinite) ++sum.nonFiniteProposals;
    acceptSum += state.lastAcceptProb;
    sum.acceptanceTrace.push_back(state.lastAcceptProb);
    state.h = adaptH(state.h, state.lastAcceptProb, iter, mcmc.adaptive);
    sum.hTrace.push_back(state.h);

    if (iter > mcmc.burnin && (iter - mcmc.burnin) % mcmc.retain == 0) {
      std::vector<double> frame;
      if (writer) frame.reserve((output.lastonly ? 1 : slices) * cells);
      for (std::size_t s = 0; s < slices; ++s) {
        const Array2 y = post.outputField(state.gamma.gammas[s]);
        statY[s].add(y.values());
        for (std::size_t i = 0; i < cells; ++i) expBuf[i] = std::exp(y[i]);
        statExp[s].add(expBuf);
        for (std::size_t f = 0; f < output.gridFunctions.size(); ++f) {
          const std::vector<double> v = output.gridFunctions[f].fn(y);
          if (v.size() != gridSums[f][s].size()) {
            throw Error(ErrorCode::DimMismatch, "grid function returned the wrong size");
          }
          for (std::size_t i = 0; i < v.size(); ++i) gridSums[f][s][i] += v[i];
        }
        if (writer && (!output.lastonly || s + 1 == slices)) {
          frame.insert(frame.end(), y.raw().begin(), y.raw().end());
        }
      }
      for (std::size_t d = 0; d < sum.diagCells.size(); ++d) {
        const auto [s, x, y] = sum.diagCells[d];
        sum.diagTraces[d].push_back(state.gamma.gammas[s](x, y));
      }
      if (writer) writer->push(std::move(frame));
      ++sum.retained;
    }
    if (output.progress) {
      const int pct = static_cast<int>(100 * iter / mcmc.malaLength);
      if (pct != lastPercent) {
        lastPercent = pct;
        output.progress(pct);
      }
    }
  }
  if (writer) writer->finish();

  const auto times = cfg.times();
  for (std::size_t s = 0; s < slices; ++s) {
    SliceSummary ss;
    ss.time = times[s];
    ss.meanY = toArray(statY[s].mean, grid.nx, grid.ny);
    ss.varY = toArray(statY[s].variance(), grid.nx, grid.ny);
    ss.meanExpY = toArray(statExp[s].mean, grid.nx, grid.ny);
    ss.varExpY = toArray(statExp[s].variance(), grid.nx, grid.ny);
    ss.seExpY = ss.varExpY;
    for (double& v : ss.seExpY.values()) v = std::sqrt(v);
    ss.meanIntensity = Array2(grid.nx, grid.ny);
    const double m = cfg.mu.at(times[s]);
    for (std::size_t i = 0; i < cells; ++i) {
      ss.meanIntensity[i] = m * cfg.lambda.values()[i] * ss.meanExpY[i];
    }
    sum.slices.push_back(std::move(ss));
  }
  for (std::size_t f = 0; f < output.gridFunctions.size(); ++f) {
    std::vector<Array3> perSlice;
    for (std::size_t s = 0; s < slices; ++s) {
      Array3 a(grid.nx, grid.ny, output.gridFunctions[f].depth);
      for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = gridSums[f][s][i] / static_cast<double>(sum.retained);
      }
      perSlice.push_back(std::move(a));
    }
    sum.gridAverages.push_back(std::move(perSlice));
  }
  sum.meanAcceptance = acceptSum / static_cast<double>(mcmc.malaLength);
  sum.lastH = state.h;
  sum.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sum;
}

namespace {

std::string formatDuration(double seconds) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  if (seconds >= 3600.0) {
    os << seconds / 3600.0 << " hours";
  } else if (seconds >= 60.0) {
    os << seconds / 60.0 << " minutes";
  } else {
    os << seconds << " seconds";
  }
  return os.str();
}

std::string shortNumber(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

std::string formatSummary(const PredictionSummary& summary, const PredictConfig& cfg,
                          const McmcConfig& mcmc, const OutputConfig& output) {
  std::ostringstream os;
  os << "lgcpPredict object.\n\n";
  os << "General Information\n-------------------\n";
  os << "      FFT Gridsize: [ " << summary.extNx << " , " << summary.extNy << " ]\n\n";
  os << "\t    Data:\n";
  os << "     Time |";
  for (const auto& s : summary.slices) os << std::setw(9) << s.time;
  os << "\n   Counts |";
  for (int c : summary.counts) os << std::setw(9) << c;
  os << "\n\n";
  os << "      Parameters: sigma=" << shortNumber(cfg.model.sigma)
     << ", phi=" << shortNumber(cfg.model.phi) << ", theta=" << shortNumber(cfg.model.theta)
     << "\n";
  os << "   Dump Directory: " << (output.dumpPath ? output.dumpPath->string() : "") << "\n\n";
  os << "   Grid Averages:\n";
  if (summary.gridNames.empty()) {
    os << "\t none\n";
  } else {
    os << "\t Function Output Class\n";
    for (const auto& n : summary.gridNames) os << "\t " << std::left << std::setw(13) << n
                                               << std::right << "array\n";
  }
  os << "\n      Time taken: " << formatDuration(summary.seconds) << "\n\n";
  os << "MCMC Information\n----------------\n";
  os << "   Number Iterations: " << mcmc.malaLength << "\n";
  os << "\t    Burn-in: " << mcmc.burnin << "\n";
  os << "\t    Thinning: " << mcmc.retain << "\n";
  os << "      Mean Acceptance: " << std::fixed << std::setprecision(3)
     << summary.meanAcceptance << "\n";
  os << "      Adaptive Scheme: " << schemeName(mcmc.adaptive) << "\n";
  os << "\t       Last h: " << std::defaultfloat << std::setprecision(3) << summary.lastH << "\n";
  return os.str();
}

}  // namespace lgcp
