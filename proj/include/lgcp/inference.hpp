#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lgcp/array.hpp"
#include "lgcp/covariance.hpp"
#include "lgcp/geometry.hpp"
#include "lgcp/intensity.hpp"

namespace lgcp {

using Rng = std::mt19937_64;

/// Whitened latent field for the consecutive times t1..t2, one extended
/// 2M x 2N slice per time, oldest first.
struct LatentBlock {
  std::vector<Array2> gammas;

  LatentBlock() = default;
  LatentBlock(std::size_t slices, std::size_t extNx, std::size_t extNy)
      : gammas(slices, Array2(extNx, extNy)) {}

  std::size_t slices() const noexcept { return gammas.size(); }
  std::size_t size() const;
  double squaredNorm() const;
  double norm() const { return std::sqrt(squaredNorm()); }
  /// this += a * other
  void axpy(double a, const LatentBlock& other);
  void scale(double a);
  bool allFinite() const;
};

struct PredictConfig {
  int T = 1;          // prediction time, as a unit-interval index of tlim
  int laglength = 0;  // p
  CovarianceModel model;
  GridSpec grid;
  SpatialIntensity lambda;
  TemporalIntensity mu;
  std::optional<double> gradtrunc;  // nullopt selects the automatic bound

  int firstTime() const noexcept { return T - laglength; }
  std::vector<int> times() const;
};

/// Posterior of the latent block given gridded counts. Holds the spectral
/// embedding and scratch space; not safe for concurrent use.
///
/// log pi = sum_t sum_cells [x log E - E - log x!]
///          - |G_1|^2 / 2 - sum_{t>1} |G_t - a G_{t-1}|^2 / (2 (1 - a^2)),
/// where E = exposure * exp(Y), Y = mean + C^{1/2} G and a = exp(-theta).
/// Cells with zero exposure do not contribute.
class LatentPosterior {
 public:
  /// exposure[s] is an M x N array of mu(t) * lambda * cell area; counts[s]
  /// the matching cell counts.
  LatentPosterior(const CovarianceModel& model, const GridSpec& grid,
                  std::vector<Array2> exposure, std::vector<Array2> counts);
  LatentPosterior(const PredictConfig& cfg, const CountStack& counts);

  std::size_t slices() const noexcept { return exposure_.size(); }
  std::size_t extNx() const noexcept { return embedding_.extNx(); }
  std::size_t extNy() const noexcept { return embedding_.extNy(); }
  const SpectralEmbedding& embedding() const noexcept { return embedding_; }
  const CovarianceModel& model() const noexcept { return model_; }
  const GridSpec& grid() const noexcept { return grid_; }
  double ouCoefficient() const noexcept { return a_; }
  LatentBlock zeroBlock() const { return LatentBlock(slices(), extNx(), extNy()); }

  double logTarget(const LatentBlock& block);
  /// Returns logTarget and writes its exact gradient into `grad`.
  double logTargetAndGradient(const LatentBlock& block, LatentBlock& grad);

  /// Y = mean + C^{1/2} G for one slice, full extended grid.
  Array2 field(const Array2& gamma);
  /// Y restricted to the M x N output grid.
  Array2 outputField(const Array2& gamma);

  /// Prior draw: G_1 ~ N(0, I), G_t = a G_{t-1} + sqrt(1 - a^2) Z.
  LatentBlock drawPrior(Rng& rng) const;

 private:
  void checkBlock(const LatentBlock& block) const;

  CovarianceModel model_;
  GridSpec grid_;
  SpectralEmbedding embedding_;
  SpectralWorkspace workspace_;
  std::vector<Array2> exposure_;
  std::vector<Array2> counts_;
  double a_ = 0.0;
  double countConstant_ = 0.0;  // -sum log x! over active cells
  Array2 y_, resid_, back_;
};

/// Free-function forms; they build a LatentPosterior per call.
double logTarget(const LatentBlock& block, const CountStack& counts, const PredictConfig& cfg);
LatentBlock gradLogTarget(const LatentBlock& block, const CountStack& counts,
                          const PredictConfig& cfg);

/// Scales grad to norm `bound` when its norm exceeds it.
void truncateGradient(LatentBlock& grad, double bound);

/// Largest gradient norm over `draws` prior realisations of the block.
double autoGradTrunc(LatentPosterior& posterior, std::uint64_t seed, int draws = 100);

struct ConstantH {
  double h = 0.01;
};
struct AndrieuThoms {
  double inith = 1.0;
  double alpha = 0.5;
  double C = 1.0;
  double targetAcceptance = 0.574;
};
using AdaptiveScheme = std::variant<ConstantH, AndrieuThoms>;

double initialH(const AdaptiveScheme& scheme);
/// Robbins-Monro update h + C / iter^alpha * (acceptProb - target), floored
/// at 1e-12. `iter` is 1-based. ConstantH leaves h unchanged.
double adaptH(double h, double acceptProb, std::uint64_t iter, const AdaptiveScheme& scheme);
std::string schemeName(const AdaptiveScheme& scheme);

struct McmcConfig {
  std::uint64_t malaLength = 1000;
  std::uint64_t burnin = 0;
  std::uint64_t retain = 1;
  std::optional<LatentBlock> inits;
  std::size_t mcmcDiagCells = 0;
  AdaptiveScheme adaptive = AndrieuThoms{};
  std::uint64_t seed = 1;

  void validate() const;
  std::uint64_t retainedCount() const;
};

struct ChainState {
  LatentBlock gamma;
  LatentBlock grad;  // truncated gradient at gamma
  double logTarget = 0.0;
  double h = 1.0;
  double lastAcceptProb = 0.0;
  bool lastAccepted = false;
  bool lastNonFinite = false;
  std::uint64_t accepted = 0;
  std::uint64_t iterations = 0;
};

/// Initialises the chain state at `gamma`.
ChainState initChain(LatentPosterior& posterior, LatentBlock gamma, double h, double gradBound);

/// log of q(to | from) up to a constant, proposal N(from + h^2/2 gradFrom, h^2 I).
double logProposal(const LatentBlock& to, const LatentBlock& from, const LatentBlock& gradFrom,
                   double h);

/// One MALA iteration. A non-finite proposed target is rejected and flagged
/// in lastNonFinite.
void malaStep(ChainState& state, LatentPosterior& posterior, double gradBound, Rng& rng);

/// Function of one output-grid field Y, averaged over retained samples.
struct GridFunction {
  std::string name;
  std::size_t depth = 1;  // output length is M * N * depth
  std::function<std::vector<double>(const Array2&)> fn;
};

/// Indicator stack 1[exp(Y) > k_j], laid out as M x N x thresholds.
GridFunction exceedProbs(std::vector<double> thresholds);

struct OnlineStats {
  std::uint64_t n = 0;
  std::vector<double> mean, m2;
  void add(std::span<const double> v);
  std::vector<double> variance() const;  // n - 1 denominator
};

struct OutputConfig {
  std::vector<GridFunction> gridFunctions;
  std::optional<std::filesystem::path> dumpPath;
  bool lastonly = false;
  bool force = false;
  std::function<bool(std::uint64_t)> confirmDump;
  std::string dumpMeta = "{}";
  std::function<void(int)> progress;  // percent complete
};

struct SliceSummary {
  int time = 0;
  Array2 meanY, varY, meanExpY, varExpY, seExpY, meanIntensity;
};

struct PredictionSummary {
  std::vector<SliceSummary> slices;
  /// gridAverages[f][s] is the averaged output of grid function f on slice s.
  std::vector<std::vector<Array3>> gridAverages;
  std::vector<std::string> gridNames;
  std::vector<double> hTrace;
  std::vector<double> acceptanceTrace;
  std::vector<std::array<std::size_t, 3>> diagCells;  // (slice, x, y) of the extended grid
  std::vector<std::vector<double>> diagTraces;        // per retained sample
  std::vector<int> counts;                            // per slice totals
  std::uint64_t retained = 0;
  double meanAcceptance = 0.0;
  double lastH = 0.0;
  double gradBound = 0.0;
  std::uint64_t nonFiniteProposals = 0;
  std::size_t extNx = 0, extNy = 0;
  double seconds = 0.0;
};

PredictionSummary predict(const SpaceTimePointPattern& pattern, const PredictConfig& cfg,
                          const McmcConfig& mcmc, const OutputConfig& output);

/// Text report of a finished run.
std::string formatSummary(const PredictionSummary& summary, const PredictConfig& cfg,
                          const McmcConfig& mcmc, const OutputConfig& output);

}  // namespace lgcp
