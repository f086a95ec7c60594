#include "lgcp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/random/normal_distribution.hpp>

#include "lgcp/error.hpp"

namespace lgcp {

double chooseTimeStep(const CovarianceModel& model) {
  if (!(model.theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
  return std::min(1.0, 0.1 / model.theta);
}

namespace {

bool sameGrid(const GridSpec& a, const GridSpec& b) {
  return a.nx == b.nx && a.ny == b.ny && a.cellwidth == b.cellwidth && a.x0 == b.x0 &&
         a.y0 == b.y0;
}

Array2 standardNormals(std::size_t nx, std::size_t ny, std::mt19937_64& rng) {
  boost::random::normal_distribution<double> norm;
  Array2 z(nx, ny);
  for (double& v : z.values()) v = norm(rng);
  return z;
}

}  // namespace

SimulationResult lgcpSim(const PolygonWindow& window, TimeInterval tlim,
                         const SpatialIntensity& lambda, const TemporalIntensity& mu,
                         double cellwidth, const CovarianceModel& model, std::uint64_t seed) {
  model.validate();
  if (!(tlim.end > tlim.start)) throw Error(ErrorCode::InvalidWindow, "tlim must satisfy a < b");
  if (mu.tlim().start != tlim.start || mu.tlim().end != tlim.end) {
    throw Error(ErrorCode::InvalidArgument, "temporal intensity domain differs from tlim");
  }
  GridSpec grid = buildGrid(window, cellwidth);
  std::vector<std::string> warnings;
  if (cellwidth > 0.5 * model.phi) {
    std::ostringstream os;
    os << "CellwidthWarning: cellwidth " << cellwidth << " exceeds phi/2 = " << 0.5 * model.phi
       << "; the simulation may be inaccurate";
    warnings.push_back(os.str());
  }
  const SpatialIntensity lam =
      sameGrid(lambda.grid(), grid) ? lambda : resample(lambda, grid);

  const SpectralEmbedding emb = buildEmbedding(model, grid);
  SpectralWorkspace ws(emb);
  const std::size_t ex = grid.extNx(), ey = grid.extNy();
  const double mean = model.fieldMean();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const double delta = chooseTimeStep(model);
  const auto perUnit = static_cast<int>(std::ceil(1.0 / delta - 1e-12));

  // Active cells and their base rate lambda * area.
  std::vector<std::size_t> active;
  std::vector<double> base;
  for (std::size_t y = 0; y < grid.ny; ++y) {
    for (std::size_t x = 0; x < grid.nx; ++x) {
      const double l = lam(x, y);
      if (grid.inside(x, y) && l > 0.0) {
        active.push_back(y * ex + x);
        base.push_back(l * grid.cellArea());
      }
    }
  }

  Array2 yField = sampleField(ws, standardNormals(ex, ey, rng));
  Array2 fresh;
  std::vector<double> cumulative(active.size());
  std::vector<Event> events;
  const int intervals = std::max(1, static_cast<int>(std::ceil(tlim.length() - 1e-9)));
  for (int k = 1; k <= intervals; ++k) {
    const double t0 = tlim.start + (k - 1);
    const double len = std::min(1.0, tlim.end - t0);
    const int nsub = std::max(1, static_cast<int>(std::ceil(len * perUnit - 1e-9)));
    const double dt = len / nsub;
    const double a = std::exp(-model.theta * dt);
    const double b = std::sqrt(1.0 - a * a);
    const double rate = mu.at(k);
    for (int sub = 0; sub < nsub; ++sub) {
      const double s0 = t0 + sub * dt;
      // Poisson splitting: total count, then cells in proportion to rate.
      double total = 0.0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        total += rate * base[i] * std::exp(yField[active[i]]) * dt;
        cumulative[i] = total;
      }
      if (total > 0.0) {
        const auto n = std::poisson_distribution<long>(total)(rng);
        for (long j = 0; j < n; ++j) {
          const double u = unif(rng) * total;
          const auto idx = static_cast<std::size_t>(
              std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
          const std::size_t cell = active[std::min(idx, active.size() - 1)];
          const std::size_t cx = cell % ex, cy = cell / ex;
          const Point2 c = grid.centroid(cx, cy);
          Point2 p = c;
          // Rejection keeps points of boundary cells inside the window.
          for (int attempt = 0; attempt < 1000; ++attempt) {
            const Point2 q{c.x + (unif(rng) - 0.5) * grid.cellwidth,
                           c.y + (unif(rng) - 0.5) * grid.cellwidth};
            if (window.contains(q)) {
              p = q;
              break;
            }
          }
          double t = s0 + unif(rng) * dt;
          if (t <= t0) t = std::nextafter(t0, tlim.end);
          t = std::min(t, tlim.end);
          events.push_back({p.x, p.y, t});
        }
      }
      fresh = sampleField(ws, standardNormals(ex, ey, rng));
      for (std::size_t i = 0; i < yField.size(); ++i) {
        yField[i] = mean + a * (yField[i] - mean) + b * (fresh[i] - mean);
      }
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& l, const Event& r) { return l.t < r.t; });
  return SimulationResult{SpaceTimePointPattern(std::move(events), window, tlim), std::move(grid),
                          1.0 / perUnit, std::move(warnings)};
}

}  // namespace lgcp
