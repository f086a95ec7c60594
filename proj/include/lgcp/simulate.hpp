#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgcp/covariance.hpp"
#include "lgcp/geometry.hpp"
#include "lgcp/intensity.hpp"

namespace lgcp {

/// Time step of the latent OU propagation: min(1, 0.1 / theta).
double chooseTimeStep(const CovarianceModel& model);

struct SimulationResult {
  SpaceTimePointPattern pattern;
  GridSpec grid;
  double timeStep = 1.0;  // effective step, 1 / ceil(1 / delta)
  std::vector<std::string> warnings;
};

/// Approximate forward simulation of the log-Gaussian Cox process on a
/// regular grid. `lambda` is resampled onto the simulation grid when its
/// grid differs.
SimulationResult lgcpSim(const PolygonWindow& window, TimeInterval tlim,
                         const SpatialIntensity& lambda, const TemporalIntensity& mu,
                         double cellwidth, const CovarianceModel& model, std::uint64_t seed);

}  // namespace lgcp
