#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lgcp/array.hpp"
#include "lgcp/geometry.hpp"

namespace lgcp {

/// Fixed spatial component lambda(s), held as cell-averaged values on a grid.
/// Always normalized so that the inside cells integrate to one; masked cells
/// are exactly zero.
class SpatialIntensity {
 public:
  /// Zeroes masked cells and renormalizes. Throws ZeroIntensity when nothing
  /// positive remains and InvalidArgument on negative or non-finite input.
  static SpatialIntensity fromValues(GridSpec grid, Array2 raw);
  static SpatialIntensity uniform(GridSpec grid);
  /// Samples `fn` at cell centroids. Normalization is re-imposed, so a user
  /// function need not integrate to one.
  static SpatialIntensity fromFunction(GridSpec grid,
                                       const std::function<double(Point2)>& fn);

  const GridSpec& grid() const noexcept { return grid_; }
  const Array2& values() const noexcept { return values_; }
  double operator()(std::size_t x, std::size_t y) const { return values_(x, y); }
  /// Value of the cell containing p, zero outside the grid.
  double at(Point2 p) const;
  /// Sum of value * cell area over the grid.
  double integral() const;

 private:
  SpatialIntensity(GridSpec grid, Array2 values)
      : grid_(std::move(grid)), values_(std::move(values)) {}
  GridSpec grid_;
  Array2 values_;
};

/// Re-grids lambda onto `target`. Each target centroid c is looked up at
/// `inverse * (c - center) + center` in the source frame (identity when no
/// transform is given), then the result is renormalized.
SpatialIntensity resample(const SpatialIntensity& source, const GridSpec& target,
                          const std::optional<std::array<double, 4>>& inverse = std::nullopt,
                          Point2 center = {});

/// Fixed temporal component mu(t): either a constant rate or one value per
/// unit interval of tlim.
class TemporalIntensity {
 public:
  static TemporalIntensity constant(TimeInterval tlim, double rate);
  static TemporalIntensity table(TimeInterval tlim, std::vector<double> values);

  const TimeInterval& tlim() const noexcept { return tlim_; }
  bool isConstant() const noexcept { return constant_.has_value(); }
  std::optional<double> constantRate() const noexcept { return constant_; }
  const std::vector<double>& tableValues() const noexcept { return table_; }
  int intervalCount() const;

  /// Rate for unit interval k (1-based).
  double at(int interval) const;
  std::vector<double> perInterval() const;

  /// Throws InvalidArgument unless the domain equals the pattern's tlim.
  void checkCompatible(const SpaceTimePointPattern& pattern) const;

 private:
  TemporalIntensity() = default;
  TimeInterval tlim_;
  std::optional<double> constant_;
  std::vector<double> table_;
};

/// Gaussian kernel estimate of lambda from all event locations with
/// bandwidth `bandwidth * adjust`, edge-corrected by the in-window kernel
/// mass of each cell.
SpatialIntensity kernelLambda(const SpaceTimePointPattern& pattern,
                              const GridSpec& grid, double bandwidth,
                              double adjust = 1.0);

/// Locally weighted linear smoother with tricube weights over the nearest
/// ceil(f * n) points and bisquare robustness reweighting.
std::vector<double> lowess(const std::vector<double>& x, const std::vector<double>& y,
                           double f, int robustnessIterations = 3);

/// Squared lowess fit of the square-rooted unit-interval counts.
TemporalIntensity muEstimate(const SpaceTimePointPattern& pattern, double f = 2.0 / 3.0);

/// mu(t) = n / (t_b - t_a).
TemporalIntensity constantInTime(const SpaceTimePointPattern& pattern);

/// Scales raw per-interval values so they sum to the observed event count.
TemporalIntensity scaleTemporal(const std::vector<double>& raw,
                                const SpaceTimePointPattern& pattern);
/// Function form: raw is evaluated at the integer time labels t_a + k.
TemporalIntensity scaleTemporal(const std::function<double(double)>& raw,
                                const SpaceTimePointPattern& pattern);

}  // namespace lgcp
