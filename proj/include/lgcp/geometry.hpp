#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgcp/array.hpp"

namespace lgcp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

struct Event {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  bool operator==(const Event&) const = default;
};

struct BoundingBox {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;
  double width() const noexcept { return xmax - xmin; }
  double height() const noexcept { return ymax - ymin; }
};

struct TimeInterval {
  double start = 0.0;
  double end = 1.0;
  double length() const noexcept { return end - start; }
};

using Ring = std::vector<Point2>;

/// Polygonal observation window: one outer ring plus optional holes.
///
/// Rings are stored open (no repeated closing vertex). The outer ring is kept
/// counter-clockwise and holes clockwise; inputs with the opposite
/// orientation are reoriented rather than rejected.
class PolygonWindow {
 public:
  /// Validates and normalizes the rings. Throws InvalidWindow.
  explicit PolygonWindow(std::vector<Ring> rings);

  static PolygonWindow rectangle(double xmin, double ymin, double xmax,
                                 double ymax);

  const std::vector<Ring>& rings() const noexcept { return rings_; }
  const Ring& outer() const noexcept { return rings_.front(); }
  double area() const noexcept { return area_; }
  const BoundingBox& bbox() const noexcept { return bbox_; }
  /// Area centroid of the window (holes subtracted).
  Point2 centroid() const;

  /// Boundary-inclusive containment: points on the outer boundary or on a
  /// hole boundary count as inside.
  bool contains(Point2 p) const;

 private:
  struct Trusted {};
  PolygonWindow(std::vector<Ring> rings, Trusted);
  void computeDerived();
  friend PolygonWindow transformWindow(const PolygonWindow&,
                                       const std::array<double, 4>&, Point2);

  std::vector<Ring> rings_;
  double area_ = 0.0;
  BoundingBox bbox_;
};

/// Signed shoelace area; positive for counter-clockwise rings.
double signedArea(const Ring& ring);

/// Winding-number test against a single ring. Points on the ring boundary
/// return `onBoundary` without a winding computation.
bool pointInRing(const Ring& ring, Point2 p, bool onBoundary = true);

/// Space-time point pattern with its window and observation time interval.
class SpaceTimePointPattern {
 public:
  /// Validates every event. Throws PointOutsideWindow / TimeOutsideTlim with
  /// the zero-based event index, or InvalidWindow for a bad tlim.
  SpaceTimePointPattern(std::vector<Event> events, PolygonWindow window,
                        TimeInterval tlim);

  /// Skips per-event validation; used for geometric transforms whose output
  /// is correct by construction up to rounding.
  static SpaceTimePointPattern trusted(std::vector<Event> events,
                                       PolygonWindow window, TimeInterval tlim);

  const std::vector<Event>& events() const noexcept { return events_; }
  const PolygonWindow& window() const noexcept { return window_; }
  const TimeInterval& tlim() const noexcept { return tlim_; }
  std::size_t size() const noexcept { return events_.size(); }

  /// Number of unit time intervals covering tlim.
  int intervalCount() const;
  /// Unit interval index of time t: ceil(t - t_a), with t_a itself mapped to 1.
  int timeIndex(double t) const;
  /// Event counts per unit interval, element k-1 for interval k.
  std::vector<double> intervalCounts() const;

  /// Multi-line textual summary (point count, enclosing rectangle, tlim).
  std::string summary() const;

 private:
  struct Trusted {};
  SpaceTimePointPattern(std::vector<Event> events, PolygonWindow window,
                        TimeInterval tlim, Trusted);

  std::vector<Event> events_;
  PolygonWindow window_;
  TimeInterval tlim_;
};

/// Output grid over the window: nx by ny square cells, both powers of two.
struct GridSpec {
  std::size_t nx = 1;
  std::size_t ny = 1;
  double cellwidth = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<std::uint8_t> insideMask;  // x fastest

  std::size_t cellCount() const noexcept { return nx * ny; }
  std::size_t extNx() const noexcept { return 2 * nx; }
  std::size_t extNy() const noexcept { return 2 * ny; }
  double cellArea() const noexcept { return cellwidth * cellwidth; }
  bool inside(std::size_t x, std::size_t y) const { return insideMask[y * nx + x] != 0; }
  std::size_t insideCount() const;
  Point2 centroid(std::size_t x, std::size_t y) const {
    return {x0 + (static_cast<double>(x) + 0.5) * cellwidth,
            y0 + (static_cast<double>(y) + 0.5) * cellwidth};
  }
  std::vector<double> xvals() const;
  std::vector<double> yvals() const;
  /// Cell containing p under half-open [edge, edge + cellwidth) assignment;
  /// a point on the far grid edge is assigned to the last cell.
  std::optional<std::array<std::size_t, 2>> cellOf(Point2 p) const;
};

std::size_t nextPowerOfTwo(std::size_t n);

GridSpec buildGrid(const PolygonWindow& window, double cellwidth);
GridSpec buildGrid(const PolygonWindow& window, std::size_t nxRequested,
                   std::size_t nyRequested);

/// Per-time cell counts on a grid.
struct CountStack {
  std::vector<int> times;
  std::vector<Array2> slices;  // integer-valued
  double total() const;
};

CountStack binCounts(const SpaceTimePointPattern& pattern, const GridSpec& grid,
                     const std::vector<int>& times);

struct RotationResult {
  double angle = 0.0;  // radians, counter-clockwise
  std::array<double, 4> matrix{1.0, 0.0, 0.0, 1.0};  // row-major 2x2
  double gainPercent = 0.0;
  bool worthwhile = false;
  std::size_t cellsUnrotated = 0;
  std::size_t cellsRotated = 0;
};

std::array<double, 4> rotationMatrix(double angle);

/// Number of cells in the doubled FFT grid for a window of the given extent.
std::size_t fftCellCount(double width, double height, double cellwidth);

/// Percentage increase in FFT cells from not rotating versus rotating,
/// floored at zero.
double efficiencyGain(std::size_t cellsUnrotated, std::size_t cellsRotated);

/// Extended FFT cell count of the window after rotating it by `angle` about
/// its centroid.
std::size_t rotatedFftCellCount(const PolygonWindow& window, double angle,
                                double cellwidth);

std::vector<Point2> convexHull(std::vector<Point2> pts);

RotationResult rotationGain(const SpaceTimePointPattern& pattern, double cellwidth);
RotationResult rotationGain(const PolygonWindow& window, double cellwidth);

/// Affine map p -> matrix * (p - center) + center applied to every vertex.
PolygonWindow transformWindow(const PolygonWindow& window,
                              const std::array<double, 4>& matrix, Point2 center);

/// Rotates points and window about the window centroid.
SpaceTimePointPattern applyRotation(const SpaceTimePointPattern& pattern,
                                    const RotationResult& rotation);
/// Rotation about an explicit centre, for undoing a previous rotation.
SpaceTimePointPattern applyRotation(const SpaceTimePointPattern& pattern,
                                    const std::array<double, 4>& matrix,
                                    Point2 center);

}  // namespace lgcp
