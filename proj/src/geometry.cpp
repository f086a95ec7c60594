#include "lgcp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "lgcp/error.hpp"

namespace lgcp {

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool onSegment(Point2 a, Point2 b, Point2 p) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x),
                                 std::abs(b.y), 1.0});
  if (std::abs(cross(a, b, p)) > 1e-12 * scale * std::max(len, 1e-300)) {
    return false;
  }
  return p.x >= std::min(a.x, b.x) - 1e-12 * scale &&
         p.x <= std::max(a.x, b.x) + 1e-12 * scale &&
         p.y >= std::min(a.y, b.y) - 1e-12 * scale &&
         p.y <= std::max(a.y, b.y) + 1e-12 * scale;
}

int sign(double v) { return (v > 0) - (v < 0); }

bool segmentsIntersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int d1 = sign(cross(q1, q2, p1));
  const int d2 = sign(cross(q1, q2, p2));
  const int d3 = sign(cross(p1, p2, q1));
  const int d4 = sign(cross(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && onSegment(q1, q2, p1)) return true;
  if (d2 == 0 && onSegment(q1, q2, p2)) return true;
  if (d3 == 0 && onSegment(p1, p2, q1)) return true;
  if (d4 == 0 && onSegment(p1, p2, q2)) return true;
  return false;
}

Ring cleanRing(Ring ring) {
  Ring out;
  out.reserve(ring.size());
  for (const auto& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::InvalidWindow, "non-finite vertex");
    }
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  if (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

bool ringSelfIntersects(const Ring& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = r[i], b = r[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segmentsIntersect(a, b, r[j], r[(j + 1) % n])) return true;
    }
  }
  return false;
}

bool ringsIntersect(const Ring& a, const Ring& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (segmentsIntersect(a[i], a[(i + 1) % a.size()], b[j],
                            b[(j + 1) % b.size()])) {
        return true;
      }
    }
  }
  return false;
}

// R-style vector formatting: enough decimals to show every element with
// seven significant digits, trailing zeros trimmed.
std::string formatPair(double a, double b) {
  auto decimalsNeeded = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7g", v);
    std::string s(buf);
    if (s.find('e') != std::string::npos) return 0;
    auto dot = s.find('.');
    if (dot == std::string::npos) return 0;
    while (!s.empty() && s.back() == '0') s.pop_back();
    return static_cast<int>(s.size() - dot - 1);
  };
  const int d = std::max(decimalsNeeded(a), decimalsNeeded(b));
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.*f, %.*f", d, a, d, b);
  return buf;
}

std::string formatScalar(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

}  // namespace

double signedArea(const Ring& ring) {
  double s = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = ring[i];
    const Point2& b = ring[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

bool pointInRing(const Ring& ring, Point2 p, bool onBoundary) {
  const std::size_t n = ring.size();
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    if (onSegment(a, b, p)) return onBoundary;
    if (a.y <= p.y) {
      if (b.y > p.y && cross(a, b, p) > 0) ++winding;
    } else if (b.y <= p.y && cross(a, b, p) < 0) {
      --winding;
    }
  }
  return winding != 0;
}

PolygonWindow::PolygonWindow(std::vector<Ring> rings) {
  if (rings.empty()) throw Error(ErrorCode::InvalidWindow, "window has no rings");
  for (auto& r : rings) {
    r = cleanRing(std::move(r));
    if (r.size() < 3) {
      throw Error(ErrorCode::InvalidWindow, "ring has fewer than 3 vertices");
    }
    if (ringSelfIntersects(r)) {
      throw Error(ErrorCode::InvalidWindow, "ring is self-intersecting");
    }
    if (signedArea(r) == 0.0) {
      throw Error(ErrorCode::InvalidWindow, "ring has zero area");
    }
  }
  if (signedArea(rings[0]) < 0) std::reverse(rings[0].begin(), rings[0].end());
  for (std::size_t h = 1; h < rings.size(); ++h) {
    if (signedArea(rings[h]) > 0) std::reverse(rings[h].begin(), rings[h].end());
    for (const auto& v : rings[h]) {
      if (!pointInRing(rings[0], v, false)) {
        throw Error(ErrorCode::InvalidWindow, "hole is not strictly inside outer ring");
      }
    }
    if (ringsIntersect(rings[0], rings[h])) {
      throw Error(ErrorCode::InvalidWindow, "hole crosses outer ring");
    }
  }
  rings_ = std::move(rings);
  computeDerived();
  if (!(area_ > 0.0)) {
    throw Error(ErrorCode::InvalidWindow, "window area is not positive");
  }
}

PolygonWindow::PolygonWindow(std::vector<Ring> rings, Trusted)
    : rings_(std::move(rings)) {
  computeDerived();
}

void PolygonWindow::computeDerived() {
  area_ = 0.0;
  for (const auto& r : rings_) area_ += signedArea(r);
  bbox_ = {outer()[0].x, outer()[0].x, outer()[0].y, outer()[0].y};
  for (const auto& p : outer()) {
    bbox_.xmin = std::min(bbox_.xmin, p.x);
    bbox_.xmax = std::max(bbox_.xmax, p.x);
    bbox_.ymin = std::min(bbox_.ymin, p.y);
    bbox_.ymax = std::max(bbox_.ymax, p.y);
  }
}

PolygonWindow PolygonWindow::rectangle(double xmin, double ymin, double xmax,
                                       double ymax) {
  return PolygonWindow({{{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}}});
}

Point2 PolygonWindow::centroid() const {
  double cx = 0.0, cy = 0.0;
  for (const auto& r : rings_) {
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = r[i];
      const Point2& b = r[(i + 1) % n];
      const double w = a.x * b.y - b.x * a.y;
      cx += (a.x + b.x) * w;
      cy += (a.y + b.y) * w;
    }
  }
  return {cx / (6.0 * area_), cy / (6.0 * area_)};
}

bool PolygonWindow::contains(Point2 p) const {
  if (p.x < bbox_.xmin || p.x > bbox_.xmax || p.y < bbox_.ymin || p.y > bbox_.ymax) {
    return false;
  }
  if (!pointInRing(outer(), p, true)) return false;
  for (std::size_t h = 1; h < rings_.size(); ++h) {
    if (pointInRing(rings_[h], p, false)) return false;
  }
  return true;
}

SpaceTimePointPattern::SpaceTimePointPattern(std::vector<Event> events,
                                             PolygonWindow window,
                                             TimeInterval tlim)
    : events_(std::move(events)), window_(std::move(window)), tlim_(tlim) {
  if (!(std::isfinite(tlim_.start) && std::isfinite(tlim_.end)) ||
      !(tlim_.start < tlim_.end)) {
    throw Error(ErrorCode::InvalidWindow, "time window must satisfy t_a < t_b");
  }
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (!window_.contains({e.x, e.y})) {
      throw Error(ErrorCode::PointOutsideWindow,
                  "event " + std::to_string(i) + " at (" + formatScalar(e.x) + ", " +
                      formatScalar(e.y) + ") lies outside the window",
                  static_cast<std::int64_t>(i));
    }
    if (!(e.t >= tlim_.start && e.t <= tlim_.end)) {
      throw Error(ErrorCode::TimeOutsideTlim,
                  "event " + std::to_string(i) + " at time " + formatScalar(e.t) +
                      " lies outside the time window",
                  static_cast<std::int64_t>(i));
    }
  }
}

SpaceTimePointPattern::SpaceTimePointPattern(std::vector<Event> events,
                                             PolygonWindow window,
                                             TimeInterval tlim, Trusted)
    : events_(std::move(events)), window_(std::move(window)), tlim_(tlim) {}

SpaceTimePointPattern SpaceTimePointPattern::trusted(std::vector<Event> events,
                                                     PolygonWindow window,
                                                     TimeInterval tlim) {
  return SpaceTimePointPattern(std::move(events), std::move(window), tlim, Trusted{});
}

int SpaceTimePointPattern::intervalCount() const {
  return std::max(1, static_cast<int>(std::ceil(tlim_.length() - 1e-9)));
}

int SpaceTimePointPattern::timeIndex(double t) const {
  const int k = static_cast<int>(std::ceil(t - tlim_.start));
  return std::clamp(k, 1, intervalCount());
}

std::vector<double> SpaceTimePointPattern::intervalCounts() const {
  std::vector<double> counts(static_cast<std::size_t>(intervalCount()), 0.0);
  for (const auto& e : events_) counts[static_cast<std::size_t>(timeIndex(e.t) - 1)] += 1.0;
  return counts;
}

std::string SpaceTimePointPattern::summary() const {
  const auto& bb = window_.bbox();
  std::ostringstream os;
  os << "Space-time point pattern\n";
  os << " planar point pattern: " << events_.size() << " points \n";
  os << "window: polygonal boundary\n";
  os << "enclosing rectangle: [" << formatPair(bb.xmin, bb.xmax) << "] x ["
     << formatPair(bb.ymin, bb.ymax) << "] units  \n";
  os << "   Time Window : [ " << formatScalar(tlim_.start) << " , "
     << formatScalar(tlim_.end) << " ]\n";
  return os.str();
}

std::size_t GridSpec::insideCount() const {
  return static_cast<std::size_t>(
      std::count_if(insideMask.begin(), insideMask.end(), [](auto v) { return v != 0; }));
}

std::vector<double> GridSpec::xvals() const {
  std::vector<double> v(nx);
  for (std::size_t i = 0; i < nx; ++i) v[i] = centroid(i, 0).x;
  return v;
}

std::vector<double> GridSpec::yvals() const {
  std::vector<double> v(ny);
  for (std::size_t j = 0; j < ny; ++j) v[j] = centroid(0, j).y;
  return v;
}

std::optional<std::array<std::size_t, 2>> GridSpec::cellOf(Point2 p) const {
  const double fx = (p.x - x0) / cellwidth;
  const double fy = (p.y - y0) / cellwidth;
  auto index = [](double f, std::size_t n) -> std::optional<std::size_t> {
    if (f < 0.0) return std::nullopt;
    auto i = static_cast<std::size_t>(std::floor(f));
    if (i == n && f <= static_cast<double>(n) + 1e-9) i = n - 1;
    if (i >= n) return std::nullopt;
    return i;
  };
  auto ix = index(fx, nx);
  auto iy = index(fy, ny);
  if (!ix || !iy) return std::nullopt;
  return std::array<std::size_t, 2>{*ix, *iy};
}

std::size_t nextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace {

std::size_t cellsToCover(double extent, double cellwidth) {
  const double ratio = extent / cellwidth;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio - 1e-9)));
}

GridSpec finishGrid(const PolygonWindow& window, std::size_t nx, std::size_t ny,
                    double cellwidth) {
  const auto& bb = window.bbox();
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.cellwidth = cellwidth;
  g.x0 = bb.xmin - 0.5 * (static_cast<double>(nx) * cellwidth - bb.width());
  g.y0 = bb.ymin - 0.5 * (static_cast<double>(ny) * cellwidth - bb.height());
  g.insideMask.assign(nx * ny, 0);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      g.insideMask[y * nx + x] = window.contains(g.centroid(x, y)) ? 1 : 0;
    }
  }
  return g;
}

}  // namespace

GridSpec buildGrid(const PolygonWindow& window, double cellwidth) {
  if (!(cellwidth > 0.0) || !std::isfinite(cellwidth)) {
    throw Error(ErrorCode::InvalidCellwidth, "cellwidth must be positive and finite");
  }
  const auto& bb = window.bbox();
  if (!(bb.width() > 0.0) || !(bb.height() > 0.0)) {
    throw Error(ErrorCode::DegenerateWindow, "window has zero extent");
  }
  const std::size_t nx = nextPowerOfTwo(cellsToCover(bb.width(), cellwidth));
  const std::size_t ny = nextPowerOfTwo(cellsToCover(bb.height(), cellwidth));
  return finishGrid(window, nx, ny, cellwidth);
}

GridSpec buildGrid(const PolygonWindow& window, std::size_t nxRequested,
                   std::size_t nyRequested) {
  if (nxRequested == 0 || nyRequested == 0) {
    throw Error(ErrorCode::InvalidCellwidth, "grid size must be positive");
  }
  const auto& bb = window.bbox();
  if (!(bb.width() > 0.0) || !(bb.height() > 0.0)) {
    throw Error(ErrorCode::DegenerateWindow, "window has zero extent");
  }
  const std::size_t nx = nextPowerOfTwo(nxRequested);
  const std::size_t ny = nextPowerOfTwo(nyRequested);
  const double cw = std::max(bb.width() / static_cast<double>(nx),
                             bb.height() / static_cast<double>(ny));
  return finishGrid(window, nx, ny, cw);
}

double CountStack::total() const {
  double s = 0.0;
  for (const auto& a : slices) {
    for (double v : a.values()) s += v;
  }
  return s;
}

CountStack binCounts(const SpaceTimePointPattern& pattern, const GridSpec& grid,
                     const std::vector<int>& times) {
  const int nIntervals = pattern.intervalCount();
  CountStack out;
  out.times = times;
  out.slices.assign(times.size(), Array2(grid.nx, grid.ny));
  std::vector<int> slot(static_cast<std::size_t>(nIntervals) + 1, -1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const int t = times[k];
    if (t < 1 || t > nIntervals) {
      throw Error(ErrorCode::TimeIndexOutOfRange,
                  "time index " + std::to_string(t) + " outside 1.." +
                      std::to_string(nIntervals),
                  static_cast<std::int64_t>(k));
    }
    slot[static_cast<std::size_t>(t)] = static_cast<int>(k);
  }
  for (const auto& e : pattern.events()) {
    const int s = slot[static_cast<std::size_t>(pattern.timeIndex(e.t))];
    if (s < 0) continue;
    auto cell = grid.cellOf({e.x, e.y});
    if (!cell || !grid.inside((*cell)[0], (*cell)[1])) continue;
    out.slices[static_cast<std::size_t>(s)]((*cell)[0], (*cell)[1]) += 1.0;
  }
  return out;
}

std::array<double, 4> rotationMatrix(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, s, c};
}

std::size_t fftCellCount(double width, double height, double cellwidth) {
  const std::size_t nx = nextPowerOfTwo(cellsToCover(width, cellwidth));
  const std::size_t ny = nextPowerOfTwo(cellsToCover(height, cellwidth));
  return 4 * nx * ny;
}

double efficiencyGain(std::size_t cellsUnrotated, std::size_t cellsRotated) {
  if (cellsRotated == 0) return 0.0;
  const double g = 100.0 *
                   (static_cast<double>(cellsUnrotated) - static_cast<double>(cellsRotated)) /
                   static_cast<double>(cellsRotated);
  return std::max(0.0, g);
}

std::size_t rotatedFftCellCount(const PolygonWindow& window, double angle,
                                double cellwidth) {
  const auto m = rotationMatrix(angle);
  const Point2 c = window.centroid();
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& p : window.outer()) {
    const double dx = p.x - c.x, dy = p.y - c.y;
    const double x = m[0] * dx + m[1] * dy;
    const double y = m[2] * dx + m[3] * dy;
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  return fftCellCount(xmax - xmin, ymax - ymin, cellwidth);
}

std::vector<Point2> convexHull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

RotationResult rotationGain(const PolygonWindow& window, double cellwidth) {
  if (!(cellwidth > 0.0)) {
    throw Error(ErrorCode::InvalidCellwidth, "cellwidth must be positive");
  }
  constexpr double quarter = std::numbers::pi / 2.0;
  // Rotating calipers: the minimal bounding rectangle has a side collinear
  // with a hull edge, so each edge direction is a candidate alignment.
  std::vector<double> candidates{0.0};
  const auto hull = convexHull(window.outer());
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2 a = hull[i], b = hull[(i + 1) % hull.size()];
    double r = std::fmod(-std::atan2(b.y - a.y, b.x - a.x), quarter);
    if (r < 0) r += quarter;
    if (r > quarter - 1e-12) r = 0.0;
    candidates.push_back(r);
  }
  std::sort(candidates.begin(), candidates.end());

  RotationResult res;
  res.cellsUnrotated = rotatedFftCellCount(window, 0.0, cellwidth);
  res.cellsRotated = res.cellsUnrotated;
  res.angle = 0.0;
  for (double a : candidates) {
    const std::size_t cells = rotatedFftCellCount(window, a, cellwidth);
    if (cells < res.cellsRotated) {
      res.cellsRotated = cells;
      res.angle = a;
    }
  }
  res.matrix = rotationMatrix(res.angle);
  res.gainPercent = efficiencyGain(res.cellsUnrotated, res.cellsRotated);
  res.worthwhile = res.gainPercent > 0.0;
  return res;
}

RotationResult rotationGain(const SpaceTimePointPattern& pattern, double cellwidth) {
  return rotationGain(pattern.window(), cellwidth);
}

PolygonWindow transformWindow(const PolygonWindow& window,
                              const std::array<double, 4>& m, Point2 center) {
  std::vector<Ring> rings = window.rings();
  for (auto& r : rings) {
    for (auto& p : r) {
      const double dx = p.x - center.x, dy = p.y - center.y;
      p = {m[0] * dx + m[1] * dy + center.x, m[2] * dx + m[3] * dy + center.y};
    }
  }
  return PolygonWindow(std::move(rings), PolygonWindow::Trusted{});
}

SpaceTimePointPattern applyRotation(const SpaceTimePointPattern& pattern,
                                    const std::array<double, 4>& m, Point2 center) {
  std::vector<Event> events = pattern.events();
  for (auto& e : events) {
    const double dx = e.x - center.x, dy = e.y - center.y;
    e.x = m[0] * dx + m[1] * dy + center.x;
    e.y = m[2] * dx + m[3] * dy + center.y;
  }
  return SpaceTimePointPattern::trusted(std::move(events),
                                        transformWindow(pattern.window(), m, center),
                                        pattern.tlim());
}

SpaceTimePointPattern applyRotation(const SpaceTimePointPattern& pattern,
                                    const RotationResult& rotation) {
  return applyRotation(pattern, rotation.matrix, pattern.window().centroid());
}

}  // namespace lgcp
