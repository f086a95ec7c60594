#include "lgcp/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "lgcp/error.hpp"
#include "lgcp/fft.hpp"

namespace lgcp {

SpatialIntensity SpatialIntensity::fromValues(GridSpec grid, Array2 raw) {
  if (raw.nx() != grid.nx || raw.ny() != grid.ny) {
    throw Error(ErrorCode::DimMismatch, "intensity values do not match grid");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i]) || raw[i] < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "intensity values must be finite and >= 0",
                  static_cast<std::int64_t>(i));
    }
    if (!grid.insideMask[i]) raw[i] = 0.0;
    total += raw[i];
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::ZeroIntensity, "spatial intensity is zero on every inside cell");
  }
  const double scale = 1.0 / (total * grid.cellArea());
  for (double& v : raw.values()) v *= scale;
  return SpatialIntensity(std::move(grid), std::move(raw));
}

SpatialIntensity SpatialIntensity::uniform(GridSpec grid) {
  Array2 ones(grid.nx, grid.ny, 1.0);
  return fromValues(std::move(grid), std::move(ones));
}

SpatialIntensity SpatialIntensity::fromFunction(GridSpec grid,
                                                const std::function<double(Point2)>& fn) {
  Array2 raw(grid.nx, grid.ny);
  for (std::size_t y = 0; y < grid.ny; ++y) {
    for (std::size_t x = 0; x < grid.nx; ++x) raw(x, y) = fn(grid.centroid(x, y));
  }
  return fromValues(std::move(grid), std::move(raw));
}

double SpatialIntensity::at(Point2 p) const {
  auto cell = grid_.cellOf(p);
  if (!cell) return 0.0;
  return values_((*cell)[0], (*cell)[1]);
}

double SpatialIntensity::integral() const {
  double s = 0.0;
  for (double v : values_.values()) s += v;
  return s * grid_.cellArea();
}

SpatialIntensity resample(const SpatialIntensity& source, const GridSpec& target,
                          const std::optional<std::array<double, 4>>& inverse,
                          Point2 center) {
  Array2 raw(target.nx, target.ny);
  for (std::size_t y = 0; y < target.ny; ++y) {
    for (std::size_t x = 0; x < target.nx; ++x) {
      Point2 c = target.centroid(x, y);
      if (inverse) {
        const auto& m = *inverse;
        const double dx = c.x - center.x, dy = c.y - center.y;
        c = {m[0] * dx + m[1] * dy + center.x, m[2] * dx + m[3] * dy + center.y};
      }
      raw(x, y) = source.at(c);
    }
  }
  return SpatialIntensity::fromValues(target, std::move(raw));
}

TemporalIntensity TemporalIntensity::constant(TimeInterval tlim, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorCode::InvalidArgument, "temporal rate must be finite and >= 0");
  }
  TemporalIntensity t;
  t.tlim_ = tlim;
  t.constant_ = rate;
  return t;
}

TemporalIntensity TemporalIntensity::table(TimeInterval tlim, std::vector<double> values) {
  TemporalIntensity t;
  t.tlim_ = tlim;
  if (static_cast<int>(values.size()) != t.intervalCount()) {
    throw Error(ErrorCode::DimMismatch, "temporal table needs one value per unit interval");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw Error(ErrorCode::InvalidArgument, "temporal values must be finite and >= 0",
                  static_cast<std::int64_t>(i));
    }
  }
  t.table_ = std::move(values);
  return t;
}

int TemporalIntensity::intervalCount() const {
  return std::max(1, static_cast<int>(std::ceil(tlim_.length() - 1e-9)));
}

double TemporalIntensity::at(int interval) const {
  if (interval < 1 || interval > intervalCount()) {
    throw Error(ErrorCode::TimeIndexOutOfRange,
                "interval " + std::to_string(interval) + " outside the time window");
  }
  return constant_ ? *constant_ : table_[static_cast<std::size_t>(interval - 1)];
}

std::vector<double> TemporalIntensity::perInterval() const {
  if (!constant_) return table_;
  return std::vector<double>(static_cast<std::size_t>(intervalCount()), *constant_);
}

void TemporalIntensity::checkCompatible(const SpaceTimePointPattern& pattern) const {
  if (tlim_.start != pattern.tlim().start || tlim_.end != pattern.tlim().end) {
    throw Error(ErrorCode::InvalidArgument,
                "temporal intensity domain differs from the pattern's time window");
  }
}

namespace {

// Linear convolution of an nx-by-ny image with a kernel sampled at integer
// cell offsets, through a zero-padded 2nx-by-2ny FFT.
class KernelConvolver {
 public:
  KernelConvolver(std::size_t nx, std::size_t ny, double cellwidth, double h)
      : nx_(nx), ny_(ny), fft_(2 * nx, 2 * ny), kernelSpec_(fft_.spectrumSize()) {
    const std::size_t ex = 2 * nx, ey = 2 * ny;
    std::vector<double> k(ex * ey, 0.0);
    const double norm = 1.0 / (2.0 * std::numbers::pi * h * h);
    for (std::size_t j = 0; j < ey; ++j) {
      if (j == ny) continue;
      const double dy = (j < ny ? double(j) : double(j) - double(ey)) * cellwidth;
      for (std::size_t i = 0; i < ex; ++i) {
        if (i == nx) continue;
        const double dx = (i < nx ? double(i) : double(i) - double(ex)) * cellwidth;
        k[j * ex + i] = norm * std::exp(-(dx * dx + dy * dy) / (2.0 * h * h));
      }
    }
    fft_.forward(k, kernelSpec_);
  }

  Array2 apply(const Array2& image) {
    const std::size_t ex = 2 * nx_, ey = 2 * ny_;
    std::vector<double> padded(ex * ey, 0.0);
    for (std::size_t y = 0; y < ny_; ++y) {
      for (std::size_t x = 0; x < nx_; ++x) padded[y * ex + x] = image(x, y);
    }
    std::vector<std::complex<double>> spec(fft_.spectrumSize());
    fft_.forward(padded, spec);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= kernelSpec_[i];
    fft_.inverse(spec, padded);
    const double n = static_cast<double>(ex * ey);
    Array2 out(nx_, ny_);
    for (std::size_t y = 0; y < ny_; ++y) {
      for (std::size_t x = 0; x < nx_; ++x) out(x, y) = padded[y * ex + x] / n;
    }
    return out;
  }

 private:
  std::size_t nx_, ny_;
  RealFft2 fft_;
  std::vector<std::complex<double>> kernelSpec_;
};

}  // namespace

SpatialIntensity kernelLambda(const SpaceTimePointPattern& pattern,
                              const GridSpec& grid, double bandwidth, double adjust) {
  if (!(bandwidth > 0.0) || !(adjust > 0.0) || !std::isfinite(bandwidth * adjust)) {
    throw Error(ErrorCode::NonpositiveBandwidth, "bandwidth and adjust must be positive");
  }
  if (pattern.size() == 0) {
    throw Error(ErrorCode::EmptyPattern, "no events to smooth");
  }
  const double h = bandwidth * adjust;

  Array2 counts(grid.nx, grid.ny);
  Array2 mask(grid.nx, grid.ny);
  for (const auto& e : pattern.events()) {
    if (auto cell = grid.cellOf({e.x, e.y})) counts((*cell)[0], (*cell)[1]) += 1.0;
  }
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = grid.insideMask[i] ? 1.0 : 0.0;

  KernelConvolver conv(grid.nx, grid.ny, grid.cellwidth, h);
  Array2 density = conv.apply(counts);
  const Array2 mass = conv.apply(mask);

  for (std::size_t i = 0; i < density.size(); ++i) {
    const double m = mass[i] * grid.cellArea();
    density[i] = (grid.insideMask[i] && m > 1e-300) ? std::max(0.0, density[i]) / m : 0.0;
  }
  return SpatialIntensity::fromValues(grid, std::move(density));
}

std::vector<double> lowess(const std::vector<double>& x, const std::vector<double>& y,
                           double f, int robustnessIterations) {
  const std::size_t n = x.size();
  if (y.size() != n) throw Error(ErrorCode::DimMismatch, "lowess x/y size mismatch");
  if (!(f > 0.0 && f <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "lowess span must lie in (0, 1]");
  }
  if (n < 2) return y;
  const std::size_t ns = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9)), 2, n);
  const double range = x.back() - x.front();

  std::vector<double> fit(n), robust(n, 1.0), w(n), residual(n);
  for (int iter = 0; iter <= robustnessIterations; ++iter) {
    std::size_t left = 0, right = ns - 1;
    for (std::size_t i = 0; i < n; ++i) {
      // Slide the ns-point neighbourhood so it stays centred on x[i].
      while (right < n - 1 && x[i] - x[left] > x[right + 1] - x[i]) {
        ++left;
        ++right;
      }
      const double h = std::max(x[i] - x[left], x[right] - x[i]);
      const double h9 = 0.999 * h, h1 = 0.001 * h;
      double wsum = 0.0;
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t j = left; j <= right; ++j) {
        const double r = std::abs(x[j] - x[i]);
        if (r <= h9) {
          double wj = 1.0;
          if (r > h1) {
            const double u = r / h;
            wj = std::pow(1.0 - u * u * u, 3);
          }
          w[j] = wj * robust[j];
          wsum += w[j];
        }
      }
      if (wsum <= 0.0) {
        fit[i] = y[i];
        continue;
      }
      for (std::size_t j = left; j <= right; ++j) w[j] /= wsum;
      if (h > 0.0) {
        double a = 0.0;
        for (std::size_t j = left; j <= right; ++j) a += w[j] * x[j];
        double c = 0.0;
        for (std::size_t j = left; j <= right; ++j) c += w[j] * (x[j] - a) * (x[j] - a);
        if (std::sqrt(c) > 0.001 * range) {
          const double b = (x[i] - a) / c;
          for (std::size_t j = left; j <= right; ++j) w[j] *= b * (x[j] - a) + 1.0;
        }
      }
      double s = 0.0;
      for (std::size_t j = left; j <= right; ++j) s += w[j] * y[j];
      fit[i] = s;
    }
    if (iter == robustnessIterations) break;

    for (std::size_t i = 0; i < n; ++i) residual[i] = std::abs(y[i] - fit[i]);
    const double meanAbs =
        std::accumulate(residual.begin(), residual.end(), 0.0) / static_cast<double>(n);
    std::vector<double> sorted = residual;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    double median = sorted[n / 2];
    if (n % 2 == 0) {
      median = 0.5 * (median + *std::max_element(sorted.begin(), sorted.begin() + n / 2));
    }
    const double cmad = 6.0 * median;
    if (cmad < 1e-7 * meanAbs || cmad == 0.0) break;
    const double c9 = 0.999 * cmad, c1 = 0.001 * cmad;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = residual[i];
      if (r <= c1) {
        robust[i] = 1.0;
      } else if (r <= c9) {
        const double u = r / cmad;
        robust[i] = (1.0 - u * u) * (1.0 - u * u);
      } else {
        robust[i] = 0.0;
      }
    }
  }
  return fit;
}

TemporalIntensity muEstimate(const SpaceTimePointPattern& pattern, double f) {
  const int k = pattern.intervalCount();
  if (k < 2) {
    throw Error(ErrorCode::DegenerateTimeWindow, "need at least two unit time intervals");
  }
  const std::vector<double> counts = pattern.intervalCounts();
  std::vector<double> x(counts.size()), root(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    x[i] = static_cast<double>(i + 1);
    root[i] = std::sqrt(counts[i]);
  }
  std::vector<double> fit = lowess(x, root, f, 3);
  for (double& v : fit) v *= v;
  return TemporalIntensity::table(pattern.tlim(), std::move(fit));
}

TemporalIntensity constantInTime(const SpaceTimePointPattern& pattern) {
  return TemporalIntensity::constant(
      pattern.tlim(), static_cast<double>(pattern.size()) / pattern.tlim().length());
}

TemporalIntensity scaleTemporal(const std::vector<double>& raw,
                                const SpaceTimePointPattern& pattern) {
  if (static_cast<int>(raw.size()) != pattern.intervalCount()) {
    throw Error(ErrorCode::DimMismatch, "need one raw value per unit interval");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] >= 0.0) || !std::isfinite(raw[i])) {
      throw Error(ErrorCode::InvalidArgument, "raw temporal values must be finite and >= 0",
                  static_cast<std::int64_t>(i));
    }
    total += raw[i];
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::ZeroIntensity, "raw temporal intensity is identically zero");
  }
  const double factor = static_cast<double>(pattern.size()) / total;
  std::vector<double> scaled(raw.size());
  std::transform(raw.begin(), raw.end(), scaled.begin(),
                 [factor](double v) { return v * factor; });
  return TemporalIntensity::table(pattern.tlim(), std::move(scaled));
}

TemporalIntensity scaleTemporal(const std::function<double(double)>& raw,
                                const SpaceTimePointPattern& pattern) {
  std::vector<double> values(static_cast<std::size_t>(pattern.intervalCount()));
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = raw(pattern.tlim().start + static_cast<double>(k + 1));
  }
  return scaleTemporal(values, pattern);
}

}  // namespace lgcp
