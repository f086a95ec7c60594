#include "lgcp/plot.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lgcp/error.hpp"

namespace lgcp::plot {

void Image::set(long x, long y, std::array<std::uint8_t, 3> c) {
  if (x < 0 || y < 0 || x >= static_cast<long>(width) || y >= static_cast<long>(height)) return;
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x));
  rgb[i] = c[0];
  rgb[i + 1] = c[1];
  rgb[i + 2] = c[2];
}

void Image::line(double x0, double y0, double x1, double y1, std::array<std::uint8_t, 3> c) {
  const double len = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  const int steps = std::max(1, static_cast<int>(std::ceil(len)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    set(std::lround(x0 + t * (x1 - x0)), std::lround(y0 + t * (y1 - y0)), c);
  }
}

void writePng(const std::filesystem::path& path, const Image& image) {
  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw Error(ErrorCode::IoError, "PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.rgb.data() + 3 * y * image.width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

namespace {

// Five-stop approximation of a perceptually ordered dark-to-yellow scale.
std::array<std::uint8_t, 3> colour(double t) {
  static constexpr double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  std::array<std::uint8_t, 3> c{};
  for (int k = 0; k < 3; ++k) {
    c[k] = static_cast<std::uint8_t>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  }
  return c;
}

}  // namespace

Image heatmap(const GridSpec& grid, const Array2& values, const HeatmapOptions& options) {
  if (values.nx() != grid.nx || values.ny() != grid.ny) {
    throw Error(ErrorCode::DimMismatch, "values do not match the grid");
  }
  const std::size_t ppc = std::max<std::size_t>(1, options.pixelsPerCell);
  Image img(grid.nx * ppc, grid.ny * ppc);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t y = 0; y < grid.ny; ++y) {
    for (std::size_t x = 0; x < grid.nx; ++x) {
      const double v = values(x, y);
      if ((grid.insideMask.empty() || grid.inside(x, y)) && std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t y = 0; y < grid.ny; ++y) {
    for (std::size_t x = 0; x < grid.nx; ++x) {
      const bool in = grid.insideMask.empty() || grid.inside(x, y);
      const auto c = in ? colour((values(x, y) - lo) / span) : std::array<std::uint8_t, 3>{200, 200, 200};
      const std::size_t top = (grid.ny - 1 - y) * ppc;
      for (std::size_t py = 0; py < ppc; ++py) {
        for (std::size_t px = 0; px < ppc; ++px) {
          img.set(static_cast<long>(x * ppc + px), static_cast<long>(top + py), c);
        }
      }
    }
  }
  const double scale = static_cast<double>(ppc) / grid.cellwidth;
  auto toPixel = [&](Point2 p) {
    return Point2{(p.x - grid.x0) * scale, static_cast<double>(img.height) - (p.y - grid.y0) * scale};
  };
  for (const auto& p : options.points) {
    const Point2 q = toPixel(p);
    img.set(std::lround(q.x), std::lround(q.y), {0, 0, 0});
  }
  if (options.window) {
    for (const auto& ring : options.window->rings()) {
      for (std::size_t i = 0; i < ring.size(); ++i) {
        const Point2 a = toPixel(ring[i]), b = toPixel(ring[(i + 1) % ring.size()]);
        img.line(a.x, a.y, b.x, b.y, {0, 0, 0});
      }
    }
  }
  return img;
}

Image lineChart(const std::vector<std::vector<double>>& series, std::size_t width,
                std::size_t height) {
  Image img(width, height);
  const double margin = 20.0;
  std::size_t longest = 1;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    longest = std::max(longest, s.size());
    for (double v : s) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double w = static_cast<double>(width) - 2 * margin;
  const double h = static_cast<double>(height) - 2 * margin;
  const std::array<std::uint8_t, 3> axis{0, 0, 0};
  img.line(margin, margin, margin, margin + h, axis);
  img.line(margin, margin + h, margin + w, margin + h, axis);
  static constexpr std::array<std::array<std::uint8_t, 3>, 5> palette{
      {{0, 0, 0}, {230, 120, 0}, {0, 110, 200}, {200, 0, 80}, {0, 150, 60}}};
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const auto c = palette[k % palette.size()];
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double denom = static_cast<double>(std::max<std::size_t>(1, longest - 1));
      const double x0 = margin + w * static_cast<double>(i - 1) / denom;
      const double x1 = margin + w * static_cast<double>(i) / denom;
      const double y0 = margin + h * (1.0 - (s[i - 1] - lo) / (hi - lo));
      const double y1 = margin + h * (1.0 - (s[i] - lo) / (hi - lo));
      img.line(x0, y0, x1, y1, c);
    }
  }
  return img;
}

}  // namespace lgcp::plot
