#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lgcp/array.hpp"
#include "lgcp/geometry.hpp"

namespace lgcp::plot {

/// 8-bit RGB raster, row 0 at the top.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  Image(std::size_t w, std::size_t h, std::uint8_t fill = 255)
      : width(w), height(h), rgb(3 * w * h, fill) {}
  void set(long x, long y, std::array<std::uint8_t, 3> c);
  void line(double x0, double y0, double x1, double y1, std::array<std::uint8_t, 3> c);
};

void writePng(const std::filesystem::path& path, const Image& image);

struct HeatmapOptions {
  std::size_t pixelsPerCell = 4;
  const PolygonWindow* window = nullptr;
  std::vector<Point2> points;
};

/// Heatmap of grid values with optional window outline and case points.
/// Cells outside `grid.insideMask` are drawn grey.
Image heatmap(const GridSpec& grid, const Array2& values, const HeatmapOptions& options = {});

/// Line chart of one or more series against their index.
Image lineChart(const std::vector<std::vector<double>>& series, std::size_t width = 800,
                std::size_t height = 400);

}  // namespace lgcp::plot
