#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lgcp/geometry.hpp"

namespace lgcp::test {

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("lgcp_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Irregular hexagon used across the tests.
inline PolygonWindow hexagon() {
  return PolygonWindow({{{10, 0}, {118, 0}, {128, 40}, {110, 128}, {30, 120}, {0, 70}}});
}

/// Homogeneous Poisson-like pattern with `perUnit` uniform events in each
/// unit time interval of [0, intervals].
inline SpaceTimePointPattern uniformPattern(const PolygonWindow& w, int intervals, int perUnit,
                                            unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(w.bbox().xmin, w.bbox().xmax);
  std::uniform_real_distribution<double> uy(w.bbox().ymin, w.bbox().ymax);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Event> ev;
  for (int k = 0; k < intervals; ++k) {
    for (int i = 0; i < perUnit;) {
      const Point2 p{ux(rng), uy(rng)};
      if (!w.contains(p)) continue;
      ev.push_back({p.x, p.y, k + 0.001 + 0.998 * u01(rng)});
      ++i;
    }
  }
  return SpaceTimePointPattern(std::move(ev), w, {0.0, static_cast<double>(intervals)});
}

}  // namespace lgcp::test
