#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lgcp {

/// Dense 2-D array of doubles, x index fastest (data[y * nx + x]).
class Array2 {
 public:
  Array2() = default;
  Array2(std::size_t nx, std::size_t ny, double fill = 0.0)
      : nx_(nx), ny_(ny), data_(nx * ny, fill) {}

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t x, std::size_t y) { return data_[y * nx_ + x]; }
  double operator()(std::size_t x, std::size_t y) const { return data_[y * nx_ + x]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::vector<double>& raw() noexcept { return data_; }
  const std::vector<double>& raw() const noexcept { return data_; }

  bool operator==(const Array2&) const = default;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<double> data_;
};

/// Dense 3-D array, x fastest then y then z (used for threshold stacks).
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t nx, std::size_t ny, std::size_t nz, double fill = 0.0)
      : nx_(nx), ny_(ny), nz_(nz), data_(nx * ny * nz, fill) {}

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t nz() const noexcept { return nz_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t x, std::size_t y, std::size_t z) {
    return data_[(z * ny_ + y) * nx_ + x];
  }
  double operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return data_[(z * ny_ + y) * nx_ + x];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::size_t nz_ = 0;
  std::vector<double> data_;
};

/// Dense 4-D array (x, y, t, sample), x fastest.
class Array4 {
 public:
  Array4() = default;
  explicit Array4(std::array<std::size_t, 4> dims, double fill = 0.0)
      : dims_(dims), data_(dims[0] * dims[1] * dims[2] * dims[3], fill) {}

  const std::array<std::size_t, 4>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t offset(std::size_t x, std::size_t y, std::size_t t,
                     std::size_t s) const noexcept {
    return ((s * dims_[2] + t) * dims_[1] + y) * dims_[0] + x;
  }
  double& operator()(std::size_t x, std::size_t y, std::size_t t, std::size_t s) {
    return data_[offset(x, y, t, s)];
  }
  double operator()(std::size_t x, std::size_t y, std::size_t t,
                    std::size_t s) const {
    return data_[offset(x, y, t, s)];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

 private:
  std::array<std::size_t, 4> dims_{};
  std::vector<double> data_;
};

}  // namespace lgcp
