#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace lgcp {

/// Real-to-complex 2-D DFT on an nx-by-ny grid stored x fastest.
///
/// The spectrum uses the half-complex packing of the last (x) axis: ny rows of
/// nx/2 + 1 coefficients, index ky * (nx/2 + 1) + kx. Neither direction is
/// normalized; inverse(forward(a)) == nx * ny * a.
///
/// Each instance owns its plans and scratch buffers, so one instance per
/// worker is the unit of concurrency. Plan creation is serialized internally.
class RealFft2 {
 public:
  RealFft2(std::size_t nx, std::size_t ny);
  ~RealFft2();
  RealFft2(RealFft2&&) noexcept;
  RealFft2& operator=(RealFft2&&) noexcept;
  RealFft2(const RealFft2&) = delete;
  RealFft2& operator=(const RealFft2&) = delete;

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t realSize() const noexcept { return nx_ * ny_; }
  std::size_t spectrumSize() const noexcept { return ny_ * (nx_ / 2 + 1); }

  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  std::size_t nx_;
  std::size_t ny_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lgcp
