#include "lgcp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "lgcp/error.hpp"

namespace lgcp {

namespace {
std::mutex& plannerMutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft2::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Impl() {
    std::lock_guard lock(plannerMutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft2::RealFft2(std::size_t nx, std::size_t ny)
    : nx_(nx), ny_(ny), impl_(std::make_unique<Impl>()) {
  if (nx == 0 || ny == 0) {
    throw Error(ErrorCode::DimMismatch, "FFT dimensions must be positive");
  }
  impl_->real = fftw_alloc_real(realSize());
  impl_->spec = fftw_alloc_complex(spectrumSize());
  std::lock_guard lock(plannerMutex());
  // FFTW is row-major with the last index fastest: n0 = ny, n1 = nx.
  impl_->fwd = fftw_plan_dft_r2c_2d(static_cast<int>(ny), static_cast<int>(nx),
                                    impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_2d(static_cast<int>(ny), static_cast<int>(nx),
                                    impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft2::~RealFft2() = default;
RealFft2::RealFft2(RealFft2&&) noexcept = default;
RealFft2& RealFft2::operator=(RealFft2&&) noexcept = default;

void RealFft2::forward(std::span<const double> in,
                       std::span<std::complex<double>> out) {
  if (in.size() != realSize() || out.size() != spectrumSize()) {
    throw Error(ErrorCode::DimMismatch, "forward FFT buffer size mismatch");
  }
  std::copy(in.begin(), in.end(), impl_->real);
  fftw_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(out.data()), impl_->spec, spectrumSize() * sizeof(fftw_complex));
}

void RealFft2::inverse(std::span<const std::complex<double>> in,
                       std::span<double> out) {
  if (in.size() != spectrumSize() || out.size() != realSize()) {
    throw Error(ErrorCode::DimMismatch, "inverse FFT buffer size mismatch");
  }
  // c2r destroys its input, so it always works on the owned copy.
  std::memcpy(impl_->spec, in.data(), spectrumSize() * sizeof(fftw_complex));
  fftw_execute(impl_->inv);
  std::copy(impl_->real, impl_->real + realSize(), out.begin());
}

}  // namespace lgcp
