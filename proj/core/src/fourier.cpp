#include "stefan2d/fourier.hpp"

#include <fftw3.h>

#include <cstring>
#include <stdexcept>

namespace stefan2d {

struct RingTransform::Impl {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

RingTransform::RingTransform(int n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("RingTransform: n must be even and >= 4");
  impl_->real = fftw_alloc_real(n);
  impl_->cplx = fftw_alloc_complex(n / 2 + 1);
  // FFTW_ESTIMATE keeps planning deterministic and cheap; these rings are tiny.
  impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->cplx, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_c2r_1d(n, impl_->cplx, impl_->real, FFTW_ESTIMATE);
}

RingTransform::~RingTransform() {
  if (impl_) {
    fftw_destroy_plan(impl_->fwd);
    fftw_destroy_plan(impl_->bwd);
    fftw_free(impl_->real);
    fftw_free(impl_->cplx);
  }
}

void RingTransform::to_modes(const double* ring, std::complex<double>* modes) const {
  std::memcpy(impl_->real, ring, sizeof(double) * n_);
  fftw_execute(impl_->fwd);
  const double scale = 1.0 / n_;
  for (int m = 0; m <= n_ / 2; ++m) {
    modes[m] = scale * std::complex<double>(impl_->cplx[m][0], impl_->cplx[m][1]);
  }
}

void RingTransform::to_ring(const std::complex<double>* modes, double* ring) const {
  for (int m = 0; m <= n_ / 2; ++m) {
    impl_->cplx[m][0] = modes[m].real();
    impl_->cplx[m][1] = modes[m].imag();
  }
  fftw_execute(impl_->bwd);
  std::memcpy(ring, impl_->real, sizeof(double) * n_);
}

void RingTransform::derivative_modes(std::complex<double>* modes, int order) const {
  if (order <= 0) return;
  const int half = n_ / 2;
  for (int m = 0; m < half; ++m) {
    double mag = 1.0;
    for (int k = 0; k < order; ++k) mag *= m;
    std::complex<double> mult;
    switch (order % 4) {  // (i m)^order
      case 0: mult = {mag, 0.0}; break;
      case 1: mult = {0.0, mag}; break;
      case 2: mult = {-mag, 0.0}; break;
      default: mult = {0.0, -mag}; break;
    }
    modes[m] *= mult;
  }
  if (order % 2 == 1) {
    modes[half] = 0.0;
  } else {
    double mag = 1.0;
    for (int k = 0; k < order; ++k) mag *= half;
    modes[half] *= (order % 4 == 0) ? mag : -mag;
  }
}

}  // namespace stefan2d
