#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace stefan2d {

/// Real spectral transforms on a uniformly sampled ring of n angular nodes
/// (n even). to_modes produces the one-sided Fourier coefficients c_m,
/// m = 0..n/2, normalized so that to_ring(to_modes(u)) == u.
///
/// Not thread safe: each instance owns scratch buffers.
class RingTransform {
public:
  explicit RingTransform(int n);
  ~RingTransform();
  RingTransform(const RingTransform&) = delete;
  RingTransform& operator=(const RingTransform&) = delete;

  int n() const { return n_; }
  int nmodes() const { return n_ / 2 + 1; }

  void to_modes(const double* ring, std::complex<double>* modes) const;
  void to_ring(const std::complex<double>* modes, double* ring) const;

  /// In-place d/dtheta of order k on a one-sided spectrum: multiplies mode m
  /// by (i m)^k. The Nyquist mode is zeroed for odd k (the hermitian
  /// convention that keeps real data real) and carries (-1)^{k/2} (n/2)^k for
  /// even k.
  void derivative_modes(std::complex<double>* modes, int order) const;

private:
  int n_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace stefan2d
