#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stefan2d {

/// Error thrown when a domain or grid specification is rejected.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Star-shaped reference domain, given by a smooth positive radius function
/// R(theta) about the origin, together with the cutoff geometry used by the
/// weighted norms: mu vanishes on the inner ball |x| <= rho and equals one on
/// the collar dist(x, Gamma) <= sigma.
///
/// R and its first two derivatives are supplied analytically so the boundary
/// frame (normal, curvature, line element) is exact.
struct StarDomain {
  std::function<double(double)> R;
  std::function<double(double)> Rp;
  std::function<double(double)> Rpp;
  double rho = 0.3;
  double sigma = 0.2;

  static StarDomain disk(double radius = 1.0, double rho = 0.3, double sigma = 0.2) {
    if (!(radius > 0.0)) throw DomainError("disk radius must be positive");
    StarDomain d;
    d.R = [radius](double) { return radius; };
    d.Rp = [](double) { return 0.0; };
    d.Rpp = [](double) { return 0.0; };
    d.rho = rho;
    d.sigma = sigma;
    return d;
  }

  /// R(theta) = c0 + sum_k a_k cos(k theta). Handy for tests on non-circular
  /// boundaries; derivatives are exact.
  static StarDomain from_cosine_modes(double c0, std::vector<std::pair<int, double>> modes,
                                      double rho = 0.3, double sigma = 0.2) {
    StarDomain d;
    d.R = [c0, modes](double t) {
      double r = c0;
      for (auto [k, a] : modes) r += a * std::cos(k * t);
      return r;
    };
    d.Rp = [modes](double t) {
      double r = 0.0;
      for (auto [k, a] : modes) r += -a * k * std::sin(k * t);
      return r;
    };
    d.Rpp = [modes](double t) {
      double r = 0.0;
      for (auto [k, a] : modes) r += -a * k * k * std::cos(k * t);
      return r;
    };
    d.rho = rho;
    d.sigma = sigma;
    return d;
  }
};

}  // namespace stefan2d
