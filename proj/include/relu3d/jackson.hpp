#pragma once

#include <cstddef>
#include <vector>

namespace relu3d {

// (1 - |k|/m) for k = -(m-1)..(m-1).
std::vector<double> fejer_coeffs(std::size_t m);

struct KernelCoeffs {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t m = 0;            // floor(n/r) + 1
  std::vector<double> a;        // K(t) = a_0 + sum_{k>=1} a_k cos(kt), k = 0..n
  std::vector<double> a_tilde;  // unnormalized cosine coefficients of F_m(t)^r
  double gamma = 0.0;           // a = gamma * a_tilde

  double operator()(double t) const;
};

// Normalized 2r-th power of the Fejer ratio sin(mt/2)/sin(t/2); the
// integral over [-pi, pi] is 1. Requires 1 <= r <= n.
KernelCoeffs jackson_kernel(std::size_t n, std::size_t r);

// Integral over [-pi, pi] of |t|^k K(t); requires k <= 2r - 2.
double kernel_moments(const KernelCoeffs& K, std::size_t k);

}  // namespace relu3d
