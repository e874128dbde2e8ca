#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "relu3d/poly.hpp"
#include "relu3d/target.hpp"

namespace relu3d {

// Monomial coefficients c_0..c_n of the orthonormal (probabilists')
// Hermite polynomial of degree n. Throws NumericError if sum |c_j| > 6^(n/2).
std::vector<double> hermite_poly_coeffs(std::size_t n);

// Orthonormal Hermite polynomial by three-term recurrence.
double hermite_eval(std::size_t n, double x);
// All values for degrees 0..n at x.
std::vector<double> hermite_eval_all(std::size_t n, double x);

// max |<He_i, He_j> - delta_ij| over i, j <= n_max using Q Gauss nodes.
double hermite_orthonormality_check(std::size_t n_max, std::size_t Q);

// Default Gauss-Hermite order for degree n: max(2n + 16, 40).
std::size_t default_hermite_order(std::size_t n);

struct HermiteExpansion {
  std::size_t d = 1;
  std::size_t n = 0;
  std::size_t quadrature_order = 0;
  std::map<MultiIndex, double> coeffs;  // 0 <= nu_k <= n
  // log|c_nu| ~ log_constant - decay_rate * sum_k sqrt(2 nu_k + 1), fitted
  // over coefficients above 1e-14.
  double decay_rate = 0.0;
  double log_constant = 0.0;
  double coeff_abs_sum = 0.0;

  double operator()(std::span<const double> x) const;
};

HermiteExpansion hermite_expansion(const TargetSpec& target, std::size_t n, std::size_t d,
                                   std::size_t Q);

// (1/sqrt(2 pi)) (2n)!! (sqrt(6) M)^(2n) exp(-M^2/2); requires M >= 1.
double hermite_tail_bound(std::size_t n, double M);

// Integral over |x| > M of He_n^2 against the standard normal density.
double hermite_tail_integral(std::size_t n, double M);

}  // namespace relu3d
