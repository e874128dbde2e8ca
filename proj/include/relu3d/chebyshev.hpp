#pragma once

#include <cstddef>
#include <vector>

#include "relu3d/poly.hpp"
#include "relu3d/target.hpp"

namespace relu3d {

struct ChebyshevResult {
  PolyND poly;                     // monomial basis on [0,1]^d
  std::vector<double> chebyshev;   // shifted-Chebyshev coefficients, row-major (m+1)^d
  std::size_t degree = 0;
  double conditioning = 1.0;       // largest abs coefficient sum of a basis polynomial
  bool ill_conditioned = false;    // conditioning > 1e12
  double max_coeff = 0.0;          // max |monomial coefficient|
  double coeff_bound = 0.0;        // 2(m+1)3^m (one dimension)
  bool coeff_bound_holds = true;
};

// Monomial coefficients of T_k(2x - 1), k = 0..m.
std::vector<std::vector<double>> shifted_chebyshev_monomials(std::size_t m);

// Interpolant at the m+1 Chebyshev points of [0,1].
ChebyshevResult chebyshev_interpolant_1d(const TargetSpec& target, std::size_t m);

// Tensor interpolant of degree N per variable, truncated to total degree N.
ChebyshevResult chebyshev_tensor_coeffs(const TargetSpec& target, std::size_t N, std::size_t d);

// Power series truncated to total degree N; rejects sum |a_j| > 1.
PolyND power_series_truncate(const TargetSpec& target, std::size_t N, std::size_t d);

}  // namespace relu3d
