#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "relu3d/poly.hpp"
#include "relu3d/target.hpp"

namespace relu3d {

// Coefficients of prod_k cos(j_k pi x_k - eta_k pi/2) over [-1,1]^d.
struct TrigComponent {
  std::vector<int> parity;  // eta_k in {0, 1}
  std::map<MultiIndex, double> a;
};

struct TrigOperatorCoeffs {
  std::size_t d = 1;
  std::size_t n = 0;
  std::size_t r = 0;
  std::vector<double> alpha;  // j = 0..n
  std::vector<TrigComponent> components;
  double f_l1 = 0.0;          // integral of |f(u/pi)| over [-pi,pi]^d
  double alpha_ratio = 0.0;   // max_j |alpha_j| / n
  double coeff_ratio = 0.0;   // max |a_j| / (n^d f_l1)
  std::size_t nodes = 0;      // quadrature nodes per dimension
};

// alpha_0 = a_0 and alpha_j = sum_{k <= r, jk <= n} a_{jk} (-1)^(k+1) C(r,k)
// for the kernel coefficients a of jackson_kernel(n, r).
std::vector<double> trig_operator_alpha(std::size_t n, std::size_t r);

// T_n applied to f(u/pi) on [-pi,pi], returned as cosine and sine parts in x.
// nodes = 0 picks 4096.
TrigOperatorCoeffs trig_operator_1d(const TargetSpec& target, std::size_t n, std::size_t r,
                                    std::size_t nodes = 0);

// Tensor T_n for the component of given parity; nodes = 0 picks 4096 (d = 1),
// 1024 (d = 2) or 128 per dimension.
TrigOperatorCoeffs trig_operator_nd(const TargetSpec& target, std::size_t n, std::size_t r,
                                    std::size_t d, const std::vector<int>& parity,
                                    std::size_t nodes = 0);

// All 2^d parity components in one coefficient set.
TrigOperatorCoeffs trig_operator_full(const TargetSpec& target, std::size_t n, std::size_t r,
                                      std::size_t nodes = 0);

double apply_Tn(const TrigOperatorCoeffs& c, std::span<const double> x);
double apply_Tn(const TrigOperatorCoeffs& c, double x);

// Component c has eta_k = bit k of c; the components sum to the target.
std::vector<TargetSpec> parity_decompose(const TargetSpec& target);

}  // namespace relu3d
