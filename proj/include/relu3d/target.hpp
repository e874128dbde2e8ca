#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relu3d/poly.hpp"

namespace relu3d {

enum class DomainKind { kUnitCube, kShiftedCube, kSymmetricCube, kGaussian };

struct Domain {
  DomainKind kind = DomainKind::kUnitCube;
  double lo = 0.0;
  double hi = 1.0;

  static Domain unit() { return {}; }
  static Domain shifted(double lo, double hi) { return {DomainKind::kShiftedCube, lo, hi}; }
  static Domain symmetric() { return {DomainKind::kSymmetricCube, -1.0, 1.0}; }
  static Domain gaussian() { return {DomainKind::kGaussian, 0.0, 0.0}; }
  bool bounded() const { return kind != DomainKind::kGaussian; }
};

enum class TargetKind { kExplicitPolynomial, kExplicitPowerSeries, kCatalog };

// A function to approximate: an explicit coefficient map or a named
// catalog function with parameters.
//
// Catalog ids (params in brackets, all optional with defaults):
//   constant [c=1]             c
//   identity [i=0]             x_i
//   power [k=2], square        x_1^k
//   product                    prod x_i
//   reciprocal-shift [a=2]     prod 1/(x_i + a)
//   geometric-series           2^-d prod 1/(1 - x_i/2)
//   scaled-exponential [c=1, s=1]  s exp(c sum x_i)
//   cosine [w=1]               prod cos(w x_i)
//   runge [a=25]               prod 1/(1 + a x_i^2)
//   abs-power [alpha=1]        sum |x_i|^alpha
//   step [t=0]                 1 if x_1 >= t else 0
//   sign                       sign(x_1)
class TargetSpec {
 public:
  static TargetSpec polynomial(PolyND p, Domain domain = Domain::unit());
  static TargetSpec power_series(PolyND coefficients, Domain domain = Domain::unit());
  static TargetSpec catalog(const std::string& id, std::vector<double> params = {},
                            std::size_t dim = 1, Domain domain = Domain::unit());

  TargetKind kind() const { return kind_; }
  const std::string& id() const { return id_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t dim() const { return dim_; }
  const Domain& domain() const { return domain_; }
  const PolyND& explicit_coeffs() const { return poly_; }
  // Empty when no parity projection applies; else eta_k in {0 even, 1 odd}.
  const std::vector<int>& parity() const { return parity_; }

  double operator()(std::span<const double> x) const;
  double at(double x) const;

  // Projection onto the component that is even (0) or odd (1) in each
  // coordinate: 2^-d sum_s (prod_{eta_k=1} s_k) f(s * x).
  TargetSpec with_parity(std::vector<int> eta) const;
  TargetSpec with_domain(Domain domain) const;

  bool has_series() const;
  // Power-series coefficients about 0 up to total degree N.
  PolyND series(std::size_t N) const;
  // Sum of |a_j| over the full series (infinite if divergent).
  double series_abs_sum() const;

  // Closed-form upper bound on sup over [0,1] of |f^(k)| (d = 1).
  std::optional<double> derivative_bound(std::size_t k) const;
  // |f^(k)| <= k! on [0,1] for every k.
  bool factorial_derivative_bound() const;

  // Integral of f^2 d(gamma_d) outside [-M,M]^d, when available.
  std::optional<double> gauss_tail_sq(double M) const;
  // Integral of f^2 d(gamma_d) over R^d, when available.
  std::optional<double> gauss_norm_sq() const;

  std::string describe() const;

 private:
  double eval_raw(std::span<const double> x) const;
  // f = prod_k factor(k, x_k) for every catalog id except abs-power.
  bool separable() const;
  double factor(std::size_t k, double t) const;

  TargetKind kind_ = TargetKind::kCatalog;
  std::string id_;
  std::vector<double> params_;
  std::size_t dim_ = 1;
  Domain domain_;
  PolyND poly_;
  std::vector<int> parity_;
};

// {"catalog_id": ..., "params": [...], "dimension": d, "domain": "unit" |
// "symmetric" | "gaussian" | [lo, hi]} or {"coeffs": [[j..., a], ...],
// "dimension": d, "degree": n, "kind": "polynomial" | "power-series"}.
TargetSpec parse_target(const std::string& json_text);
std::string target_to_json(const TargetSpec& t);

}  // namespace relu3d
