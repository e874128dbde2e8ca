#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace relu3d {

using MultiIndex = std::vector<std::size_t>;

std::size_t total_degree(const MultiIndex& j);

// All j >= 0 in d variables with |j|_1 <= n, ordered by total degree and
// then lexicographically (descending in the first coordinate).
std::vector<MultiIndex> total_degree_indices(std::size_t d, std::size_t n);

// All j with 0 <= j_k <= n, lexicographic.
std::vector<MultiIndex> box_indices(std::size_t d, std::size_t n);

double binomial(std::size_t n, std::size_t k);

// Polynomial in d variables, monomial basis.
struct PolyND {
  std::size_t d = 1;
  std::size_t n = 0;
  std::map<MultiIndex, double> coeffs;

  PolyND() = default;
  PolyND(std::size_t dim, std::size_t degree) : d(dim), n(degree) {}

  // Adds to the coefficient of x^j; throws InvalidArgument on a bad index.
  void add(const MultiIndex& j, double a);
  double coeff(const MultiIndex& j) const;
  double operator()(std::span<const double> x) const;
  double max_abs_coeff(bool skip_constant = false) const;
  double abs_coeff_sum() const;
  // Drops coefficients with |a| <= tol.
  void prune(double tol);
  void validate() const;
};

}  // namespace relu3d
