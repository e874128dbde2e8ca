#include "relu3d/poly.hpp"

#include <cmath>
#include <numeric>

#include "relu3d/errors.hpp"

namespace relu3d {

std::size_t total_degree(const MultiIndex& j) {
  return std::accumulate(j.begin(), j.end(), std::size_t{0});
}

namespace {

void fill_total(std::size_t d, std::size_t remaining, MultiIndex& cur,
                std::vector<MultiIndex>& out) {
  if (cur.size() + 1 == d) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t k = remaining + 1; k-- > 0;) {
    cur.push_back(k);
    fill_total(d, remaining - k, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> total_degree_indices(std::size_t d, std::size_t n) {
  if (d == 0) throw InvalidArgument("total_degree_indices: d must be positive");
  std::vector<MultiIndex> out;
  MultiIndex cur;
  for (std::size_t k = 0; k <= n; ++k) fill_total(d, k, cur, out);
  return out;
}

std::vector<MultiIndex> box_indices(std::size_t d, std::size_t n) {
  if (d == 0) throw InvalidArgument("box_indices: d must be positive");
  std::vector<MultiIndex> out;
  MultiIndex j(d, 0);
  while (true) {
    out.push_back(j);
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (j[k] < n) {
        ++j[k];
        break;
      }
      j[k] = 0;
      if (k == 0) return out;
    }
  }
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return std::round(r);
}

void PolyND::add(const MultiIndex& j, double a) {
  if (j.size() != d) throw InvalidArgument("PolyND: multi-index has wrong dimension");
  if (total_degree(j) > n) throw InvalidArgument("PolyND: multi-index exceeds degree");
  if (!std::isfinite(a)) throw InvalidArgument("PolyND: non-finite coefficient");
  coeffs[j] += a;
}

double PolyND::coeff(const MultiIndex& j) const {
  auto it = coeffs.find(j);
  return it == coeffs.end() ? 0.0 : it->second;
}

double PolyND::operator()(std::span<const double> x) const {
  if (x.size() != d) throw InvalidArgument("PolyND: wrong input dimension");
  double s = 0.0;
  for (const auto& [j, a] : coeffs) {
    double term = a;
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t e = 0; e < j[k]; ++e) term *= x[k];
    s += term;
  }
  return s;
}

double PolyND::max_abs_coeff(bool skip_constant) const {
  double m = 0.0;
  for (const auto& [j, a] : coeffs)
    if (!(skip_constant && total_degree(j) == 0)) m = std::max(m, std::abs(a));
  return m;
}

double PolyND::abs_coeff_sum() const {
  double s = 0.0;
  for (const auto& kv : coeffs) s += std::abs(kv.second);
  return s;
}

void PolyND::prune(double tol) {
  std::erase_if(coeffs, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

void PolyND::validate() const {
  for (const auto& [j, a] : coeffs) {
    if (j.size() != d || total_degree(j) > n)
      throw InvalidArgument("PolyND: multi-index out of range");
    if (!std::isfinite(a)) throw InvalidArgument("PolyND: non-finite coefficient");
  }
}

}  // namespace relu3d
