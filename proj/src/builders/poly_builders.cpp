#include <algorithm>
#include <cmath>
#include <string>

#include "chains.hpp"
#include "relu3d/builders.hpp"
#include "relu3d/chebyshev.hpp"
#include "relu3d/errors.hpp"

namespace relu3d {

namespace {

double ud(std::size_t v) { return static_cast<double>(v); }

std::size_t ceil_at_least(double v, std::size_t lo) {
  if (!(v > ud(lo))) return lo;
  return static_cast<std::size_t>(std::ceil(v - 1e-12));
}

double multi_width_term(std::size_t n, std::size_t d) {
  return std::pow(std::exp(1.0) * ud(n + d) / ud(d), ud(d));
}

BuildReport assemble_poly(const PolyND& p, std::size_t H, const std::set<MultiIndex>& support,
                          std::size_t max_width) {
  NetAssembler a(p.d);
  std::vector<Affine> xs;
  for (std::size_t i = 0; i < p.d; ++i) xs.emplace_back(a.input(i));
  detail::PolyChain chain(xs, p, H, support);
  if (chain.width() > max_width) {
    throw InvalidArgument("polynomial net needs width " + std::to_string(chain.width()) +
                          " above the cap " + std::to_string(max_width));
  }
  for (std::size_t s = 0; s < chain.steps(); ++s) {
    a.open_layer();
    chain.step(a, 0);
  }
  BuildReport r{a.finish({chain.result()})};
  r.expected.depth = chain.steps();
  r.expected.height = chain.steps() > 0 ? chain.height() : 0;
  r.expected.width = chain.steps() > 0 ? chain.width() : 0;
  r.dim = p.d;
  r.diagnostics.emplace_back("built_degree", ud(chain.degree()));
  return r;
}

}  // namespace

std::size_t smooth_height(std::size_t N) {
  const double m = ud(N + 1);
  // 2(m+1) 3^m * 3 m^2 * 2^-2(H+1) <= 2^-m
  const double need =
      0.5 * (std::log2(2.0 * (m + 1.0)) + m * std::log2(3.0) + std::log2(3.0 * m * m) + m) - 1.0;
  return ceil_at_least(need, 1);
}

double smooth_height_printed(std::size_t N) {
  const double n = ud(N);
  return 0.5 * (std::log2(6.0) * n + 3.0 * std::log2(n + 2.0) + 2.0 * std::log2(3.0));
}

std::size_t cube_height(std::size_t N, double delta, std::size_t d) {
  const double need = 0.5 * (std::log2(6.0 * ud(N)) + ud(d) * std::log2(std::exp(1.0) * ud(N + d) / ud(d)) -
                             ud(N) * std::log2(1.0 - delta)) -
                      1.0;
  return ceil_at_least(need, 1);
}

double cube_height_printed(std::size_t N, double delta, std::size_t d) {
  const double n = ud(N);
  const double dd = ud(d);
  return 0.5 * (std::log2(n) + n * std::log2(1.0 - delta) + dd * std::log2(n + dd) -
                dd * std::log2(dd / std::exp(1.0)) - std::log2(6.0) - 2.0);
}

std::size_t ellipse_height(std::size_t N, double rho, std::size_t d) {
  const double n = ud(N);
  const double dd = ud(d);
  const double h = 0.5 * (dd * std::log2((n + 1.0) * std::exp(1.0) * (n + dd) / dd) +
                          std::log2(6.0 * n) + n / std::sqrt(dd) * std::log2(rho) - 2.0);
  return ceil_at_least(h, 1);
}

BuildReport build_poly1d(std::span<const double> coeffs, std::size_t H) {
  if (coeffs.size() < 2) throw InvalidArgument("polynomial needs degree n >= 1");
  const std::size_t n = coeffs.size() - 1;
  PolyND p(1, n);
  for (std::size_t k = 0; k <= n; ++k) p.add({k}, coeffs[k]);
  BuildReport r = assemble_poly(p, H, detail::PolyChain::full_support(1, n), 1000);
  r.stated = expected_size("poly", {.n = n, .H = H});
  r.theoretical_bound = expected_bound("poly", {.n = n, .H = H, .amax = p.max_abs_coeff(true)});
  r.bound_formula_id = "poly";
  r.domain = Domain::unit();
  r.inputs = {{"n", ud(n)}, {"H", ud(H)}};
  check_metrics(r);
  return r;
}

BuildReport build_polyNd(const PolyND& p, std::size_t H, const PolyBuildOptions& opt) {
  p.validate();
  std::size_t n = 0;
  for (const auto& [j, a] : p.coeffs)
    if (a != 0.0) n = std::max(n, total_degree(j));
  if (!opt.prune) n = std::max(n, p.n);
  if (n == 0) throw InvalidArgument("polynomial needs total degree n >= 1");
  const auto support = opt.prune ? detail::PolyChain::needed_support(p)
                                 : detail::PolyChain::full_support(p.d, n);
  BuildReport r = assemble_poly(p, H, support, opt.max_width);
  SizeParams sp{.n = n, .H = H, .d = p.d, .amax = p.max_abs_coeff(true)};
  r.stated = expected_size("polyNd", sp);
  r.theoretical_bound = expected_bound("polyNd", sp);
  r.bound_formula_id = "polyNd";
  r.domain = Domain::unit();
  r.inputs = {{"n", ud(n)}, {"H", ud(H)}, {"d", ud(p.d)}};
  check_metrics(r);
  return r;
}

BuildReport build_smooth1d(const TargetSpec& target, std::size_t N) {
  if (target.dim() != 1) throw InvalidArgument("smooth builder is one-dimensional");
  if (N == 0) throw InvalidArgument("N must be positive");
  const std::size_t m = N + 1;
  const ChebyshevResult cheb = chebyshev_interpolant_1d(target, m);
  std::vector<double> c(m + 1, 0.0);
  for (std::size_t k = 0; k <= m; ++k) c[k] = cheb.poly.coeff({k});
  const std::size_t H = smooth_height(N);
  BuildReport r = build_poly1d(c, H);
  r.stated = expected_size("smooth", {.N = N});
  r.stated_height_raw = smooth_height_printed(N);
  r.theoretical_bound = expected_bound("smooth", {.N = N});
  r.bound_formula_id = "smooth";
  r.inputs = {{"N", ud(N)}, {"H", ud(H)}};
  r.diagnostics.emplace_back("max_coeff", cheb.max_coeff);
  r.diagnostics.emplace_back("coeff_bound", cheb.coeff_bound);
  r.diagnostics.emplace_back("conditioning", cheb.conditioning);
  if (!target.factorial_derivative_bound()) {
    r.empirical = true;
    r.notes.push_back("target does not certify |f^(n)| <= n!; bound is empirical");
  }
  if (!cheb.coeff_bound_holds) r.notes.push_back("interpolant coefficients exceed 2(m+1)3^m");
  if (cheb.ill_conditioned) r.notes.push_back("monomial conversion is ill-conditioned");
  if (r.stated.height != r.expected.height) {
    r.notes.push_back("printed height " + std::to_string(r.stated.height) + ", derived " +
                      std::to_string(r.expected.height));
  }
  return r;
}

BuildReport build_analytic_cube(const TargetSpec& target, std::size_t N, double delta,
                                std::size_t d) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  if (N == 0) throw InvalidArgument("N must be positive");
  if (target.dim() != d) throw InvalidArgument("target dimension mismatch");
  PolyND P = power_series_truncate(target, N, d);
  P.n = N;
  const std::size_t H = cube_height(N, delta, d);
  BuildReport r = build_polyNd(P, H, {.prune = false});
  SizeParams sp{.N = N, .d = d, .delta = delta};
  r.stated = expected_size("analytic-cube", sp);
  r.stated_height_raw = cube_height_printed(N, delta, d);
  r.theoretical_bound = expected_bound("analytic-cube", sp);
  r.bound_formula_id = "analytic-cube";
  r.domain = Domain::shifted(0.0, 1.0 - delta);
  r.inputs = {{"N", ud(N)}, {"H", ud(H)}, {"delta", delta}, {"d", ud(d)}};
  if (r.stated.height != r.expected.height) {
    r.notes.push_back("printed height formula gives " + std::to_string(*r.stated_height_raw) +
                      ", derived height " + std::to_string(H));
  }
  return r;
}

BuildReport build_analytic_ellipse(const TargetSpec& target, std::size_t N, double rho,
                                   std::size_t d) {
  if (!(rho > std::pow(2.0, std::sqrt(ud(d)))))
    throw InvalidArgument("rho must exceed 2^sqrt(d)");
  if (N == 0) throw InvalidArgument("N must be positive");
  if (target.dim() != d) throw InvalidArgument("target dimension mismatch");
  const ChebyshevResult cheb = chebyshev_tensor_coeffs(target, N, d);
  PolyND P = cheb.poly;
  P.n = N;
  const std::size_t H = ellipse_height(N, rho, d);
  BuildReport r = build_polyNd(P, H, {.prune = false});
  SizeParams sp{.N = N, .d = d, .rho = rho};
  r.stated = expected_size("ellipse", sp);
  r.theoretical_bound = expected_bound("ellipse", sp);
  r.fitted_constant = true;
  r.bound_formula_id = "ellipse";
  r.domain = Domain::unit();
  r.inputs = {{"N", ud(N)}, {"H", ud(H)}, {"rho", rho}, {"d", ud(d)}};
  r.diagnostics.emplace_back("max_coeff", cheb.max_coeff);
  r.diagnostics.emplace_back("coeff_ratio", cheb.max_coeff / std::pow(ud(N + 1), ud(d)));
  r.diagnostics.emplace_back("conditioning", cheb.conditioning);
  r.diagnostics.emplace_back("width_term", multi_width_term(N, d));
  if (cheb.ill_conditioned) r.notes.push_back("monomial conversion is ill-conditioned");
  return r;
}

}  // namespace relu3d
