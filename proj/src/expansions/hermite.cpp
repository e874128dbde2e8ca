#include "relu3d/hermite.hpp"

#include <cmath>
#include <numbers>

#include "relu3d/errors.hpp"
#include "relu3d/numerics.hpp"

namespace relu3d {

std::vector<double> hermite_poly_coeffs(std::size_t n) {
  // unnormalized He_k, integer coefficients: He_{k+1} = x He_k - k He_{k-1}
  std::vector<double> prev{1.0}, cur{1.0};
  if (n >= 1) cur = {0.0, 1.0};
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (std::size_t j = 0; j <= k; ++j) next[j + 1] += cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= double(k) * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  const double norm = std::sqrt(std::tgamma(double(n) + 1.0));
  double sum = 0.0;
  for (double& c : cur) {
    c /= norm;
    sum += std::abs(c);
  }
  if (sum > std::pow(6.0, 0.5 * double(n)) * (1.0 + 1e-12))
    throw NumericError("hermite_poly_coeffs: coefficient sum bound violated");
  return cur;
}

std::vector<double> hermite_eval_all(std::size_t n, double x) {
  std::vector<double> h(n + 1);
  h[0] = 1.0;
  if (n >= 1) h[1] = x;
  for (std::size_t k = 1; k < n; ++k)
    h[k + 1] = (x * h[k] - std::sqrt(double(k)) * h[k - 1]) / std::sqrt(double(k + 1));
  return h;
}

double hermite_eval(std::size_t n, double x) { return hermite_eval_all(n, x)[n]; }

double hermite_orthonormality_check(std::size_t n_max, std::size_t Q) {
  if (Q < n_max + 1) throw InvalidArgument("hermite_orthonormality_check: need Q >= n_max + 1");
  const QuadratureRule rule = gauss_hermite(Q);
  std::vector<std::vector<CompensatedSum>> gram(n_max + 1, std::vector<CompensatedSum>(n_max + 1));
  for (std::size_t q = 0; q < Q; ++q) {
    const auto h = hermite_eval_all(n_max, rule.nodes[q]);
    for (std::size_t i = 0; i <= n_max; ++i)
      for (std::size_t j = 0; j <= n_max; ++j) gram[i][j].add(rule.weights[q] * h[i] * h[j]);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i <= n_max; ++i)
    for (std::size_t j = 0; j <= n_max; ++j)
      worst = std::max(worst, std::abs(gram[i][j].value() - (i == j ? 1.0 : 0.0)));
  return worst;
}

std::size_t default_hermite_order(std::size_t n) { return std::max<std::size_t>(2 * n + 16, 40); }

double HermiteExpansion::operator()(std::span<const double> x) const {
  if (x.size() != d) throw InvalidArgument("HermiteExpansion: wrong input dimension");
  std::vector<std::vector<double>> h(d);
  for (std::size_t k = 0; k < d; ++k) h[k] = hermite_eval_all(n, x[k]);
  CompensatedSum s;
  for (const auto& [nu, c] : coeffs) {
    double t = c;
    for (std::size_t k = 0; k < d; ++k) t *= h[k][nu[k]];
    s.add(t);
  }
  return s.value();
}

HermiteExpansion hermite_expansion(const TargetSpec& target, std::size_t n, std::size_t d,
                                   std::size_t Q) {
  if (target.dim() != d) throw InvalidArgument("hermite_expansion: dimension mismatch");
  if (Q < 2 * n) throw InvalidArgument("hermite_expansion: quadrature order below 2n");
  const QuadratureRule rule = gauss_hermite(Q);
  std::vector<std::vector<double>> H(Q);
  for (std::size_t q = 0; q < Q; ++q) H[q] = hermite_eval_all(n, rule.nodes[q]);

  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= Q;
  std::vector<double> samples(total);
  std::vector<double> x(d);
  std::vector<std::size_t> idx(d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double w = 1.0;
    for (std::size_t k = d; k-- > 0;) {
      idx[k] = rem % Q;
      rem /= Q;
      x[k] = rule.nodes[idx[k]];
      w *= rule.weights[idx[k]];
    }
    samples[flat] = w * target(x);
    if (!std::isfinite(samples[flat])) throw NumericError("hermite_expansion: non-finite sample");
  }

  HermiteExpansion e;
  e.d = d;
  e.n = n;
  e.quadrature_order = Q;
  std::vector<double> fx, fy;
  for (const MultiIndex& nu : box_indices(d, n)) {
    CompensatedSum s;
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      double t = samples[flat];
      for (std::size_t k = d; k-- > 0;) {
        t *= H[rem % Q][nu[k]];
        rem /= Q;
      }
      s.add(t);
    }
    const double c = s.value();
    e.coeffs[nu] = c;
    e.coeff_abs_sum += std::abs(c);
    if (std::abs(c) > 1e-14) {
      double r = 0.0;
      for (auto v : nu) r += std::sqrt(2.0 * double(v) + 1.0);
      fx.push_back(r);
      fy.push_back(std::log(std::abs(c)));
    }
  }
  if (fx.size() >= 2) {
    try {
      const LineFit f = fit_line(fx, fy);
      e.decay_rate = -f.slope;
      e.log_constant = f.intercept;
    } catch (const InvalidArgument&) {
    }
  }
  return e;
}

double hermite_tail_bound(std::size_t n, double M) {
  if (!(M >= 1.0)) throw InvalidArgument("hermite_tail_bound: requires M >= 1");
  // (2n)!! = 2^n n!, evaluated in logs
  const double lg = double(n) * std::log(2.0) + std::lgamma(double(n) + 1.0) +
                    2.0 * double(n) * std::log(std::sqrt(6.0) * M) - 0.5 * M * M;
  return std::exp(lg) / std::sqrt(2.0 * std::numbers::pi);
}

double hermite_tail_integral(std::size_t n, double M) {
  const QuadratureRule rule = composite_gauss_legendre(M, M + 40.0 + double(n), 2048);
  const double one_side = integrate(
      [n](double t) {
        const double h = hermite_eval(n, t);
        return h * h * normal_pdf(t);
      },
      rule);
  return 2.0 * one_side;
}

}  // namespace relu3d
