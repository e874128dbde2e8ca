#include "relu3d/trig_operator.hpp"

#include <cmath>
#include <numbers>

#include "relu3d/errors.hpp"
#include "relu3d/jackson.hpp"
#include "relu3d/numerics.hpp"

namespace relu3d {

namespace {

std::size_t default_nodes(std::size_t d) { return d == 1 ? 4096 : d == 2 ? 1024 : 128; }

std::vector<double> midpoints(std::size_t G) {
  std::vector<double> u(G);
  for (std::size_t i = 0; i < G; ++i)
    u[i] = -std::numbers::pi + 2.0 * std::numbers::pi * (double(i) + 0.5) / double(G);
  return u;
}

double basis(std::size_t j, int eta, double u) {
  return eta ? std::sin(double(j) * u) : std::cos(double(j) * u);
}

struct Samples {
  std::vector<double> values;  // row-major, last coordinate fastest
  double l1 = 0.0;
};

Samples sample(const TargetSpec& target, std::size_t d, std::size_t G) {
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= G;
  const auto u = midpoints(G);
  Samples s;
  s.values.resize(total);
  std::vector<double> x(d);
  CompensatedSum l1;
  const double cell = std::pow(2.0 * std::numbers::pi / double(G), double(d));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t k = d; k-- > 0;) {
      x[k] = u[rem % G] / std::numbers::pi;
      rem /= G;
    }
    const double v = target(x);
    if (!std::isfinite(v)) throw NumericError("trig operator: non-finite target sample");
    s.values[flat] = v;
    l1.add(std::abs(v) * cell);
  }
  s.l1 = l1.value();
  return s;
}

// Projects samples on prod_k basis(j_k, eta_k, u_k) for all j in box(n).
TrigComponent project(const Samples& s, std::size_t d, std::size_t G, std::size_t n,
                      const std::vector<int>& eta, const std::vector<double>& alpha) {
  const auto u = midpoints(G);
  const double h = 2.0 * std::numbers::pi / double(G);
  std::vector<double> cur = s.values;
  // contract one axis at a time, starting from the last (fastest) one
  std::size_t outer = cur.size() / G;  // product of leading extents
  std::size_t inner = 1;               // product of already-contracted extents (n+1 each)
  for (std::size_t axis = d; axis-- > 0;) {
    std::vector<std::vector<double>> B(n + 1, std::vector<double>(G));
    for (std::size_t j = 0; j <= n; ++j)
      for (std::size_t i = 0; i < G; ++i) B[j][i] = h * basis(j, eta[axis], u[i]);
    std::vector<double> next(outer * (n + 1) * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < G; ++i)
        for (std::size_t in = 0; in < inner; ++in) {
          const double v = cur[(o * G + i) * inner + in];
          if (v == 0.0) continue;
          for (std::size_t j = 0; j <= n; ++j) next[(o * (n + 1) + j) * inner + in] += B[j][i] * v;
        }
    cur = std::move(next);
    inner *= n + 1;
    if (axis > 0) outer /= G;
  }
  TrigComponent c;
  c.parity = eta;
  for (const MultiIndex& j : box_indices(d, n)) {
    bool vanishes = false;
    std::size_t flat = 0;
    double scale = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      if (eta[k] && j[k] == 0) vanishes = true;
      flat = flat * (n + 1) + j[k];
      scale *= alpha[j[k]];
    }
    if (vanishes) continue;
    c.a[j] = scale * cur[flat];
  }
  return c;
}

void finish_ratios(TrigOperatorCoeffs& out) {
  double amax = 0.0;
  for (double v : out.alpha) amax = std::max(amax, std::abs(v));
  out.alpha_ratio = amax / double(out.n);
  double cmax = 0.0;
  for (const auto& comp : out.components)
    for (const auto& kv : comp.a) cmax = std::max(cmax, std::abs(kv.second));
  const double denom = std::pow(double(out.n), double(out.d)) * out.f_l1;
  out.coeff_ratio = denom > 0.0 ? cmax / denom : 0.0;
}

TrigOperatorCoeffs build(const TargetSpec& target, std::size_t n, std::size_t r, std::size_t d,
                         const std::vector<std::vector<int>>& parities, std::size_t nodes) {
  if (target.dim() != d) throw InvalidArgument("trig operator: dimension mismatch");
  TrigOperatorCoeffs out;
  out.d = d;
  out.n = n;
  out.r = r;
  out.alpha = trig_operator_alpha(n, r);
  out.nodes = nodes ? nodes : default_nodes(d);
  const Samples s = sample(target, d, out.nodes);
  out.f_l1 = s.l1;
  for (const auto& eta : parities) {
    if (eta.size() != d) throw InvalidArgument("trig operator: parity has wrong length");
    out.components.push_back(project(s, d, out.nodes, n, eta, out.alpha));
  }
  finish_ratios(out);
  return out;
}

std::vector<std::vector<int>> all_parities(std::size_t d) {
  std::vector<std::vector<int>> out;
  for (std::size_t c = 0; c < (std::size_t{1} << d); ++c) {
    std::vector<int> eta(d);
    for (std::size_t k = 0; k < d; ++k) eta[k] = int((c >> k) & 1);
    out.push_back(eta);
  }
  return out;
}

}  // namespace

std::vector<double> trig_operator_alpha(std::size_t n, std::size_t r) {
  const KernelCoeffs K = jackson_kernel(n, r);
  std::vector<double> alpha(n + 1, 0.0);
  alpha[0] = K.a[0];
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t k = 1; k <= r && j * k <= n; ++k)
      alpha[j] += K.a[j * k] * (k % 2 ? 1.0 : -1.0) * binomial(r, k);
  return alpha;
}

TrigOperatorCoeffs trig_operator_1d(const TargetSpec& target, std::size_t n, std::size_t r,
                                    std::size_t nodes) {
  return build(target, n, r, 1, {{0}, {1}}, nodes);
}

TrigOperatorCoeffs trig_operator_nd(const TargetSpec& target, std::size_t n, std::size_t r,
                                    std::size_t d, const std::vector<int>& parity,
                                    std::size_t nodes) {
  return build(target, n, r, d, {parity}, nodes);
}

TrigOperatorCoeffs trig_operator_full(const TargetSpec& target, std::size_t n, std::size_t r,
                                      std::size_t nodes) {
  return build(target, n, r, target.dim(), all_parities(target.dim()), nodes);
}

double apply_Tn(const TrigOperatorCoeffs& c, std::span<const double> x) {
  if (x.size() != c.d) throw InvalidArgument("apply_Tn: wrong input dimension");
  std::vector<std::vector<double>> cosv(c.d), sinv(c.d);
  for (std::size_t k = 0; k < c.d; ++k) {
    cosv[k].resize(c.n + 1);
    sinv[k].resize(c.n + 1);
    for (std::size_t j = 0; j <= c.n; ++j) {
      cosv[k][j] = std::cos(double(j) * std::numbers::pi * x[k]);
      sinv[k][j] = std::sin(double(j) * std::numbers::pi * x[k]);
    }
  }
  CompensatedSum s;
  for (const auto& comp : c.components)
    for (const auto& [j, a] : comp.a) {
      double t = a;
      for (std::size_t k = 0; k < c.d; ++k) t *= comp.parity[k] ? sinv[k][j[k]] : cosv[k][j[k]];
      s.add(t);
    }
  return s.value();
}

double apply_Tn(const TrigOperatorCoeffs& c, double x) {
  const double v[1] = {x};
  return apply_Tn(c, std::span<const double>(v, 1));
}

std::vector<TargetSpec> parity_decompose(const TargetSpec& target) {
  std::vector<TargetSpec> out;
  for (auto& eta : all_parities(target.dim())) out.push_back(target.with_parity(eta));
  return out;
}

}  // namespace relu3d
