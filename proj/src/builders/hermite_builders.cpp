#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "chains.hpp"
#include "relu3d/builders.hpp"
#include "relu3d/errors.hpp"
#include "relu3d/gadgets.hpp"
#include "relu3d/hermite.hpp"
#include "relu3d/numerics.hpp"

namespace relu3d {

namespace {

double ud(std::size_t v) { return static_cast<double>(v); }

// Scale above which double evaluation of the chain loses too many digits.
constexpr double kExtendedScale = 1e6;

double log_band(double delta, double M, double ln_growth) {
  // sqrt(2 delta phi(M - delta)) (1 + 2 (sqrt6 M)^n), in logs
  const double t = M - delta;
  const double ln_phi = -0.5 * t * t - 0.5 * std::log(2.0 * std::numbers::pi);
  return 0.5 * (std::log(2.0 * delta) + ln_phi) + ln_growth;
}

double ln_one_plus_two_pow(double ln_base, std::size_t n) {
  // ln(1 + 2 b^n) without overflow
  const double x = std::log(2.0) + ud(n) * ln_base;
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double chain_scale(const std::vector<double>& c, double M) {
  double s = 0.0, p = 1.0;
  for (double v : c) {
    s += std::abs(v) * p;
    p *= M;
  }
  return s;
}

}  // namespace

BuildReport build_clipped_hermite(std::size_t n, double M, double delta, std::size_t H) {
  if (!(M >= 1.0)) throw InvalidArgument("M must be at least 1");
  if (!(delta > 0.0 && delta < M)) throw InvalidArgument("delta must lie in (0, M)");
  const std::vector<double> c = hermite_poly_coeffs(n);
  NetAssembler a(1);
  detail::ClippedChain chain(Affine(a.input(0)), {c}, M, delta, H, std::max<std::size_t>(n, 1));
  for (std::size_t j = 0; j < chain.length(); ++j) {
    a.open_layer();
    chain.step(a, 0);
  }
  BuildReport r{a.finish({chain.result(0)})};
  if (chain.length() >= 2) {
    r.expected = {.width = chain.width(), .depth = chain.length(), .height = H + 1};
  } else {
    r.expected = {.width = 4, .depth = 1, .height = 1};
  }
  r.stated = {.width = 8, .depth = n, .height = H + 1};
  const double growth = std::pow(std::sqrt(6.0) * M, ud(n));
  r.theoretical_bound =
      n == 0 ? 0.0 : growth * 3.0 * ud(n) * ud(n) * std::ldexp(1.0, -2 * static_cast<int>(H + 1));
  r.bound_formula_id = "clipped-hermite-interior";
  r.norm = NormKind::kSup;
  r.domain = Domain::shifted(-(M - delta), M - delta);
  r.extended_precision = chain_scale(c, M) > kExtendedScale;
  r.inputs = {{"n", ud(n)}, {"M", M}, {"delta", delta}, {"H", ud(H)}};
  r.diagnostics = {{"global_bound", 1.0 + growth},
                   {"transition_bound", 1.0 + 2.0 * growth},
                   {"support", M}};
  check_metrics(r);
  return r;
}

HermiteParams choose_hermite_params(std::size_t n, double B) {
  if (n == 0) throw InvalidArgument("n must be positive");
  if (!(B > 0.0)) throw InvalidArgument("B must be positive");
  HermiteParams hp;
  hp.n = n;
  hp.B = B;
  const double nn = ud(n);
  const double sq = std::sqrt(nn);
  hp.M_formula = std::sqrt(12.0 * nn * std::log(6.0 * nn) + 24.0 * B * sq);
  hp.M = std::ceil(hp.M_formula * 256.0) / 256.0;
  const double ln_s6M = std::log(std::sqrt(6.0) * hp.M);
  const double log2e = std::numbers::log2e;
  hp.H_real = 0.5 * nn * ln_s6M * log2e + std::log2(nn) + 0.5 * std::log2(1.25) +
              0.5 * B * log2e * sq;
  hp.H = static_cast<std::size_t>(std::ceil(hp.H_real - 1e-12));
  hp.H_printed =
      0.5 * nn * ln_s6M * log2e + std::log2(1.25 * nn) + 0.5 * B * log2e * sq;
  hp.target = std::exp(-B * sq);
  auto interior = [&](double h) {
    return std::exp(nn * ln_s6M + std::log(3.0 * nn * nn) - 2.0 * (h + 1.0) * std::numbers::ln2);
  };
  hp.interior_at_real = interior(hp.H_real);
  hp.interior = interior(ud(hp.H));
  hp.tail = std::exp(nn * std::log(std::sqrt(6.0 * nn) * hp.M) - 0.25 * hp.M * hp.M) /
            std::sqrt(2.0 * std::numbers::pi);
  const double ln_growth = ln_one_plus_two_pow(ln_s6M, n);
  const double ln_goal = std::log(hp.target / 1000.0);
  int k = 0;
  while (log_band(std::ldexp(1.0, -k), hp.M, ln_growth) > ln_goal) {
    if (++k > 200) throw NumericError("no transition width meets the band budget");
  }
  // keep delta below M/2 so the window keeps a nonempty interior
  while (std::ldexp(1.0, -k) > 0.5 * hp.M) ++k;
  hp.delta = std::ldexp(1.0, -k);
  hp.band = std::exp(log_band(hp.delta, hp.M, ln_growth));
  hp.total = hp.interior + hp.tail + hp.band;
  return hp;
}

BuildReport build_hermite_gauss(const TargetSpec& target, std::size_t N, std::size_t d,
                                std::vector<double> beta) {
  if (d == 0 || target.dim() != d) throw InvalidArgument("target dimension mismatch");
  if (N == 0) throw InvalidArgument("N must be positive");
  if (beta.size() == 1) beta.assign(d, beta[0]);
  if (beta.size() != d) throw InvalidArgument("beta needs one entry per coordinate");
  double prod = 1.0;
  for (double b : beta) {
    if (!(b > 0.0)) throw InvalidArgument("beta entries must be positive");
    prod *= b;
  }
  const double B = std::pow(prod, 1.0 / ud(d)) / std::sqrt(2.0);
  const HermiteParams hp = choose_hermite_params(N, B);
  const HermiteExpansion expn = hermite_expansion(target, N, d, default_hermite_order(N));

  double cmax = 0.0;
  for (const auto& [nu, f] : expn.coeffs) cmax = std::max(cmax, std::abs(f));
  std::map<MultiIndex, double> kept;
  for (const auto& [nu, f] : expn.coeffs) {
    if (std::abs(f) > 1e-14 * cmax && std::abs(f) > 1e-300) kept.emplace(nu, f);
  }
  std::vector<std::vector<double>> hc(N + 1);
  for (std::size_t v = 0; v <= N; ++v) hc[v] = hermite_poly_coeffs(v);

  NetAssembler a(d);
  const double e = hp.target;
  BuildReport r{Net3D(d, {}, {Readout{}})};
  std::size_t H2 = 0;
  double lip = 0.0;  // per-term network error bound

  if (d == 1) {
    std::vector<double> combined(N + 1, 0.0);
    for (const auto& [nu, f] : kept)
      for (std::size_t j = 0; j < hc[nu[0]].size(); ++j) combined[j] += f * hc[nu[0]][j];
    detail::ClippedChain chain(Affine(a.input(0)), {combined}, hp.M, hp.delta, hp.H, N);
    for (std::size_t j = 0; j < N; ++j) {
      a.open_layer();
      chain.step(a, 0);
    }
    r.net = a.finish({chain.result(0)});
    r.expected = N >= 2 ? SizeMetrics{.width = chain.width(), .depth = N, .height = hp.H + 1}
                        : SizeMetrics{.width = 4, .depth = 1, .height = 1};
    lip = e;
  } else {
    std::vector<std::vector<std::size_t>> used(d);
    for (std::size_t k = 0; k < d; ++k) {
      std::set<std::size_t> s;
      for (const auto& [nu, f] : kept) s.insert(nu[k]);
      used[k].assign(s.begin(), s.end());
    }
    std::vector<detail::ClippedChain> chains;
    std::size_t chain_width = 0;
    for (std::size_t k = 0; k < d; ++k) {
      std::vector<std::vector<double>> polys;
      for (std::size_t v : used[k]) polys.push_back(hc[v]);
      if (polys.empty()) polys.push_back({1.0});
      chains.emplace_back(Affine(a.input(k)), polys, hp.M, hp.delta, hp.H, N);
      chain_width += chains.back().width();
    }
    for (std::size_t j = 0; j < N; ++j) {
      a.open_layer();
      for (auto& ch : chains) ch.step(a, 0);
    }
    const double m_prod = 1.0 + std::pow(std::sqrt(6.0) * hp.M, ud(N));
    // 6(d-1) m_prod^d 2^-2(H2+1) <= e
    const double need =
        0.5 * (std::log2(6.0 * ud(d - 1)) + ud(d) * std::log2(m_prod) - std::log2(e)) - 1.0;
    H2 = need > 1.0 ? static_cast<std::size_t>(std::ceil(need - 1e-12)) : 1;
    std::vector<gadgets::ProductTree> trees;
    std::vector<double> weights;
    for (const auto& [nu, f] : kept) {
      std::vector<Affine> factors;
      for (std::size_t k = 0; k < d; ++k) {
        const auto pos = std::lower_bound(used[k].begin(), used[k].end(), nu[k]) - used[k].begin();
        factors.push_back(chains[k].result(static_cast<std::size_t>(pos)));
      }
      trees.emplace_back(std::move(factors), H2, m_prod);
      weights.push_back(f);
    }
    for (std::size_t s = 0; s + 1 < d; ++s) {
      a.open_layer();
      for (auto& t : trees) t.step(a, 0);
    }
    Affine out;
    for (std::size_t i = 0; i < trees.size(); ++i) out += weights[i] * trees[i].result();
    r.net = a.finish({out});
    const std::size_t chain_h = N >= 2 ? hp.H + 1 : 1;
    const std::size_t clip_w = 4 * d;
    const std::size_t body_w = N >= 2 ? chain_width : clip_w;
    const std::size_t tree_w = trees.size() * (4 + d);
    r.expected = {.width = std::max({clip_w, body_w, tree_w}),
                  .depth = N + d - 1,
                  .height = trees.empty() ? chain_h : std::max(chain_h, H2 + 1)};
    lip = ud(d) * std::pow(1.0 + e, ud(d - 1)) * e + e;
  }

  SizeParams sp{.N = N, .d = d, .B = B};
  r.stated = expected_size("hermite", sp);
  r.stated_height_raw = 0.5 * ud(d) * ud(N) *
                            std::log2(1.0 + 6.0 * std::sqrt(2.0 * ud(N) * std::log(6.0 * ud(N)) +
                                                            4.0 * B * std::sqrt(ud(N)))) +
                        std::log2(1.25 * ud(N)) + 0.5 * B * std::numbers::log2e * std::sqrt(ud(N));
  double abs_sum = 0.0, kept_sq = 0.0;
  for (const auto& [nu, f] : kept) abs_sum += std::abs(f);
  for (const auto& [nu, f] : expn.coeffs) kept_sq += f * f;
  const auto norm_sq = target.gauss_norm_sq();
  const double trunc = norm_sq ? std::sqrt(std::max(0.0, *norm_sq - kept_sq)) : 0.0;
  if (norm_sq) {
    r.theoretical_bound = trunc + abs_sum * lip;
  } else {
    r.theoretical_bound = expected_bound("hermite", sp);
    r.fitted_constant = true;
    r.notes.push_back("no closed-form Gaussian norm; bound is the rate with C = 1");
  }
  r.bound_formula_id = "hermite";
  r.norm = NormKind::kGaussL2;
  r.dim = d;
  r.domain = Domain::gaussian();
  r.extended_precision = true;
  r.inputs = {{"N", ud(N)}, {"d", ud(d)}, {"B", B}};
  for (std::size_t k = 0; k < d; ++k) r.inputs.emplace_back("beta" + std::to_string(k), beta[k]);
  r.diagnostics = {{"M", hp.M},
                   {"M_formula", hp.M_formula},
                   {"H", ud(hp.H)},
                   {"H_real", hp.H_real},
                   {"H_printed", hp.H_printed},
                   {"H2", ud(H2)},
                   {"delta", hp.delta},
                   {"rate", e},
                   {"interior", hp.interior},
                   {"interior_at_real", hp.interior_at_real},
                   {"tail", hp.tail},
                   {"band", hp.band},
                   {"total", hp.total},
                   {"coeff_abs_sum", abs_sum},
                   {"truncation_l2", trunc},
                   {"support", hp.M},
                   {"terms", ud(kept.size())},
                   {"decay_rate", expn.decay_rate}};
  check_metrics(r);
  return r;
}

}  // namespace relu3d
