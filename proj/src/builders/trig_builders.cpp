#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <tuple>

#include "chains.hpp"
#include "relu3d/blocks.hpp"
#include "relu3d/builders.hpp"
#include "relu3d/chebyshev.hpp"
#include "relu3d/errors.hpp"
#include "relu3d/gadgets.hpp"
#include "relu3d/trig_operator.hpp"

namespace relu3d {

namespace {

double ud(std::size_t v) { return static_cast<double>(v); }

// Sum over the folded variables of sign * P(z_v), P the cosine polynomial.
PolyND folded_poly(const std::vector<double>& c, const std::vector<std::pair<std::size_t, double>>& terms,
                   std::size_t dim) {
  const std::size_t m = c.size() - 1;
  PolyND p(dim, m);
  for (const auto& [v, w] : terms) {
    p.add(MultiIndex(dim, 0), w * c[0]);
    for (std::size_t t = 1; t <= m; ++t) {
      if (c[t] == 0.0) continue;
      MultiIndex j(dim, 0);
      j[v] = t;
      p.add(j, w * c[t]);
    }
  }
  return p;
}

// Floors used on each floor index by one fold; floor 0 is shared.
void add_fold_floors(std::vector<std::size_t>& per_floor, std::size_t k, bool sine) {
  const std::size_t s = ceil_log2(k);
  const std::size_t need = sine ? s + 2 : s + 1;
  if (per_floor.size() < need) per_floor.resize(need, 0);
  if (sine) {
    per_floor[1] += 4;
    for (std::size_t f = 2; f < s + 2; ++f) per_floor[f] += 4;
  } else {
    for (std::size_t f = 1; f < s + 1; ++f) per_floor[f] += 2;
  }
}

}  // namespace

CosineChainSpec cosine_chain_spec(std::size_t N) {
  if (N == 0) throw InvalidArgument("N must be positive");
  CosineChainSpec spec;
  const double goal = std::ldexp(1.0, -static_cast<int>(N + 2));
  const double pi = std::numbers::pi;
  std::size_t m = 1;
  auto interp = [&](std::size_t deg) {
    const double k = ud(deg + 1);
    return std::exp(k * std::log(pi) - std::lgamma(k + 1.0) - (2.0 * ud(deg) + 1.0) * std::numbers::ln2);
  };
  while (interp(m) > goal) ++m;
  spec.effective_degree = m;
  spec.interp_bound = interp(m);
  const ChebyshevResult cheb =
      chebyshev_interpolant_1d(TargetSpec::catalog("cosine", {pi}, 1, Domain::unit()), m);
  const std::size_t padded = std::max(N + 1, m);
  spec.coeffs.assign(padded + 1, 0.0);
  for (std::size_t t = 0; t <= m; ++t) spec.coeffs[t] = cheb.poly.coeff({t});
  double amax = 0.0;
  for (std::size_t t = 1; t <= m; ++t) amax = std::max(amax, std::abs(spec.coeffs[t]));
  const double scale = amax * 3.0 * ud(m) * ud(m);
  std::size_t H = 1;
  while (scale * std::ldexp(1.0, -2 * static_cast<int>(H + 1)) > goal) ++H;
  spec.H = H;
  spec.network_bound = scale * std::ldexp(1.0, -2 * static_cast<int>(H + 1));
  return spec;
}

BuildReport build_trig(std::size_t k, std::size_t N, TrigKind kind) {
  if (k == 0) throw InvalidArgument("k must be positive");
  const CosineChainSpec spec = cosine_chain_spec(N);
  const bool sine = kind == TrigKind::kSin;
  NetAssembler a(1);
  a.open_layer();
  const Affine x(a.input(0));
  const Affine pos(a.relu(0, x));
  const Affine neg(a.relu(0, -x));
  const auto vars = sine ? detail::fold_sin(a, pos, neg, k) : detail::fold_cos(a, pos, neg, k);
  std::vector<Affine> zs;
  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    zs.push_back(vars[v].z);
    terms.emplace_back(v, vars[v].sign);
  }
  const PolyND p = folded_poly(spec.coeffs, terms, vars.size());
  const std::size_t m = spec.coeffs.size() - 1;
  detail::PolyChain chain(zs, p, spec.H, detail::PolyChain::pure_powers(vars.size(), m));
  for (std::size_t s = 0; s < chain.steps(); ++s) {
    a.open_layer();
    chain.step(a, 0);
  }
  BuildReport r{a.finish({chain.result()})};
  std::vector<std::size_t> per_floor{2};
  add_fold_floors(per_floor, k, sine);
  const std::size_t fold_w = *std::max_element(per_floor.begin(), per_floor.end());
  const std::size_t fold_h = sine ? detail::fold_sin_height(k) : detail::fold_cos_height(k);
  r.expected = {.width = std::max(fold_w, chain.width()),
                .depth = 1 + chain.steps(),
                .height = std::max(fold_h, chain.height())};
  SizeParams sp{.N = N, .k = k};
  r.stated = expected_size("trig", sp);
  r.theoretical_bound = expected_bound("trig", sp);
  r.bound_formula_id = sine ? "trig-sin" : "trig-cos";
  r.domain = Domain::symmetric();
  r.inputs = {{"k", ud(k)}, {"N", ud(N)}};
  r.diagnostics = {{"effective_degree", ud(spec.effective_degree)},
                   {"H", ud(spec.H)},
                   {"interp_bound", spec.interp_bound},
                   {"network_bound", spec.network_bound}};
  check_metrics(r);
  return r;
}

BuildReport build_lp(const TargetSpec& target, std::size_t N1, std::size_t N2, std::size_t r,
                     std::size_t d, const LpBuildOptions& opt) {
  if (d == 0 || target.dim() != d) throw InvalidArgument("target dimension mismatch");
  if (r == 0 || N1 < r) throw InvalidArgument("need N1 >= r >= 1");
  const TrigOperatorCoeffs tc = trig_operator_full(target, N1, r, opt.nodes);
  const CosineChainSpec spec = cosine_chain_spec(N2);
  const std::size_t m = spec.coeffs.size() - 1;

  // factor = (coordinate, frequency, parity)
  using Factor = std::tuple<std::size_t, std::size_t, int>;
  std::map<std::vector<Factor>, double> terms;
  for (const auto& comp : tc.components) {
    for (const auto& [j, coef] : comp.a) {
      std::vector<Factor> fs;
      bool vanishes = false;
      for (std::size_t k = 0; k < d; ++k) {
        if (j[k] == 0) {
          if (comp.parity[k] == 1) vanishes = true;
          continue;
        }
        fs.emplace_back(k, j[k], comp.parity[k]);
      }
      if (!vanishes) terms[fs] += coef;
    }
  }
  double cmax = 0.0;
  for (const auto& [fs, c] : terms) cmax = std::max(cmax, std::abs(c));
  double constant = 0.0;
  std::vector<std::pair<Factor, double>> linear;
  std::vector<std::pair<std::vector<Factor>, double>> products;
  for (const auto& [fs, c] : terms) {
    if (!(std::abs(c) > opt.prune * cmax)) continue;
    if (fs.empty()) {
      constant += c;
    } else if (fs.size() == 1) {
      linear.emplace_back(fs[0], c);
    } else {
      products.emplace_back(fs, c);
    }
  }
  std::map<Factor, std::size_t> prod_index;
  for (const auto& [fs, c] : products)
    for (const auto& f : fs) prod_index.emplace(f, 0);
  {
    std::size_t i = 0;
    for (auto& [f, idx] : prod_index) idx = i++;
  }

  // width estimate before emitting anything
  std::vector<std::size_t> per_floor{0};
  std::set<std::size_t> coords;
  std::size_t nvars = 0;
  auto count_fold = [&](const Factor& f) {
    coords.insert(std::get<0>(f));
    const bool sine = std::get<2>(f) == 1;
    add_fold_floors(per_floor, std::get<1>(f), sine);
    nvars += sine ? 2 : 1;
  };
  for (const auto& [f, c] : linear) count_fold(f);
  for (const auto& [f, idx] : prod_index) count_fold(f);
  per_floor[0] = 2 * coords.size();
  const std::size_t chains = (linear.empty() ? 0 : 1) + prod_index.size();
  const std::size_t poly_w =
      detail::product_unit_neurons(spec.H) * nvars + nvars + chains;
  std::size_t max_q = 0;
  for (const auto& [fs, c] : products) max_q = std::max(max_q, fs.size());
  const std::size_t prod_layers = max_q >= 2 ? max_q - 1 : 0;
  std::size_t prod_w = 0;
  for (std::size_t s = 0; s < prod_layers; ++s) {
    std::size_t w = linear.empty() ? 0 : 1;
    for (const auto& [fs, c] : products) {
      const std::size_t q = fs.size();
      w += s + 1 < q ? 6 + (q - 2 - s) : 1;
    }
    prod_w = std::max(prod_w, w);
  }
  const std::size_t fold_w = *std::max_element(per_floor.begin(), per_floor.end());
  const std::size_t est_w = std::max({fold_w, poly_w, prod_w});
  if (est_w > opt.max_width) {
    throw InvalidArgument("L^p net needs width " + std::to_string(est_w) + " above the cap " +
                          std::to_string(opt.max_width));
  }

  NetAssembler a(d);
  BuildReport rep{Net3D(d, {}, {Readout{}})};
  std::size_t fold_h = 0;
  if (nvars == 0) {
    rep.net = a.finish({Affine(constant)});
    rep.expected = {};
  } else {
    a.open_layer();
    std::map<std::size_t, std::pair<Affine, Affine>> pm;
    for (std::size_t k : coords) {
      const Affine x(a.input(k));
      pm.emplace(k, std::make_pair(Affine(a.relu(0, x)), Affine(a.relu(0, -x))));
    }
    auto fold = [&](const Factor& f) {
      const auto& [k, freq, par] = f;
      const auto& [pos, neg] = pm.at(k);
      fold_h = std::max(fold_h, par == 1 ? detail::fold_sin_height(freq)
                                         : detail::fold_cos_height(freq));
      return par == 1 ? detail::fold_sin(a, pos, neg, freq) : detail::fold_cos(a, pos, neg, freq);
    };
    std::vector<detail::PolyChain> lin_chain;
    if (!linear.empty()) {
      std::vector<Affine> zs;
      std::vector<std::vector<std::pair<std::size_t, double>>> groups;
      for (const auto& [f, c] : linear) {
        std::vector<std::pair<std::size_t, double>> g;
        for (const auto& v : fold(f)) {
          g.emplace_back(zs.size(), c * v.sign);
          zs.push_back(v.z);
        }
        groups.push_back(std::move(g));
      }
      std::vector<std::pair<std::size_t, double>> all;
      for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
      const PolyND p = folded_poly(spec.coeffs, all, zs.size());
      lin_chain.emplace_back(zs, p, spec.H, detail::PolyChain::pure_powers(zs.size(), m));
    }
    std::vector<detail::PolyChain> fac_chain;
    for (const auto& [f, idx] : prod_index) {
      std::vector<Affine> zs;
      std::vector<std::pair<std::size_t, double>> g;
      for (const auto& v : fold(f)) {
        g.emplace_back(zs.size(), v.sign);
        zs.push_back(v.z);
      }
      const PolyND p = folded_poly(spec.coeffs, g, zs.size());
      fac_chain.emplace_back(zs, p, spec.H, detail::PolyChain::pure_powers(zs.size(), m));
    }
    for (std::size_t s = 0; s + 1 < m; ++s) {
      a.open_layer();
      for (auto& ch : lin_chain) ch.step(a, 0);
      for (auto& ch : fac_chain) ch.step(a, 0);
    }
    Affine shared = lin_chain.empty() ? Affine(0.0) : lin_chain[0].result();
    double shared_bound = 1.0;
    for (const auto& [f, c] : linear) shared_bound += 2.0 * std::abs(c);
    std::vector<gadgets::ProductTree> trees;
    std::vector<double> weights;
    std::vector<Affine> finished;
    for (const auto& [fs, c] : products) {
      std::vector<Affine> factors;
      for (const auto& f : fs) factors.push_back(fac_chain[prod_index.at(f)].result());
      trees.emplace_back(std::move(factors), N1, 2.0);
      weights.push_back(c);
      finished.emplace_back();
    }
    for (std::size_t s = 0; s < prod_layers; ++s) {
      a.open_layer();
      if (!linear.empty()) shared = a.carry_bounded(0, shared, shared_bound);
      for (std::size_t i = 0; i < trees.size(); ++i) {
        if (trees[i].steps_done() < trees[i].steps()) {
          trees[i].step(a, 0);
          if (trees[i].steps_done() == trees[i].steps()) finished[i] = trees[i].result();
        } else {
          const double bound = std::ldexp(1.0, static_cast<int>(products[i].first.size()) + 1);
          finished[i] = a.carry_bounded(0, finished[i], bound);
        }
      }
    }
    Affine out = Affine(constant) + shared;
    for (std::size_t i = 0; i < trees.size(); ++i) out += weights[i] * finished[i];
    rep.net = a.finish({out});
    const std::size_t poly_h = std::max<std::size_t>(spec.H, 1);
    rep.expected = {.width = est_w,
                    .depth = m + prod_layers,
                    .height = std::max({fold_h, poly_h, prod_layers > 0 ? N1 + 1 : 0})};
  }

  // sup bound on |Phi - T_n f| from the trig nets and the product gadgets
  const double eps2 = std::ldexp(1.0, -static_cast<int>(N2));
  const double eps_prod = 6.0 * std::ldexp(1.0, -2 * static_cast<int>(N1 + 1));
  double net_bound = 0.0, abs_sum = 0.0;
  for (const auto& [f, c] : linear) {
    net_bound += std::abs(c) * eps2;
    abs_sum += std::abs(c);
  }
  for (const auto& [fs, c] : products) {
    const double q = ud(fs.size());
    net_bound += std::abs(c) * (q * eps2 * std::pow(1.0 + eps2, q - 1.0) +
                                (q - 1.0) * eps_prod * std::pow(2.0, q));
    abs_sum += std::abs(c);
  }
  SizeParams sp{.d = d, .N1 = N1, .N2 = N2};
  rep.stated = expected_size("lp", sp);
  rep.theoretical_bound = net_bound;
  rep.fitted_constant = true;
  rep.bound_formula_id = "lp";
  rep.norm = NormKind::kLp;
  rep.dim = d;
  rep.domain = Domain::symmetric();
  rep.inputs = {{"N1", ud(N1)}, {"N2", ud(N2)}, {"r", ud(r)}, {"d", ud(d)}};
  rep.diagnostics = {{"network_sup_bound", net_bound},
                     {"coeff_abs_sum", abs_sum},
                     {"coeff_ratio", tc.coeff_ratio},
                     {"C_r_estimate", std::pow(tc.coeff_ratio, 1.0 / ud(d))},
                     {"alpha_ratio", tc.alpha_ratio},
                     {"f_l1", tc.f_l1},
                     {"constant_term", constant},
                     {"linear_terms", ud(linear.size())},
                     {"product_terms", ud(products.size())},
                     {"product_layers", ud(prod_layers)}};
  check_metrics(rep);
  return rep;
}

}  // namespace relu3d
