#include <algorithm>
#include <cmath>
#include <numbers>

#include "relu3d/errors.hpp"
#include "relu3d/modulus.hpp"
#include "relu3d/numerics.hpp"
#include "relu3d/verify.hpp"

namespace relu3d {

namespace {

// Calls visit(point) for every point of the tensor grid axes[0] x ... x axes[d-1].
template <class Visit>
void for_each_tensor(const std::vector<std::vector<double>>& axes, Visit&& visit) {
  const std::size_t d = axes.size();
  for (const auto& a : axes)
    if (a.empty()) return;
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  while (true) {
    for (std::size_t k = 0; k < d; ++k) x[k] = axes[k][idx[k]];
    visit(x, idx);
    std::size_t k = 0;
    while (k < d && ++idx[k] == axes[k].size()) idx[k++] = 0;
    if (k == d) return;
  }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = 0.5 * (lo + hi);
    return g;
  }
  for (std::size_t i = 0; i < n; ++i)
    g[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

struct Scan {
  double max = 0.0;
  std::vector<double> argmax;
  std::size_t points = 0;
};

void scan_grid(const Net3D& net, const ScalarField& f, const std::vector<std::vector<double>>& axes,
               bool extended, Scan& s) {
  std::vector<std::vector<double>> pts;
  for_each_tensor(axes, [&](const std::vector<double>& x, const auto&) { pts.push_back(x); });
  const std::vector<double> vals = evaluate_points(net, pts, extended);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = std::abs(f(pts[i]) - vals[i]);
    if (!(e <= s.max)) {
      s.max = e;
      s.argmax = pts[i];
    }
  }
  s.points += pts.size();
}

QuadratureRule axis_rule(double lo, double hi, std::size_t nodes, std::size_t order) {
  const std::size_t panels = std::max<std::size_t>(1, (nodes + order - 1) / order);
  return composite_gauss_legendre(lo, hi, panels, order);
}

std::size_t default_lp_nodes(std::size_t d) { return d == 1 ? 2048 : d == 2 ? 256 : 64; }

}  // namespace

bool within_bound(double measured, double bound) {
  return measured <= bound * (1.0 + kBoundSlack);
}

void set_bound(ErrorReport& r, double bound) {
  r.bound = bound;
  r.pass = within_bound(r.measured, bound);
}

bool check_bound(const ErrorReport& r) { return within_bound(r.measured, r.bound); }

Box Box::cube(std::size_t d, double lo, double hi) {
  return {std::vector<double>(d, lo), std::vector<double>(d, hi)};
}

Box Box::from_domain(const Domain& dom, std::size_t d) {
  if (!dom.bounded()) throw InvalidArgument("domain is unbounded");
  return cube(d, dom.lo, dom.hi);
}

std::vector<double> evaluate_points(const Net3D& net, const std::vector<std::vector<double>>& pts,
                                    bool extended) {
  if (!extended) return evaluate_batch(net, pts);
  std::vector<double> out;
  out.reserve(pts.size());
  std::vector<Quad> xq(net.input_dim());
  for (const auto& p : pts) {
    for (std::size_t k = 0; k < p.size(); ++k) xq[k] = p[k];
    const std::vector<Quad> v = evaluate_as<Quad>(net, std::span<const Quad>(xq));
    if (v.size() != 1) throw InvalidArgument("expected a single-output network");
    out.push_back(static_cast<double>(v[0]));
  }
  return out;
}

std::size_t default_sup_points(std::size_t height, std::size_t d, const SupOptions& opt) {
  const std::size_t cap = d == 1 ? opt.max_points_1d : opt.max_points_per_dim;
  std::size_t n = height + 4 >= 62 ? cap : (std::size_t{1} << (height + 4)) + 1;
  n = std::min(n, cap);
  while (d > 1 && std::pow(static_cast<double>(n), static_cast<double>(d)) >
                      static_cast<double>(opt.max_points) && n > 2)
    n = (n - 1) / 2 + 1;
  return n;
}

ErrorReport sup_error(const Net3D& net, const ScalarField& f, const Box& box,
                      const SupOptions& opt) {
  const std::size_t d = box.dim();
  if (d != net.input_dim()) throw InvalidArgument("box dimension does not match the network");
  const std::size_t n =
      opt.points_per_dim ? opt.points_per_dim : default_sup_points(metrics(net).height, d, opt);
  std::vector<std::vector<double>> axes;
  std::vector<double> step(d);
  for (std::size_t k = 0; k < d; ++k) {
    axes.push_back(linspace(box.lo[k], box.hi[k], n));
    step[k] = n > 1 ? (box.hi[k] - box.lo[k]) / static_cast<double>(n - 1) : 0.0;
  }
  Scan s;
  scan_grid(net, f, axes, opt.extended, s);
  if (opt.refine_halvings > 0 && !s.argmax.empty()) {
    const std::size_t per_side = std::size_t{1} << opt.refine_halvings;
    std::vector<std::vector<double>> local;
    for (std::size_t k = 0; k < d; ++k) {
      const double lo = std::max(box.lo[k], s.argmax[k] - step[k]);
      const double hi = std::min(box.hi[k], s.argmax[k] + step[k]);
      local.push_back(linspace(lo, hi, 2 * per_side + 1));
    }
    scan_grid(net, f, local, opt.extended, s);
  }
  ErrorReport r;
  r.norm = NormKind::kSup;
  r.measured = s.max;
  r.argmax = s.argmax;
  r.points = s.points;
  r.resolution = "grid " + std::to_string(n) + "^" + std::to_string(d) + " + local refinement x" +
                 std::to_string(std::size_t{1} << opt.refine_halvings);
  r.pass = true;
  return r;
}

ErrorReport lp_error(const Net3D& net, const ScalarField& f, double p, const Box& box,
                     const LpOptions& opt) {
  if (std::isinf(p)) return sup_error(net, f, box, opt.sup);
  const double ps[] = {p};
  return lp_errors(net, f, ps, box, opt).front();
}

std::vector<ErrorReport> lp_errors(const Net3D& net, const ScalarField& f, std::span<const double> ps,
                                   const Box& box, const LpOptions& opt) {
  for (double p : ps)
    if (!(p >= 1.0) || std::isinf(p)) throw InvalidArgument("p must be finite and at least 1");
  const std::size_t d = box.dim();
  if (d != net.input_dim()) throw InvalidArgument("box dimension does not match the network");
  const std::size_t nodes = opt.nodes_per_dim ? opt.nodes_per_dim : default_lp_nodes(d);
  std::vector<QuadratureRule> rules;
  std::vector<std::vector<double>> axes;
  for (std::size_t k = 0; k < d; ++k) {
    rules.push_back(axis_rule(box.lo[k], box.hi[k], nodes, opt.order));
    axes.push_back(rules.back().nodes);
  }
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  for_each_tensor(axes, [&](const std::vector<double>& x, const std::vector<std::size_t>& idx) {
    double wt = 1.0;
    for (std::size_t k = 0; k < d; ++k) wt *= rules[k].weights[idx[k]];
    pts.push_back(x);
    w.push_back(wt);
  });
  const std::vector<double> vals = evaluate_points(net, pts, opt.extended);
  std::vector<double> diff(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) diff[i] = std::abs(f(pts[i]) - vals[i]);
  std::vector<ErrorReport> out;
  for (double p : ps) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < pts.size(); ++i) sum += w[i] * std::pow(diff[i], p);
    ErrorReport r;
    r.norm = NormKind::kLp;
    r.p = p;
    r.measured = std::pow(std::max(0.0, sum.value()), 1.0 / p);
    r.points = pts.size();
    r.resolution = "Gauss-Legendre " + std::to_string(axes[0].size()) + "^" + std::to_string(d) +
                   " (order " + std::to_string(opt.order) + " panels)";
    r.pass = true;
    out.push_back(std::move(r));
  }
  return out;
}

double lp_norm(const ScalarField& f, double p, const Box& box, std::size_t nodes_per_dim) {
  const std::size_t d = box.dim();
  const std::size_t nodes = nodes_per_dim ? nodes_per_dim : default_lp_nodes(d);
  std::vector<QuadratureRule> rules;
  std::vector<std::vector<double>> axes;
  for (std::size_t k = 0; k < d; ++k) {
    rules.push_back(axis_rule(box.lo[k], box.hi[k], nodes, 8));
    axes.push_back(rules.back().nodes);
  }
  CompensatedSum sum;
  double mx = 0.0;
  for_each_tensor(axes, [&](const std::vector<double>& x, const std::vector<std::size_t>& idx) {
    const double v = std::abs(f(x));
    mx = std::max(mx, v);
    if (std::isinf(p)) return;
    double wt = 1.0;
    for (std::size_t k = 0; k < d; ++k) wt *= rules[k].weights[idx[k]];
    sum += wt * std::pow(v, p);
  });
  return std::isinf(p) ? mx : std::pow(sum.value(), 1.0 / p);
}

ErrorReport gauss_l2_error(const Net3D& net, const TargetSpec& target, double M,
                           const GaussOptions& opt) {
  const std::size_t d = net.input_dim();
  if (target.dim() != d) throw InvalidArgument("target dimension does not match the network");
  if (!(M > 0.0)) throw InvalidArgument("support half-width must be positive");
  const double L = M + opt.margin;
  const auto tail_sq = target.gauss_tail_sq(L);
  if (!tail_sq) {
    throw InvalidArgument("target " + target.describe() +
                          " has no closed-form Gaussian tail; cannot bound the error outside the box");
  }
  // the network must vanish outside [-M, M]^d
  {
    std::vector<std::vector<double>> probes;
    for (double off : {0.25, 1.0, opt.margin}) {
      for (double sgn : {-1.0, 1.0}) {
        for (std::size_t k = 0; k < d; ++k) {
          std::vector<double> x(d, 0.0);
          x[k] = sgn * (M + off);
          probes.push_back(x);
        }
      }
    }
    const auto v = evaluate_points(net, probes, opt.extended);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > 1e-9) {
        throw InvalidArgument("network is nonzero outside [-M, M]^d (value " +
                              std::to_string(v[i]) + "); clip it with a window first");
      }
    }
  }
  const double width = opt.panel_width > 0.0 ? opt.panel_width : (d == 1 ? 0.25 : 1.0);
  const auto panels = static_cast<std::size_t>(std::ceil(2.0 * L / width));
  const QuadratureRule rule = composite_gauss_legendre(-L, L, panels, opt.order);
  std::vector<double> dens(rule.nodes.size());
  for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = rule.weights[i] * normal_pdf(rule.nodes[i]);
  std::vector<std::vector<double>> axes(d, rule.nodes);
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  for_each_tensor(axes, [&](const std::vector<double>& x, const std::vector<std::size_t>& idx) {
    double wt = 1.0;
    for (std::size_t k = 0; k < d; ++k) wt *= dens[idx[k]];
    pts.push_back(x);
    w.push_back(wt);
  });
  const std::vector<double> vals = evaluate_points(net, pts, opt.extended);
  CompensatedSum sum;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = target(pts[i]) - vals[i];
    sum += w[i] * e * e;
  }
  ErrorReport r;
  r.norm = NormKind::kGaussL2;
  r.p = 2.0;
  r.measured = std::sqrt(std::max(0.0, sum.value() + *tail_sq));
  r.points = pts.size();
  r.resolution = "Gauss-Legendre on [-" + std::to_string(L) + ", " + std::to_string(L) + "]^" +
                 std::to_string(d) + ", " + std::to_string(rule.nodes.size()) +
                 " nodes per axis, plus closed-form tail";
  r.pass = true;
  return r;
}

ErrorReport measure(const BuildReport& rep, const BuildRequest& req, const MeasureOptions& opt) {
  const ScalarField f = reference_field(req);
  ErrorReport e;
  switch (rep.norm) {
    case NormKind::kSup: {
      SupOptions so = opt.sup;
      so.extended = so.extended || rep.extended_precision;
      if (so.points_per_dim == 0)
        so.points_per_dim = default_sup_points(rep.expected.height, rep.dim, so);
      e = sup_error(rep.net, f, Box::from_domain(rep.domain, rep.dim), so);
      break;
    }
    case NormKind::kLp: {
      LpOptions lo = opt.lp;
      lo.extended = lo.extended || rep.extended_precision;
      e = lp_error(rep.net, f, opt.p, Box::from_domain(rep.domain, rep.dim), lo);
      break;
    }
    case NormKind::kGaussL2: {
      const TargetSpec target = req.target ? *req.target : default_target(req);
      GaussOptions go = opt.gauss;
      go.extended = go.extended || rep.extended_precision;
      e = gauss_l2_error(rep.net, target, rep.diagnostic("support"), go);
      break;
    }
  }
  double bound = rep.theoretical_bound;
  if (rep.bound_formula_id == "lp") {
    // rate with unit constants: r^d omega_r(f, 1/N1)_p + (3d/2) ||f||_p (4 C_r N1)^d 2^-N2
    const TargetSpec target = req.target ? *req.target : default_target(req);
    const Box box = Box::from_domain(rep.domain, rep.dim);
    SizeParams sp;
    sp.d = rep.dim;
    sp.r = static_cast<std::size_t>(rep.input("r"));
    sp.N1 = static_cast<std::size_t>(rep.input("N1"));
    sp.N2 = static_cast<std::size_t>(rep.input("N2"));
    sp.omega = modulus_smoothness(target, sp.r, 1.0 / static_cast<double>(sp.N1),
                                  std::isinf(opt.p) ? kSupNorm : opt.p, sp.d);
    sp.f_norm = lp_norm(f, opt.p, box, opt.lp.nodes_per_dim);
    sp.C_r = rep.diagnostic("C_r_estimate");
    bound = expected_bound("lp", sp);
  }
  set_bound(e, bound);
  if (rep.fitted_constant) e.fitted_constant = bound > 0.0 ? e.measured / bound : 0.0;
  return e;
}

}  // namespace relu3d
