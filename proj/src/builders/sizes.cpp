#include <cmath>
#include <string>

#include "relu3d/blocks.hpp"
#include "relu3d/builders.hpp"
#include "relu3d/errors.hpp"

namespace relu3d {

namespace {

std::size_t ceil_nonneg(double v) {
  if (!(v > 0.0)) return 0;
  return static_cast<std::size_t>(std::ceil(v - 1e-12));
}

double lookup(const std::vector<std::pair<std::string, double>>& kv, const std::string& key) {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  throw InvalidArgument("no entry named '" + key + "'");
}

double ud(std::size_t v) { return static_cast<double>(v); }

// max{N+1+ceil(log2(N+1) + log2(3)/2), ceil(log2 k)}
std::size_t trig_height(std::size_t N, std::size_t k) {
  const double n1 = ud(N + 1);
  const std::size_t h = N + 1 + ceil_nonneg(std::log2(n1) + 0.5 * std::log2(3.0));
  return std::max(h, ceil_log2(k));
}

}  // namespace

double BuildReport::input(const std::string& key) const { return lookup(inputs, key); }
double BuildReport::diagnostic(const std::string& key) const { return lookup(diagnostics, key); }

void check_metrics(const BuildReport& r) {
  const SizeMetrics m = metrics(r.net);
  if (m.depth != r.expected.depth || m.height != r.expected.height || m.width > r.expected.width) {
    throw InvalidArgument("built network has (W,K,H) = (" + std::to_string(m.width) + "," +
                          std::to_string(m.depth) + "," + std::to_string(m.height) +
                          "), expected (" + std::to_string(r.expected.width) + "," +
                          std::to_string(r.expected.depth) + "," +
                          std::to_string(r.expected.height) + ")");
  }
}

SizeMetrics expected_size(const std::string& id, const SizeParams& p) {
  SizeMetrics m;
  const double d = ud(p.d);
  if (id == "poly") {
    m.width = 8;
    m.depth = p.n >= 1 ? p.n - 1 : 0;
    m.height = p.H;
  } else if (id == "polyNd") {
    m.width = ceil_nonneg(d + 1.0 + 6.0 * std::pow(std::exp(1.0) * ud(p.n + p.d) / d, d));
    m.depth = p.n >= 1 ? p.n - 1 : 0;
    m.height = p.H;
  } else if (id == "smooth") {
    m.width = 8;
    m.depth = p.N;
    m.height = ceil_nonneg(smooth_height_printed(p.N));
  } else if (id == "analytic-cube") {
    m.width = ceil_nonneg(d + 1.0 + 6.0 * std::pow(std::exp(1.0) * ud(p.N + p.d) / d, d));
    m.depth = p.N >= 1 ? p.N - 1 : 0;
    m.height = ceil_nonneg(cube_height_printed(p.N, p.delta, p.d));
  } else if (id == "ellipse") {
    m.width = ceil_nonneg(d + 1.0 + 6.0 * std::pow(std::exp(1.0) * ud(p.N + p.d) / d, d));
    m.depth = p.N >= 1 ? p.N - 1 : 0;
    m.height = ellipse_height(p.N, p.rho, p.d);
  } else if (id == "hermite") {
    const double N = ud(p.N);
    m.width = static_cast<std::size_t>(
        std::max(8.0 * N * d, std::pow(N, d) * (4.0 + d)));
    m.depth = p.N + p.d - 1;
    const double M = std::sqrt(2.0 * N * std::log(6.0 * N) + 4.0 * p.B * std::sqrt(N));
    const double h = 0.5 * d * N * std::log2(1.0 + 6.0 * M) + std::log2(5.0 * N / 4.0) +
                     0.5 * p.B * std::log2(std::exp(1.0)) * std::sqrt(N);
    m.height = ceil_nonneg(h);
  } else if (id == "trig") {
    m.width = 8;
    m.depth = p.N + 1;
    m.height = trig_height(p.N, p.k);
  } else if (id == "lp") {
    m.width = static_cast<std::size_t>(std::pow(2.0 * ud(p.N1), d) * (4.0 + d));
    m.depth = p.N2 + p.d;
    m.height = trig_height(p.N2, p.N1);
  } else {
    throw InvalidArgument("unknown theorem id '" + id + "'");
  }
  return m;
}

double expected_bound(const std::string& id, const SizeParams& p) {
  const double d = ud(p.d);
  const double eps = std::ldexp(1.0, -2 * static_cast<int>(p.H + 1));
  if (id == "poly") return p.amax * 3.0 * ud(p.n) * ud(p.n) * eps;
  if (id == "polyNd")
    return p.amax * 6.0 * ud(p.n) * eps * std::pow(std::exp(1.0) * ud(p.n + p.d) / d, d);
  if (id == "smooth" || id == "trig") return std::ldexp(1.0, -static_cast<int>(p.N));
  if (id == "analytic-cube") return 2.0 * std::pow(1.0 - p.delta, ud(p.N));
  if (id == "ellipse") return std::pow(p.rho, -ud(p.N) / std::sqrt(d));
  if (id == "hermite") return std::exp(-p.B * std::sqrt(ud(p.N)));
  if (id == "lp") {
    return std::pow(ud(p.r), d) * p.B_r * p.omega +
           1.5 * d * p.f_norm * std::pow(4.0 * p.C_r * ud(p.N1), d) *
               std::ldexp(1.0, -static_cast<int>(p.N2));
  }
  throw InvalidArgument("unknown theorem id '" + id + "'");
}

BaselineSize table1_baseline(const std::string& row, const SizeParams& p) {
  const double N = ud(p.N);
  const double d = ud(p.d);
  BaselineSize b;
  b.row = row;
  if (row == "polynomial") {
    b.width = 1.0;
    b.depth = N;
  } else if (row == "analytic-cube") {
    b.width = 1.0;
    b.depth = std::pow(N, 2.0 * d);
  } else if (row == "ellipse") {
    b.width = std::pow(N, d + 2.0);
    b.depth = N * N;
  } else if (row == "hermite") {
    const double l = std::log2(std::max(N, 2.0));
    b.width = 0.0;
    b.depth = N * l * l;
  } else {
    throw InvalidArgument("unknown table row '" + row + "'");
  }
  return b;
}

}  // namespace relu3d
