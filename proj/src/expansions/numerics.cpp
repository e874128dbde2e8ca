#include "relu3d/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "relu3d/errors.hpp"

namespace relu3d {

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

double compensated_sum(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value();
}

namespace {

// Golub-Welsch for a symmetric Jacobi matrix with zero diagonal.
QuadratureRule golub_welsch(std::size_t n, const std::function<double(std::size_t)>& offdiag,
                            double mass) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = offdiag(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    q.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    q.weights[i] = mass * v * v;
  }
  // symmetrize to remove eigen-solver noise
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t k = n - 1 - i;
    const double x = 0.5 * (q.nodes[k] - q.nodes[i]);
    const double w = 0.5 * (q.weights[i] + q.weights[k]);
    q.nodes[i] = -x;
    q.nodes[k] = x;
    q.weights[i] = q.weights[k] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return q;
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw InvalidArgument("gauss_legendre: n must be positive");
  return golub_welsch(
      n, [](std::size_t k) { return double(k) / std::sqrt(4.0 * double(k) * double(k) - 1.0); },
      2.0);
}

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels,
                                        std::size_t order) {
  if (panels == 0) throw InvalidArgument("composite_gauss_legendre: no panels");
  const QuadratureRule base = gauss_legendre(order);
  QuadratureRule q;
  const double h = (b - a) / double(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (double(p) + 0.5) * h;
    for (std::size_t i = 0; i < order; ++i) {
      q.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
      q.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return q;
}

QuadratureRule gauss_hermite(std::size_t n) {
  if (n == 0) throw InvalidArgument("gauss_hermite: n must be positive");
  return golub_welsch(n, [](std::size_t k) { return std::sqrt(double(k)); }, 1.0);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_mass_inside(double M) { return std::erf(M / std::numbers::sqrt2); }

double integrate(const std::function<double(double)>& f, const QuadratureRule& rule) {
  CompensatedSum s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s.add(rule.weights[i] * f(rule.nodes[i]));
  return s.value();
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line: need two or more points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace relu3d
