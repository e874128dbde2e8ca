#pragma once

// Reference implementations written directly from the defining formulas,
// independent of the network code under test.

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
T tent(const T& x) {
  // 1 - 2|x - 1/2|
  T d = x - T(1) / 2;
  if (d < 0) d = -d;
  return T(1) - 2 * d;
}

template <class T>
T sawtooth(std::size_t s, T x) {
  for (std::size_t i = 0; i < s; ++i) x = tent(x);
  return x;
}

// Piecewise linear interpolant of t^2 on the grid of step 2^-H over [0,1].
inline double square_interp(std::size_t H, double t) {
  const double h = std::ldexp(1.0, -static_cast<int>(H));
  double l = std::floor(t / h);
  if (l * h >= 1.0) l -= 1.0;
  const double a = l * h, b = a + h;
  return a * a + (t - a) * (b * b - a * a) / h;
}

inline double product_interp(std::size_t H, double x, double y) {
  return 2 * square_interp(H, (x + y) / 2) - 2 * square_interp(H, x / 2) -
         2 * square_interp(H, y / 2);
}

inline std::vector<double> grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * double(i) / double(n - 1);
  return g;
}

// Orthonormal probabilists' Hermite polynomial from the explicit sum
// n! sum_m (-1)^m x^(n-2m) / (m! (n-2m)! 2^m), divided by sqrt(n!).
inline double hermite_explicit(unsigned n, double x) {
  double s = 0.0;
  for (unsigned m = 0; 2 * m <= n; ++m)
    s += (m % 2 ? -1.0 : 1.0) * std::pow(x, double(n - 2 * m)) /
         (std::tgamma(m + 1.0) * std::tgamma(n - 2.0 * m + 1.0) * std::ldexp(1.0, int(m)));
  return s * std::sqrt(std::tgamma(n + 1.0));
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// Composite Simpson rule with n (even) intervals.
template <class F>
double simpson(F f, double a, double b, std::size_t n) {
  const double h = (b - a) / double(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * double(i));
  return s * h / 3.0;
}

// Coefficient of determination of the least-squares line through (x, y).
inline double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy * sxy / (sxx * syy);
}

inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace oracle
