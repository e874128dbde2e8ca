#include "relu3d/jackson.hpp"

#include <cmath>
#include <numbers>

#include "relu3d/errors.hpp"
#include "relu3d/numerics.hpp"

namespace relu3d {

std::vector<double> fejer_coeffs(std::size_t m) {
  if (m == 0) throw InvalidArgument("fejer_coeffs: m must be positive");
  std::vector<double> c(2 * m - 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double k = std::abs(double(i) - double(m - 1));
    c[i] = 1.0 - k / double(m);
  }
  return c;
}

double KernelCoeffs::operator()(double t) const {
  CompensatedSum s;
  s.add(a[0]);
  for (std::size_t k = 1; k < a.size(); ++k) s.add(a[k] * std::cos(double(k) * t));
  return s.value();
}

KernelCoeffs jackson_kernel(std::size_t n, std::size_t r) {
  if (r == 0) throw InvalidArgument("jackson_kernel: r must be positive");
  if (r > n) throw InvalidArgument("jackson_kernel: r must not exceed n");
  KernelCoeffs K;
  K.n = n;
  K.r = r;
  K.m = n / r + 1;
  const std::size_t m = K.m;
  // (sin(mt/2)/sin(t/2))^2 = m * sum (1 - |k|/m) e^{ikt}
  std::vector<double> base = fejer_coeffs(m);
  for (double& v : base) v *= double(m);
  std::vector<double> power{1.0};
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<double> next(power.size() + base.size() - 1, 0.0);
    for (std::size_t p = 0; p < power.size(); ++p)
      for (std::size_t q = 0; q < base.size(); ++q) next[p + q] += power[p] * base[q];
    power = std::move(next);
  }
  // exponential coefficients indexed -r(m-1)..r(m-1); fold into cosine form
  const std::size_t centre = r * (m - 1);
  K.a_tilde.assign(n + 1, 0.0);
  for (std::size_t k = 0; k <= centre; ++k)
    K.a_tilde[k] = k == 0 ? power[centre] : power[centre + k] + power[centre - k];
  double total = 0.0;
  for (double v : K.a_tilde) total += v;
  const double expect = std::pow(double(m), 2.0 * double(r));
  if (std::abs(total - expect) > 1e-9 * expect)
    throw NumericError("jackson_kernel: coefficient sum differs from F_m(0)^r");
  K.gamma = 1.0 / (2.0 * std::numbers::pi * K.a_tilde[0]);
  K.a.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) K.a[k] = K.gamma * K.a_tilde[k];
  return K;
}

double kernel_moments(const KernelCoeffs& K, std::size_t k) {
  if (k + 2 > 2 * K.r) throw InvalidArgument("kernel_moments: k must be at most 2r - 2");
  if (k == 0) return 2.0 * std::numbers::pi * K.a[0];
  // symmetric integrand; panels resolve oscillations up to frequency n
  const std::size_t panels = std::max<std::size_t>(64, 4 * K.n);
  const QuadratureRule rule = composite_gauss_legendre(0.0, std::numbers::pi, panels, 12);
  return 2.0 * integrate([&](double t) { return std::pow(t, double(k)) * K(t); }, rule);
}

}  // namespace relu3d
