#include "relu3d/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "relu3d/errors.hpp"
#include "relu3d/numerics.hpp"

namespace relu3d {

namespace {

constexpr double kConditioningLimit = 1e12;

std::vector<double> cheb_points(std::size_t m) {
  std::vector<double> x(m + 1);
  for (std::size_t i = 0; i <= m; ++i)
    x[i] = 0.5 * (1.0 + std::cos((2.0 * double(i) + 1.0) * std::numbers::pi / (2.0 * double(m + 1))));
  return x;
}

// Row k: weights turning samples at cheb_points into coefficient c_k.
std::vector<std::vector<long double>> analysis_matrix(std::size_t m) {
  std::vector<std::vector<long double>> A(m + 1, std::vector<long double>(m + 1));
  const long double pi = 3.141592653589793238462643383279502884L;
  for (std::size_t k = 0; k <= m; ++k)
    for (std::size_t i = 0; i <= m; ++i) {
      // reduce k(2i+1) mod 4(m+1) so the cosine argument stays small
      const std::size_t q = (k * (2 * i + 1)) % (4 * (m + 1));
      A[k][i] = (k == 0 ? 1.0L : 2.0L) / (long double)(m + 1) *
                std::cos((long double)q * pi / (2.0L * (long double)(m + 1)));
    }
  return A;
}

double conditioning_of(const std::vector<std::vector<double>>& T) {
  double c = 1.0;
  for (const auto& row : T) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    c = std::max(c, s);
  }
  return c;
}

}  // namespace

std::vector<std::vector<double>> shifted_chebyshev_monomials(std::size_t m) {
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(m + 1, 0.0));
  T[0][0] = 1.0;
  if (m >= 1) {
    T[1][0] = -1.0;
    T[1][1] = 2.0;
  }
  // T_{k+1} = 2(2x - 1) T_k - T_{k-1}
  for (std::size_t k = 1; k < m; ++k)
    for (std::size_t j = 0; j <= m; ++j) {
      double v = -2.0 * T[k][j] - T[k - 1][j];
      if (j > 0) v += 4.0 * T[k][j - 1];
      T[k + 1][j] = v;
    }
  return T;
}

ChebyshevResult chebyshev_interpolant_1d(const TargetSpec& target, std::size_t m) {
  if (target.dim() != 1) throw InvalidArgument("chebyshev_interpolant_1d: target must be univariate");
  ChebyshevResult r = chebyshev_tensor_coeffs(target, m, 1);
  r.coeff_bound = 2.0 * double(m + 1) * std::pow(3.0, double(m));
  r.coeff_bound_holds = r.max_coeff <= r.coeff_bound;
  return r;
}

ChebyshevResult chebyshev_tensor_coeffs(const TargetSpec& target, std::size_t N, std::size_t d) {
  if (target.dim() != d) throw InvalidArgument("chebyshev_tensor_coeffs: dimension mismatch");
  const std::size_t n1 = N + 1;
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    total *= n1;
    if (total > 20'000'000) throw InvalidArgument("chebyshev_tensor_coeffs: tensor grid too large");
  }
  const auto pts = cheb_points(N);
  const auto A = analysis_matrix(N);
  const auto T = shifted_chebyshev_monomials(N);

  // samples in row-major order, last coordinate fastest
  std::vector<double> data(total);
  std::vector<double> x(d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t k = d; k-- > 0;) {
      x[k] = pts[rem % n1];
      rem /= n1;
    }
    data[flat] = target(x);
    if (!std::isfinite(data[flat])) throw NumericError("chebyshev_tensor_coeffs: non-finite sample");
  }
  // apply a (N+1)x(N+1) matrix along each axis
  // extended precision for the transforms; the basis change is ill-conditioned
  auto along_axes = [&](std::vector<long double> v, auto&& matrix_at) {
    std::size_t stride = 1;
    for (std::size_t axis = d; axis-- > 0;) {
      std::vector<long double> out(total, 0.0L);
      for (std::size_t flat = 0; flat < total; ++flat) {
        const std::size_t i = (flat / stride) % n1;
        const std::size_t base = flat - i * stride;
        for (std::size_t k = 0; k < n1; ++k) out[base + k * stride] += matrix_at(k, i) * v[flat];
      }
      v = std::move(out);
      stride *= n1;
    }
    return v;
  };
  ChebyshevResult r;
  r.degree = N;
  std::vector<long double> cheb = along_axes(std::vector<long double>(data.begin(), data.end()),
                                             [&](std::size_t k, std::size_t i) { return A[k][i]; });
  // total-degree truncation in the Chebyshev basis keeps monomial degrees <= N
  MultiIndex j(d);
  auto unflatten = [&](std::size_t flat) {
    for (std::size_t k = d; k-- > 0;) {
      j[k] = flat % n1;
      flat /= n1;
    }
  };
  for (std::size_t flat = 0; flat < total; ++flat) {
    unflatten(flat);
    if (total_degree(j) > N) cheb[flat] = 0.0L;
  }
  r.chebyshev.assign(cheb.begin(), cheb.end());
  // Chebyshev index i -> monomial power k uses T[i][k]
  const std::vector<long double> mono =
      along_axes(cheb, [&](std::size_t k, std::size_t i) { return (long double)T[i][k]; });
  r.conditioning = std::pow(conditioning_of(T), double(d));
  r.ill_conditioned = r.conditioning > kConditioningLimit;
  r.poly = PolyND(d, N);
  for (std::size_t flat = 0; flat < total; ++flat) {
    unflatten(flat);
    if (total_degree(j) <= N && mono[flat] != 0.0L) r.poly.add(j, double(mono[flat]));
  }
  r.max_coeff = r.poly.max_abs_coeff();
  return r;
}

PolyND power_series_truncate(const TargetSpec& target, std::size_t N, std::size_t d) {
  if (target.dim() != d) throw InvalidArgument("power_series_truncate: dimension mismatch");
  if (!target.has_series())
    throw InvalidArgument("power_series_truncate: target has no closed-form power series");
  const double s = target.series_abs_sum();
  if (!(s <= 1.0 + 1e-12))
    throw InvalidArgument("power_series_truncate: sum of |a_j| exceeds 1; rescale the target by 1/" +
                          std::to_string(s));
  return target.series(N);
}

}  // namespace relu3d
