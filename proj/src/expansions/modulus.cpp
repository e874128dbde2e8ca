#include "relu3d/modulus.hpp"

#include <cmath>
#include <vector>

#include "relu3d/errors.hpp"
#include "relu3d/numerics.hpp"
#include "relu3d/poly.hpp"

namespace relu3d {

double modulus_smoothness(const TargetSpec& target, std::size_t r, double t, double p,
                          std::size_t d, const ModulusOptions& opt) {
  if (!(t > 0.0)) throw InvalidArgument("modulus_smoothness: t must be positive");
  if (!(p >= 1.0)) throw InvalidArgument("modulus_smoothness: p must be at least 1");
  if (target.dim() != d) throw InvalidArgument("modulus_smoothness: dimension mismatch");
  const double T = opt.half_period;
  const std::size_t G = opt.nodes ? opt.nodes : (d == 1 ? 4096 : 256);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= G;
  const double step = 2.0 * T / double(G);
  const double cell = std::pow(step, double(d));
  const bool sup = std::isinf(p);

  auto wrap = [T](double x) { return x - 2.0 * T * std::floor((x + T) / (2.0 * T)); };
  std::vector<double> binom(r + 1);
  for (std::size_t k = 0; k <= r; ++k) binom[k] = ((r - k) % 2 ? -1.0 : 1.0) * binomial(r, k);

  double best = 0.0;
  std::vector<double> x(d), y(d);
  for (std::size_t s = 0; s < opt.steps; ++s) {
    const double h = t * std::exp2(-double(s) / 4.0);
    for (std::size_t dir = 0; dir < d; ++dir) {
      CompensatedSum acc;
      double mx = 0.0;
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t k = d; k-- > 0;) {
          x[k] = -T + step * (double(rem % G) + 0.5);
          rem /= G;
        }
        double diff = 0.0;
        y = x;
        for (std::size_t k = 0; k <= r; ++k) {
          y[dir] = wrap(x[dir] + double(k) * h);
          diff += binom[k] * target(y);
        }
        const double a = std::abs(diff);
        if (sup)
          mx = std::max(mx, a);
        else
          acc.add(std::pow(a, p) * cell);
      }
      best = std::max(best, sup ? mx : std::pow(acc.value(), 1.0 / p));
    }
  }
  return best;
}

}  // namespace relu3d
