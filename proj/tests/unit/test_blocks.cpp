#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "relu3d/blocks.hpp"

using namespace relu3d;
using oracle::Rational;

namespace {

double sup_on_grid(const Net3D& net, double (*f)(double), std::size_t n) {
  double worst = 0;
  for (double x : oracle::grid(0, 1, n)) worst = std::max(worst, std::abs(evaluate(net, {x}) - f(x)));
  return worst;
}

double sq(double x) { return x * x; }

}  // namespace

TEST_CASE("sawtooth values") {
  Net3D g1 = sawtooth_net(1), g2 = sawtooth_net(2), g3 = sawtooth_net(3);
  CHECK(evaluate(g1, {0.5}) == 1.0);
  CHECK(evaluate(g1, {0.0}) == 0.0);
  CHECK(evaluate(g1, {1.0}) == 0.0);
  CHECK(evaluate(g2, {0.25}) == 1.0);
  CHECK(evaluate(g2, {0.5}) == 0.0);
  for (double x : {0.125, 0.375, 0.625, 0.875}) CHECK(evaluate(g3, {x}) == 1.0);
  CHECK_THROWS_AS(sawtooth_net(0), InvalidArgument);
}

TEST_CASE("sawtooth equals iterated tent exactly") {
  for (std::size_t s : {1u, 4u, 7u}) {
    Net3D g = sawtooth_net(s);
    Rational worst = 0;
    for (int i = 0; i <= 10000; ++i) {
      const Rational x(i, 10000);
      const std::vector<Rational> in{x};
      Rational d = evaluate_as<Rational>(g, in)[0] - oracle::sawtooth(s, x);
      if (d < 0) d = -d;
      if (d > worst) worst = d;
    }
    CHECK(worst == 0);
  }
}

TEST_CASE("square gadget") {
  CHECK(evaluate(square_net(0), {0.3}) == 0.3);
  for (std::size_t H = 0; H <= 8; ++H) {
    Net3D f = square_net(H);
    const int nodes = 1 << H;
    for (int l = 0; l <= nodes; ++l) {
      const double x = double(l) / nodes;
      CHECK(evaluate(f, {x}) == x * x);
    }
    // agrees with the direct interpolant and has error h^2/4 at midpoints
    for (double x : oracle::grid(0, 1, 777))
      CHECK(evaluate(f, {x}) == doctest::Approx(oracle::square_interp(H, x)).epsilon(1e-13));
    const double h = std::ldexp(1.0, -int(H));
    CHECK(evaluate(f, {h / 2}) - h * h / 4 == doctest::Approx(h * h / 4).epsilon(1e-12));
  }
}

TEST_CASE("square gadget error shrinks fourfold per level") {
  double prev = sup_on_grid(square_net(1), sq, (1 << 5) + 1);
  for (std::size_t H = 2; H <= 10; ++H) {
    const double e = sup_on_grid(square_net(H), sq, (std::size_t{1} << (H + 4)) + 1);
    CHECK(prev / e == doctest::Approx(4.0).epsilon(0.01));
    prev = e;
  }
}

TEST_CASE("bivariate product on the unit square") {
  for (std::size_t H : {2u, 4u, 6u}) {
    Net3D p = product2_unit(H);
    for (double y : oracle::grid(0, 1, 33)) CHECK(evaluate(p, {0.0, y}) == 0.0);
    const int half = 1 << (H - 1);
    for (int j = 0; j <= half; ++j)
      for (int k = 0; k <= half; ++k) {
        const double x = double(j) / half, y = double(k) / half;
        CHECK(std::abs(evaluate(p, {x, y}) - x * y) <= 1e-12);
      }
  }
  Net3D p4 = product2_unit(4);
  double worst = 0;
  const auto g = oracle::grid(0, 1, 257);
  for (double x : g)
    for (double y : g) {
      const double v = evaluate(p4, {x, y});
      CHECK(v == doctest::Approx(oracle::product_interp(4, x, y)).epsilon(1e-12));
      worst = std::max(worst, std::abs(v - x * y));
    }
  CHECK(worst <= 6 * std::ldexp(1.0, -10));
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 10000; ++i) {
    const double v = evaluate(p4, {u(rng), u(rng)});
    CHECK((v >= -1e-15 && v <= 1.0 + 1e-15));
  }
}

TEST_CASE("d-fold product") {
  Net3D p2 = product_d_net(2, 6, 1.0);
  CHECK(std::abs(evaluate(p2, {-1.0, 1.0}) + 1.0) <= 6 * std::ldexp(1.0, -14));
  Net3D p3 = product_d_net(3, 4, 1.0);
  CHECK(evaluate(p3, {0.0, 0.5, -0.75}) == 0.0);
  for (std::size_t d = 2; d <= 5; ++d) {
    const SizeMetrics m = metrics(product_d_net(d, 5, 1.3));
    CHECK(m.width == 4 + d);
    CHECK(m.depth == d - 1);
    CHECK(m.height == 6);
  }
  Net3D p = product_d_net(3, 6, 2.0);
  double worst = 0;
  const auto g = oracle::grid(-2, 2, 41);
  for (double a : g)
    for (double b : g)
      for (double c : g) worst = std::max(worst, std::abs(evaluate(p, {a, b, c}) - a * b * c));
  CHECK(worst <= 6.0 * 2 * 8 * std::ldexp(1.0, -14));
  CHECK(evaluate(product_d_net(1, 3, 1.0), {0.4}) == 0.4);
  CHECK_THROWS_AS(product_d_net(2, 3, 0.0), InvalidArgument);
}

TEST_CASE("d-fold product is exact on even lattice nodes") {
  // nodes of step 2^-H in each normalized factor
  const std::size_t H = 4;
  Net3D p = product_d_net(3, H, 1.0);
  const int n = 1 << (H - 1);
  for (int i = -n; i <= n; i += 3)
    for (int j = -n; j <= n; j += 2)
      for (int k = -n; k <= n; k += 5) {
        const double a = double(i) / n, b = double(j) / n, c = double(k) / n;
        CHECK(std::abs(evaluate(p, {a, b, c}) - a * b * c) <= 1e-12);
      }
}

TEST_CASE("power chain") {
  const std::size_t H = 5;
  Net3D chain = power_chain_net(6, H);
  CHECK(chain.output_dim() == 6);
  const double unit = std::ldexp(1.0, -2 * int(H + 1));
  for (double x : oracle::grid(0, 1, 513)) {
    const auto h = evaluate_outputs(chain, std::vector<double>{x});
    CHECK(h[0] == x);
    for (std::size_t k = 1; k <= 6; ++k) {
      CHECK(std::abs(h[k - 1] - std::pow(x, double(k))) <= 6.0 * double(k - 1) * unit + 1e-15);
      CHECK((h[k - 1] >= -1e-15 && h[k - 1] <= 1.0 + 1e-15));
    }
  }
  const auto at_half = evaluate_outputs(chain, std::vector<double>{0.5});
  CHECK(std::abs(at_half[1] - 0.25) <= 6 * unit);
  const auto at_one = evaluate_outputs(power_chain_net(4, 3), std::vector<double>{1.0});
  CHECK(at_one[3] == 1.0);
}

TEST_CASE("periodic fold") {
  CHECK(evaluate(periodic_fold_net(1), {-0.5}) == 0.5);
  CHECK(evaluate(periodic_fold_net(2), {0.5}) == 1.0);
  CHECK(evaluate(periodic_fold_net(4), {1.0}) == 0.0);
  for (std::size_t k : {1u, 3u, 5u, 8u}) {
    Net3D fold = periodic_fold_net(k);
    const SizeMetrics m = metrics(fold);
    CHECK(m.depth == 1);
    CHECK(m.height == ceil_log2(k) + 1);
    for (double x : oracle::grid(-1, 1, 1001)) {
      const double v = evaluate(fold, {x});
      CHECK((v >= 0.0 && v <= 1.0 + 1e-15));
      CHECK(std::cos(std::numbers::pi * v) ==
            doctest::Approx(std::cos(double(k) * std::numbers::pi * x)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("clip window") {
  const double M = 3.0, delta = 0.5;
  Net3D clip = clip_window_net(M, delta);
  auto at = [&](double x) { return evaluate_outputs(clip, std::vector<double>{x}); };
  CHECK(at(0.0)[0] == 0.0);
  CHECK(at(0.0)[1] == 1.0);
  CHECK(std::abs(at(M)[0]) <= 1e-14);
  CHECK(std::abs(at(M)[1]) <= 1e-14);
  CHECK(at(M - delta / 2)[0] == doctest::Approx((M - delta) / 2).epsilon(1e-14));
  CHECK(at(M - delta / 2)[1] == doctest::Approx(0.5).epsilon(1e-14));
  for (double x : oracle::grid(-M + delta, M - delta, 101)) {
    CHECK(at(x)[0] == doctest::Approx(x).epsilon(1e-13).scale(1.0));
    CHECK(at(x)[1] == doctest::Approx(1.0).epsilon(1e-13));
  }
  for (double x : {-10.0, -M - 0.1, M + 0.1, 7.0}) {
    CHECK(std::abs(at(x)[0]) <= 1e-12);
    CHECK(std::abs(at(x)[1]) <= 1e-12);
  }
  CHECK(metrics(clip).width == 4);
  CHECK_THROWS_AS(clip_window_net(1.0, 1.0), InvalidArgument);
  GadgetParams gp{3, 2.0, 2, 0.1};
  CHECK_NOTHROW(gp.validate());
  gp.delta = 3.0;
  CHECK_THROWS_AS(gp.validate(), InvalidArgument);
}
