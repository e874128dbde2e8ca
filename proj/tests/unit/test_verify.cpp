#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "relu3d/builders.hpp"
#include "relu3d/errors.hpp"
#include "relu3d/verify.hpp"

using namespace relu3d;

namespace {

ScalarField power_field(double e) {
  return [e](std::span<const double> x) { return std::pow(x[0], e); };
}

SweepTable synthetic(const std::vector<double>& measured, const std::vector<double>& bound) {
  SweepTable t;
  t.parameter = "N";
  for (std::size_t i = 0; i < measured.size(); ++i) {
    SweepRow r;
    r.param = double(i + 1);
    r.measured = measured[i];
    r.bound = bound[i];
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("sup error of the square net matches the product interpolant") {
  const std::vector<double> c{0, 0, 1};
  BuildReport r = build_poly1d(c, 3);
  const ErrorReport e = sup_error(r.net, power_field(2), Box::cube(1, 0, 1));
  CHECK(e.argmax.size() == 1);
  double worst = 0;
  for (double x : oracle::grid(0, 1, 100001))
    worst = std::max(worst, std::abs(x * x - oracle::product_interp(3, x, x)));
  CHECK(worst == doctest::Approx(std::ldexp(1.0, -6)).epsilon(1e-9));
  CHECK(e.measured == doctest::Approx(worst).epsilon(1e-6));
}

TEST_CASE("sup error of an exact net is zero") {
  BuildReport r = build_poly1d(std::vector<double>{0, 1}, 2);
  ErrorReport e = sup_error(r.net, power_field(1), Box::cube(1, 0, 1));
  CHECK(e.measured == 0.0);
  set_bound(e, 0.0);
  CHECK(check_bound(e));
}

TEST_CASE("sup error of the product net in two dimensions") {
  PolyND p(2, 2);
  p.add({1, 1}, 1.0);
  BuildReport r = build_polyNd(p, 5);
  const ScalarField f = [](std::span<const double> x) { return x[0] * x[1]; };
  const ErrorReport e = sup_error(r.net, f, Box::cube(2, 0, 1));
  CHECK(e.measured <= 6.0 * std::ldexp(1.0, -12));
  CHECK(e.measured > 0.0);
  CHECK(e.points > 0);
}

TEST_CASE("sup error is stable under grid refinement") {
  BuildReport r = build_poly1d(std::vector<double>{0, 0, 0, 1}, 4);
  SupOptions coarse;
  coarse.points_per_dim = 1025;
  SupOptions fine;
  fine.points_per_dim = 16385;
  const double a = sup_error(r.net, power_field(3), Box::cube(1, 0, 1), coarse).measured;
  const double b = sup_error(r.net, power_field(3), Box::cube(1, 0, 1), fine).measured;
  CHECK(a == doctest::Approx(b).epsilon(1e-3));
}

TEST_CASE("L^p error of identity against x^2") {
  BuildReport r = build_poly1d(std::vector<double>{0, 1}, 2);
  const ErrorReport l2 = lp_error(r.net, power_field(2), 2.0, Box::cube(1, 0, 1));
  CHECK(l2.measured == doctest::Approx(std::sqrt(1.0 / 30.0)).epsilon(1e-12));
  const ErrorReport l1 = lp_error(r.net, power_field(2), 1.0, Box::cube(1, 0, 1));
  CHECK(l1.measured == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  const ErrorReport linf =
      lp_error(r.net, power_field(2), std::numeric_limits<double>::infinity(), Box::cube(1, 0, 1));
  CHECK(linf.measured == doctest::Approx(0.25).epsilon(1e-9));
  // unit volume: norms are nondecreasing in p
  CHECK(l1.measured <= l2.measured);
  CHECK(l2.measured <= linf.measured);
  const std::vector<double> ps{1.0, 2.0};
  const auto both = lp_errors(r.net, power_field(2), ps, Box::cube(1, 0, 1));
  CHECK(both[0].measured == doctest::Approx(l1.measured));
  CHECK(both[1].measured == doctest::Approx(l2.measured));
  CHECK_THROWS_AS(lp_error(r.net, power_field(2), 0.5, Box::cube(1, 0, 1)), InvalidArgument);
}

TEST_CASE("L^p error of a net against itself is zero") {
  BuildReport r = build_poly1d(std::vector<double>{0.2, -0.5, 0.75}, 4);
  const Net3D net = r.net;
  const ScalarField self = [net](std::span<const double> x) { return evaluate(net, x); };
  CHECK(lp_error(r.net, self, 2.0, Box::cube(1, 0, 1)).measured == 0.0);
  CHECK(lp_norm(power_field(1), 2.0, Box::cube(1, 0, 1)) == doctest::Approx(std::sqrt(1.0 / 3.0)));
}

TEST_CASE("Gaussian L2 error of the zero net is the target norm") {
  BuildReport r = build_poly1d(std::vector<double>{0, 0}, 2);
  const TargetSpec x = TargetSpec::catalog("identity", {0}, 1, Domain::gaussian());
  const ErrorReport e = gauss_l2_error(r.net, x, 3.0);
  CHECK(e.measured == doctest::Approx(1.0).epsilon(1e-6));
  const TargetSpec c = TargetSpec::catalog("cosine", {1.0}, 1, Domain::gaussian());
  // E cos(X)^2 = (1 + e^-2) / 2
  CHECK(gauss_l2_error(r.net, c, 3.0).measured ==
        doctest::Approx(std::sqrt((1 + std::exp(-2.0)) / 2)).epsilon(1e-6));
}

TEST_CASE("Gaussian L2 error rejects nets that are not clipped") {
  BuildReport r = build_poly1d(std::vector<double>{0, 1}, 2);
  const TargetSpec x = TargetSpec::catalog("identity", {0}, 1, Domain::gaussian());
  CHECK_THROWS_AS(gauss_l2_error(r.net, x, 3.0), InvalidArgument);
}

TEST_CASE("Gaussian L2 error of a clipped Hermite net matches Simpson") {
  BuildReport r = build_clipped_hermite(3, 5.0, 0.5, 12);
  const TargetSpec zero = TargetSpec::catalog("constant", {0.0}, 1, Domain::gaussian());
  const double e = gauss_l2_error(r.net, zero, 5.0).measured;
  const double ref = std::sqrt(oracle::simpson(
      [&](double t) {
        const double v = evaluate(r.net, {t});
        return v * v * oracle::normal_pdf(t);
      },
      -6, 6, 48000));
  CHECK(e == doctest::Approx(ref).epsilon(1e-5));
  // the clipped polynomial keeps almost all of the unit norm
  CHECK(e == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("measure picks the norm of the report") {
  BuildRequest req;
  req.theorem = "trig";
  req.params = {{"k", 2}, {"N", 6}};
  const BuildReport rep = build_from_request(req);
  const ErrorReport e = measure(rep, req);
  CHECK(e.norm == NormKind::kSup);
  CHECK(e.pass);
  CHECK(e.measured <= std::ldexp(1.0, -6));
}

TEST_CASE("bound comparisons allow only relative slack") {
  CHECK(within_bound(1.0, 1.0));
  CHECK(within_bound(1.0 + 1e-12, 1.0));
  CHECK(!within_bound(1.0 + 1e-6, 1.0));
  ErrorReport e;
  e.measured = 2.0;
  set_bound(e, 1.0);
  CHECK(!e.pass);
  set_bound(e, 3.0);
  CHECK(e.pass);
}

TEST_CASE("fit and check on synthetic tables") {
  const std::vector<double> bound{1, 0.5, 0.25, 0.125, 0.0625, 0.03125};
  SweepTable good = synthetic({0.3, 0.15, 0.075, 0.0375, 0.019, 0.009}, bound);
  FitResult f = fit_and_check(good);
  CHECK(f.constant == doctest::Approx(0.3));
  CHECK(f.pass);
  CHECK(f.anomalies.empty());
  SweepTable bad = synthetic({0.3, 0.15, 0.075, 0.05, 0.04, 0.03}, bound);
  FitResult g = fit_and_check(bad);
  CHECK(!g.pass);
  CHECK(g.max_holdout_ratio == doctest::Approx(0.96));
  SweepTable bump = synthetic({0.3, 0.15, 0.2, 0.0375, 0.019, 0.009}, bound);
  CHECK(fit_and_check(bump).anomalies == std::vector<double>{3.0});
  CHECK_THROWS_AS(fit_and_check(synthetic({1, 1}, {1, 1})), InvalidArgument);
}

TEST_CASE("sweep over N for the trig net") {
  BuildRequest req;
  req.theorem = "trig";
  req.params = {{"k", 1}};
  const std::vector<double> Ns{6, 4, 5};
  SweepTable t = sweep(req, "N", Ns);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].param == 4);
  CHECK(t.rows[2].param == 6);
  for (const auto& r : t.rows) CHECK(r.pass);
  CHECK(t.rows[2].measured < t.rows[0].measured);
  std::ostringstream os;
  write_csv(t, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("N,measured,bound,ratio,param_count,width,depth,height,pass\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("comparison table flattens to width times height") {
  const std::vector<Table1Config> cfg{{"polynomial", {4}, 1}, {"analytic-cube", {5}, 1}};
  const auto rows = table1_report(cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.flat_width == r.size.width * std::max<std::size_t>(r.size.height, 1));
    CHECK(r.error <= r.bound * (1 + kBoundSlack));
  }
  CHECK(rows[1].baseline.depth == doctest::Approx(25.0));
  std::ostringstream os;
  write_table1_csv(rows, os);
  CHECK(os.str().rfind("row,N,d,error,bound,", 0) == 0);
  CHECK_THROWS_AS(table1_request("nope", 4, 1), InvalidArgument);
}
