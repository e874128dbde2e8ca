#include <algorithm>
#include <cmath>

#include "relu3d/errors.hpp"
#include "relu3d/serialize.hpp"
#include "relu3d/verify.hpp"

namespace relu3d {

namespace {

double ratio(const SweepRow& r) {
  if (r.bound > 0.0) return r.measured / r.bound;
  return r.measured > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

SweepTable sweep(const BuildRequest& base, const std::string& parameter,
                 std::span<const double> values, const MeasureOptions& opt) {
  if (values.empty()) throw InvalidArgument("sweep needs at least one value");
  SweepTable t;
  t.parameter = parameter;
  for (double v : values) {
    BuildRequest req = base;
    req.params[parameter] = v;
    const BuildReport rep = build_from_request(req);
    const ErrorReport e = measure(rep, req, opt);
    const SizeMetrics m = metrics(rep.net);
    SweepRow row;
    row.param = v;
    row.measured = e.measured;
    row.bound = e.bound;
    row.param_count = m.param_count;
    row.width = m.width;
    row.depth = m.depth;
    row.height = m.height;
    row.pass = rep.fitted_constant || e.pass;
    t.fitted_constant = t.fitted_constant || rep.fitted_constant;
    t.rows.push_back(std::move(row));
  }
  std::sort(t.rows.begin(), t.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });
  return t;
}

FitResult fit_and_check(const SweepTable& t, double split, double headroom) {
  if (t.rows.size() < 6) throw InvalidArgument("fitting needs at least 6 sweep points");
  if (!(split > 0.0 && split < 1.0)) throw InvalidArgument("split must lie in (0,1)");
  const std::size_t n = t.rows.size();
  const std::size_t k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(split * static_cast<double>(n))), 1, n - 1);
  FitResult f;
  for (std::size_t i = 0; i < k; ++i) f.constant = std::max(f.constant, ratio(t.rows[i]));
  for (std::size_t i = k; i < n; ++i)
    f.max_holdout_ratio = std::max(f.max_holdout_ratio, ratio(t.rows[i]));
  f.pass = f.max_holdout_ratio <= headroom * f.constant * (1.0 + kBoundSlack);
  for (std::size_t i = 1; i < n; ++i) {
    if (t.rows[i].measured > 1.02 * t.rows[i - 1].measured + 1e-15)
      f.anomalies.push_back(t.rows[i].param);
  }
  return f;
}

void write_csv(const SweepTable& t, std::ostream& os) {
  os << t.parameter << ",measured,bound,ratio,param_count,width,depth,height,pass";
  if (!t.rows.empty())
    for (const auto& [k, v] : t.rows.front().extra) os << ',' << k;
  os << '\n';
  for (const auto& r : t.rows) {
    os << format_number(r.param) << ',' << format_number(r.measured) << ','
       << format_number(r.bound) << ',' << format_number(ratio(r)) << ',' << r.param_count << ','
       << r.width << ',' << r.depth << ',' << r.height << ',' << (r.pass ? 1 : 0);
    for (const auto& [k, v] : r.extra) os << ',' << format_number(v);
    os << '\n';
  }
}

BuildRequest table1_request(const std::string& row, std::size_t N, std::size_t d) {
  BuildRequest req;
  const double n = static_cast<double>(N);
  req.params["d"] = static_cast<double>(d);
  if (row == "polynomial") {
    // fixed quartic; the height plays the role of N
    req.theorem = "poly";
    req.coeffs = {0.5, -0.25, 0.125, -0.0625, 0.03125};
    req.params.erase("d");
    req.params["H"] = n;
  } else if (row == "analytic-cube") {
    req.theorem = "analytic-cube";
    req.params["N"] = n;
    req.params["delta"] = 0.5;
  } else if (row == "ellipse") {
    req.theorem = "ellipse";
    req.params["N"] = n;
    req.params["rho"] = d == 1 ? 2.4 : 3.0;
  } else if (row == "hermite") {
    req.theorem = "hermite";
    req.params["N"] = n;
    req.beta = {1.0};
  } else {
    throw InvalidArgument("unknown table row '" + row + "'");
  }
  return req;
}

std::vector<Table1Row> table1_report(const std::vector<Table1Config>& configs,
                                     const MeasureOptions& opt) {
  std::vector<Table1Row> out;
  for (const auto& c : configs) {
    for (std::size_t N : c.N) {
      const BuildRequest req = table1_request(c.row, N, c.d);
      const BuildReport rep = build_from_request(req);
      const ErrorReport e = measure(rep, req, opt);
      Table1Row row;
      row.row = c.row;
      row.N = N;
      row.d = c.d;
      row.error = e.measured;
      row.bound = e.bound;
      row.size = metrics(rep.net);
      const SizeMetrics flat =
          metrics(flatten_to_2d(rep.net, FlattenMode::kPadToWidthTimesHeight));
      row.flat_width = flat.width;
      row.flat_params = flat.param_count;
      SizeParams sp;
      sp.N = N;
      sp.d = c.d;
      row.baseline = table1_baseline(c.row, sp);
      out.push_back(std::move(row));
    }
  }
  return out;
}

void write_table1_csv(const std::vector<Table1Row>& rows, std::ostream& os) {
  os << "row,N,d,error,bound,width,depth,height,params,flat_width,flat_params,"
        "baseline_width,baseline_depth,baseline_height\n";
  for (const auto& r : rows) {
    os << r.row << ',' << r.N << ',' << r.d << ',' << format_number(r.error) << ','
       << format_number(r.bound) << ',' << r.size.width << ',' << r.size.depth << ','
       << r.size.height << ',' << r.size.param_count << ',' << r.flat_width << ','
       << r.flat_params << ',' << format_number(r.baseline.width) << ','
       << format_number(r.baseline.depth) << ',' << format_number(r.baseline.height) << '\n';
  }
}

}  // namespace relu3d
