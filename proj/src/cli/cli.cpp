#include "relu3d/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "relu3d/errors.hpp"
#include "relu3d/serialize.hpp"
#include "relu3d/verify.hpp"

namespace relu3d::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* const kCountKeys[] = {"H", "N", "d", "k", "n", "N1", "N2", "r", "nodes"};
const char* const kRealKeys[] = {"M", "delta", "rho"};

struct BuildFlags {
  std::string params_file;
  std::string theorem;
  std::map<std::string, std::optional<double>> values;
  std::vector<double> coeffs;
  std::vector<double> beta;
  std::string kind;
  std::string target;
  std::vector<double> target_params;
  std::string target_file;
  std::string domain;
};

void add_build_flags(CLI::App* app, BuildFlags& f) {
  app->add_option("--params", f.params_file, "parameter document (JSON); flags override it");
  app->add_option("--theorem", f.theorem,
                  "poly | polyNd | smooth | analytic-cube | ellipse | clipped-hermite | hermite | "
                  "trig | lp");
  for (const char* k : kCountKeys) app->add_option(std::string("--") + k, f.values[k]);
  for (const char* k : kRealKeys) app->add_option(std::string("--") + k, f.values[k]);
  app->add_option("--coeffs", f.coeffs, "polynomial coefficients a_0,...,a_n")->delimiter(',');
  app->add_option("--beta", f.beta, "strip half-widths, one per coordinate")->delimiter(',');
  app->add_option("--kind", f.kind, "trig kind: cos | sin");
  app->add_option("--target", f.target, "catalog target id");
  app->add_option("--target-params", f.target_params, "catalog parameters")->delimiter(',');
  app->add_option("--target-file", f.target_file, "target document (JSON)");
  app->add_option("--domain", f.domain, "unit | symmetric | gaussian | lo,hi");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError(p.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw FormatError(p.string(), "cannot write file");
  out << text;
}

Domain parse_domain_flag(const std::string& s) {
  if (s == "unit") return Domain::unit();
  if (s == "symmetric") return Domain::symmetric();
  if (s == "gaussian") return Domain::gaussian();
  const auto comma = s.find(',');
  if (comma != std::string::npos) {
    try {
      const double lo = std::stod(s.substr(0, comma));
      const double hi = std::stod(s.substr(comma + 1));
      if (lo < hi) return Domain::shifted(lo, hi);
    } catch (const std::exception&) {
    }
  }
  throw InvalidArgument("domain must be unit, symmetric, gaussian or lo,hi");
}

json domain_to_json(const Domain& d) {
  const char* kind = d.kind == DomainKind::kUnitCube        ? "unit"
                     : d.kind == DomainKind::kShiftedCube   ? "shifted"
                     : d.kind == DomainKind::kSymmetricCube ? "symmetric"
                                                            : "gaussian";
  return {{"kind", kind}, {"lo", d.lo}, {"hi", d.hi}};
}

Domain domain_from_json(const json& j) {
  const std::string k = j.at("kind").get<std::string>();
  if (k == "unit") return Domain::unit();
  if (k == "symmetric") return Domain::symmetric();
  if (k == "gaussian") return Domain::gaussian();
  if (k == "shifted") return Domain::shifted(j.at("lo").get<double>(), j.at("hi").get<double>());
  throw FormatError("/domain/kind", "unknown domain kind '" + k + "'");
}

const char* norm_name(NormKind n) {
  return n == NormKind::kSup ? "sup" : n == NormKind::kLp ? "lp" : "gauss-l2";
}

NormKind parse_norm(const std::string& s) {
  if (s == "sup") return NormKind::kSup;
  if (s == "lp") return NormKind::kLp;
  if (s == "gauss" || s == "gauss-l2") return NormKind::kGaussL2;
  throw InvalidArgument("norm must be sup, lp or gauss");
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json metrics_json(const SizeMetrics& m) {
  return {{"width", m.width},
          {"depth", m.depth},
          {"height", m.height},
          {"neurons", m.neuron_count},
          {"params", m.param_count}};
}

SizeMetrics metrics_from_json(const json& j) {
  SizeMetrics m;
  m.width = j.at("width").get<std::size_t>();
  m.depth = j.at("depth").get<std::size_t>();
  m.height = j.at("height").get<std::size_t>();
  m.neuron_count = j.value("neurons", std::size_t{0});
  m.param_count = j.value("params", std::size_t{0});
  return m;
}

std::optional<TargetSpec> target_from_flags(const BuildFlags& f, std::size_t dim,
                                            std::optional<Domain> fallback) {
  if (!f.target_file.empty()) return parse_target(read_file(f.target_file));
  if (f.target.empty()) return std::nullopt;
  Domain dom = f.domain.empty() ? fallback.value_or(Domain::unit()) : parse_domain_flag(f.domain);
  return TargetSpec::catalog(f.target, f.target_params, dim, dom);
}

BuildRequest request_from_flags(const BuildFlags& f) {
  BuildRequest req;
  if (!f.params_file.empty()) req = parse_build_request(read_file(f.params_file));
  if (!f.theorem.empty()) req.theorem = f.theorem;
  if (req.theorem.empty()) throw InvalidArgument("a theorem id is required (--theorem or --params)");
  for (const auto& [k, v] : f.values)
    if (v) req.params[k] = *v;
  if (!f.coeffs.empty()) req.coeffs = f.coeffs;
  if (!f.beta.empty()) req.beta = f.beta;
  if (!f.kind.empty()) req.kind = f.kind;
  std::optional<Domain> dom;
  if (!f.domain.empty()) dom = parse_domain_flag(f.domain);
  if (auto t = target_from_flags(f, req.count("d", 1), dom)) req.target = *t;
  return req;
}

std::vector<double> parse_values(const std::string& spec) {
  std::vector<double> out;
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() < 2 || parts.size() > 3) throw InvalidArgument("range must be lo:hi[:step]");
    const double step = parts.size() == 3 ? parts[2] : 1.0;
    if (!(step > 0.0)) throw InvalidArgument("range step must be positive");
    for (double v = parts[0]; v <= parts[1] + 1e-9 * step; v += step) out.push_back(v);
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  }
  if (out.empty()) throw InvalidArgument("empty value list '" + spec + "'");
  return out;
}

json error_report_json(const ErrorReport& e) {
  json j;
  j["norm"] = norm_name(e.norm);
  j["p"] = number_or_null(e.p);
  j["measured"] = e.measured;
  j["bound"] = number_or_null(e.bound);
  j["resolution"] = e.resolution;
  j["points"] = e.points;
  j["pass"] = e.pass;
  j["fitted_constant"] = e.fitted_constant ? json(*e.fitted_constant) : json(nullptr);
  j["argmax"] = e.argmax;
  return j;
}

std::ostream* open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return &fallback;
  file.open(path, std::ios::binary);
  if (!file) throw FormatError(path, "cannot write file");
  return &file;
}

// ---------------------------------------------------------------------------

int do_build(const BuildFlags& f, const std::string& out_path, std::ostream& out) {
  const BuildRequest req = request_from_flags(f);
  const BuildReport rep = build_from_request(req);
  check_metrics(rep);
  save_network(rep.net, out_path);
  write_file(report_path(out_path), report_to_json(rep, req));
  const SizeMetrics m = metrics(rep.net);
  out << "network " << out_path << "\n";
  out << "report " << report_path(out_path).string() << "\n";
  out << "width " << m.width << "\ndepth " << m.depth << "\nheight " << m.height << "\n";
  if (rep.bound_formula_id == "lp") {
    out << "bound evaluated by verify (lp, up to a constant)\n";
  } else {
    out << "bound " << format_number(rep.theoretical_bound) << " (" << norm_name(rep.norm)
        << (rep.fitted_constant ? ", up to a constant" : "") << ")\n";
  }
  for (const auto& n : rep.notes) out << "note " << n << "\n";
  return kPass;
}

int do_eval(const std::string& net_path, const std::vector<double>& values, std::size_t random,
            double lo, double hi, bool extended, std::uint64_t seed, std::ostream& out) {
  const Net3D net = load_network(net_path);
  const std::size_t d = net.input_dim();
  std::vector<std::vector<double>> pts;
  if (random > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    for (std::size_t i = 0; i < random; ++i) {
      std::vector<double> x(d);
      for (auto& xi : x) xi = u(rng);
      pts.push_back(std::move(x));
    }
  } else {
    if (values.empty() || values.size() % d != 0)
      throw InvalidArgument("expected a multiple of " + std::to_string(d) + " input values");
    for (std::size_t i = 0; i < values.size(); i += d)
      pts.emplace_back(values.begin() + std::ptrdiff_t(i), values.begin() + std::ptrdiff_t(i + d));
  }
  const std::vector<double> ys = evaluate_points(net, pts, extended);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (random > 0)
      for (double x : pts[i]) out << format_number(x) << ',';
    out << format_number(ys[i]) << '\n';
  }
  return kPass;
}

int do_size(const std::string& net_path, bool as_json, bool flatten, std::ostream& out) {
  const Net3D net = load_network(net_path);
  const SizeMetrics m = metrics(net);
  if (as_json) {
    json j = metrics_json(m);
    if (flatten) j["flat"] = metrics_json(metrics(flatten_to_2d(net, FlattenMode::kPadToWidthTimesHeight)));
    out << j.dump(2) << '\n';
    return kPass;
  }
  out << "width " << m.width << "\ndepth " << m.depth << "\nheight " << m.height << "\nneurons "
      << m.neuron_count << "\nparams " << m.param_count << "\n";
  if (flatten) {
    const SizeMetrics fm = metrics(flatten_to_2d(net, FlattenMode::kPadToWidthTimesHeight));
    out << "flat_width " << fm.width << "\nflat_depth " << fm.depth << "\nflat_params "
        << fm.param_count << "\n";
  }
  return kPass;
}

struct VerifyFlags {
  std::string net;
  BuildFlags target;
  std::string norm;
  double p = 2.0;
  std::optional<double> bound;
  double bound_scale = 1.0;
  std::optional<double> constant;
  std::optional<double> support;
  std::size_t points = 0;
  std::size_t nodes = 0;
  bool extended = false;
  std::string report;
};

int do_verify(const VerifyFlags& v, std::ostream& out, std::ostream& err) {
  Net3D net = load_network(v.net);
  BuildRequest req;
  std::optional<BuildReport> sidecar;
  const fs::path rp = report_path(v.net);
  if (fs::exists(rp)) sidecar = report_from_json(read_file(rp), net, req);
  BuildReport rep = sidecar ? *sidecar : BuildReport(net);
  if (!sidecar) {
    rep.dim = net.input_dim();
    rep.theoretical_bound = std::numeric_limits<double>::infinity();
    req.theorem = "target";
  }
  if (!v.target.domain.empty()) rep.domain = parse_domain_flag(v.target.domain);
  if (auto t = target_from_flags(v.target, rep.dim, rep.domain)) {
    req.theorem = "target";
    req.target = *t;
    if (v.target.domain.empty()) rep.domain = t->domain();
  }
  if (req.theorem == "target" && !req.target)
    throw InvalidArgument("no build report next to the network; name a --target");
  if (!v.norm.empty()) {
    const NormKind n = parse_norm(v.norm);
    if (n != rep.norm) {
      // the build bound is stated in another norm
      rep.norm = n;
      rep.theoretical_bound = std::numeric_limits<double>::infinity();
      rep.bound_formula_id.clear();
      rep.fitted_constant = false;
    }
  }
  if (rep.norm == NormKind::kGaussL2) rep.domain = Domain::gaussian();
  if (v.support) {
    rep.diagnostics.erase(std::remove_if(rep.diagnostics.begin(), rep.diagnostics.end(),
                                         [](const auto& kv) { return kv.first == "support"; }),
                          rep.diagnostics.end());
    rep.diagnostics.emplace_back("support", *v.support);
  }
  MeasureOptions opt;
  opt.p = v.p;
  opt.sup.points_per_dim = v.points;
  opt.sup.extended = v.extended;
  opt.lp.nodes_per_dim = v.nodes;
  opt.lp.extended = v.extended;
  opt.lp.sup = opt.sup;
  ErrorReport e = measure(rep, req, opt);
  bool fitted_only = false;
  if (v.bound) {
    set_bound(e, *v.bound);
  } else if (rep.fitted_constant) {
    if (v.constant) {
      set_bound(e, *v.constant * e.bound);
    } else {
      fitted_only = true;
    }
  }
  if (v.bound_scale != 1.0) set_bound(e, e.bound * v.bound_scale);
  if (fitted_only && v.bound_scale == 1.0) e.pass = true;
  if (!std::isfinite(e.bound) && !v.bound) e.pass = true;

  const std::string report_file = v.report.empty() ? v.net + ".verify.json" : v.report;
  json j = error_report_json(e);
  j["network"] = v.net;
  j["reference"] = req.target ? json::parse(target_to_json(*req.target)) : json(req.theorem);
  j["bound_is_rate_only"] = fitted_only;
  write_file(report_file, j.dump(2) + "\n");

  out << "norm " << norm_name(e.norm);
  if (e.norm == NormKind::kLp) out << " p=" << format_number(e.p);
  out << "\nmeasured " << format_number(e.measured) << "\nbound "
      << (std::isfinite(e.bound) ? format_number(e.bound) : std::string("none")) << "\n";
  if (e.fitted_constant) out << "fitted_constant " << format_number(*e.fitted_constant) << "\n";
  out << "resolution " << e.resolution << "\n" << (e.pass ? "PASS" : "FAIL") << "\n";
  if (!e.pass) {
    err << "bound failure; report: " << report_file << "\n";
    return kBoundFailure;
  }
  return kPass;
}

struct SweepFlags {
  BuildFlags build;
  std::string param;
  std::string values;
  std::string output;
  bool fit = false;
  double split = 0.5;
  double headroom = 1.25;
  double p = 2.0;
  std::size_t points = 0;
  std::size_t nodes = 0;
};

int do_sweep(const SweepFlags& s, std::ostream& out, std::ostream& err) {
  const BuildRequest base = request_from_flags(s.build);
  const std::vector<double> values = parse_values(s.values);
  MeasureOptions opt;
  opt.p = s.p;
  opt.sup.points_per_dim = s.points;
  opt.lp.nodes_per_dim = s.nodes;
  const SweepTable t = sweep(base, s.param, values, opt);
  std::ofstream file;
  write_csv(t, *open_output(s.output, file, out));
  bool ok = true;
  for (const auto& r : t.rows)
    if (!r.pass) {
      err << "bound failure at " << s.param << " = " << format_number(r.param) << "\n";
      ok = false;
    }
  if (s.fit) {
    const FitResult f = fit_and_check(t, s.split, s.headroom);
    err << "fitted constant " << format_number(f.constant) << ", held-out max ratio "
        << format_number(f.max_holdout_ratio) << (f.pass ? " (pass)" : " (fail)") << "\n";
    for (double a : f.anomalies) err << "anomaly: error grew at " << format_number(a) << "\n";
    ok = ok && f.pass;
  }
  return ok ? kPass : kBoundFailure;
}

int do_table1(const std::vector<std::string>& rows, const std::string& ns, std::size_t d,
              const std::string& output, std::ostream& out) {
  std::vector<std::size_t> N;
  for (double v : parse_values(ns)) N.push_back(static_cast<std::size_t>(v));
  std::vector<Table1Config> cfg;
  for (const auto& r : rows) cfg.push_back({r, N, d});
  const auto table = table1_report(cfg);
  std::ofstream file;
  write_table1_csv(table, *open_output(output, file, out));
  bool ok = true;
  for (const auto& r : table) ok = ok && within_bound(r.error, r.bound);
  return ok ? kPass : kBoundFailure;
}

}  // namespace

fs::path report_path(const fs::path& net_path) {
  return fs::path(net_path.string() + ".report.json");
}

std::string report_to_json(const BuildReport& r, const BuildRequest& req) {
  json j;
  j["request"] = json::parse(build_request_to_json(req));
  j["expected"] = metrics_json(r.expected);
  j["stated"] = metrics_json(r.stated);
  j["stated_height_raw"] = r.stated_height_raw ? json(*r.stated_height_raw) : json(nullptr);
  j["theoretical_bound"] = number_or_null(r.theoretical_bound);
  j["fitted_constant"] = r.fitted_constant;
  j["empirical"] = r.empirical;
  j["bound_formula_id"] = r.bound_formula_id;
  j["norm"] = norm_name(r.norm);
  j["dim"] = r.dim;
  j["domain"] = domain_to_json(r.domain);
  j["extended_precision"] = r.extended_precision;
  json in = json::object(), diag = json::object();
  for (const auto& [k, v] : r.inputs) in[k] = number_or_null(v);
  for (const auto& [k, v] : r.diagnostics) diag[k] = number_or_null(v);
  j["inputs"] = in;
  j["diagnostics"] = diag;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

BuildReport report_from_json(const std::string& text, Net3D net, BuildRequest& req) {
  json j;
  try {
    j = json::parse(text);
    req = parse_build_request(j.at("request").dump());
    BuildReport r(std::move(net));
    r.expected = metrics_from_json(j.at("expected"));
    r.stated = metrics_from_json(j.at("stated"));
    if (!j.at("stated_height_raw").is_null()) r.stated_height_raw = j["stated_height_raw"].get<double>();
    const json& b = j.at("theoretical_bound");
    r.theoretical_bound = b.is_null() ? std::numeric_limits<double>::infinity() : b.get<double>();
    r.fitted_constant = j.at("fitted_constant").get<bool>();
    r.empirical = j.at("empirical").get<bool>();
    r.bound_formula_id = j.at("bound_formula_id").get<std::string>();
    r.norm = parse_norm(j.at("norm").get<std::string>());
    r.dim = j.at("dim").get<std::size_t>();
    r.domain = domain_from_json(j.at("domain"));
    r.extended_precision = j.at("extended_precision").get<bool>();
    const auto num = [](const json& v) {
      return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
    };
    for (const auto& [k, v] : j.at("inputs").items()) r.inputs.emplace_back(k, num(v));
    for (const auto& [k, v] : j.at("diagnostics").items()) r.diagnostics.emplace_back(k, num(v));
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError("report", e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build and verify height-augmented ReLU networks"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for randomized inputs")->capture_default_str();

  BuildFlags build_flags;
  std::string build_out;
  auto* build = app.add_subcommand("build", "build a network and write it with its report");
  add_build_flags(build, build_flags);
  build->add_option("-o,--output", build_out, "network file")->required();

  std::string eval_net;
  std::vector<double> eval_values;
  std::size_t eval_random = 0;
  double eval_lo = 0.0, eval_hi = 1.0;
  bool eval_extended = false;
  auto* eval = app.add_subcommand("eval", "evaluate a network at the given inputs");
  eval->add_option("network", eval_net)->required();
  eval->add_option("inputs", eval_values, "input coordinates, point after point");
  eval->add_option("--random", eval_random, "evaluate at this many uniform random points");
  eval->add_option("--lo", eval_lo);
  eval->add_option("--hi", eval_hi);
  eval->add_flag("--extended", eval_extended, "evaluate in binary128");

  VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "measure the error of a network against its bound");
  verify->add_option("network", vf.net)->required();
  verify->add_option("--target", vf.target.target, "catalog target id");
  verify->add_option("--target-params", vf.target.target_params)->delimiter(',');
  verify->add_option("--target-file", vf.target.target_file);
  verify->add_option("--domain", vf.target.domain, "unit | symmetric | gaussian | lo,hi");
  verify->add_option("--norm", vf.norm, "sup | lp | gauss");
  verify->add_option("--p", vf.p, "exponent for the lp norm")->capture_default_str();
  verify->add_option("--bound", vf.bound, "compare against this bound instead");
  verify->add_option("--bound-scale", vf.bound_scale, "multiply the bound by this factor");
  verify->add_option("--constant", vf.constant, "constant for rate-only bounds");
  verify->add_option("--support", vf.support, "support half-width for the Gaussian norm");
  verify->add_option("--points", vf.points, "sup grid points per dimension");
  verify->add_option("--quad-nodes", vf.nodes, "quadrature nodes per dimension");
  verify->add_flag("--extended", vf.extended, "evaluate in binary128");
  verify->add_option("--report", vf.report, "error report file");

  std::string size_net;
  bool size_json = false, size_flat = false;
  auto* size = app.add_subcommand("size", "print width, depth and height");
  size->add_option("network", size_net)->required();
  size->add_flag("--json", size_json);
  size->add_flag("--flatten", size_flat, "also report the flattened 2D network");

  SweepFlags sf;
  auto* sw = app.add_subcommand("sweep", "build and verify over a parameter range");
  add_build_flags(sw, sf.build);
  sw->add_option("--param", sf.param, "parameter to vary")->required();
  sw->add_option("--values", sf.values, "lo:hi[:step] or a comma list")->required();
  sw->add_option("-o,--output", sf.output, "CSV file (default stdout)");
  sw->add_flag("--fit", sf.fit, "fit the constant on the first part and check the rest");
  sw->add_option("--split", sf.split)->capture_default_str();
  sw->add_option("--headroom", sf.headroom)->capture_default_str();
  sw->add_option("--p", sf.p)->capture_default_str();
  sw->add_option("--points", sf.points);
  sw->add_option("--quad-nodes", sf.nodes, "quadrature nodes per dimension");

  std::vector<std::string> t1_rows{"polynomial", "analytic-cube", "ellipse", "hermite"};
  std::string t1_N = "4:10", t1_out;
  std::size_t t1_d = 1;
  auto* t1 = app.add_subcommand("table1", "compare sizes with the fixed-height constructions");
  t1->add_option("--rows", t1_rows)->delimiter(',')->capture_default_str();
  t1->add_option("--N", t1_N)->capture_default_str();
  t1->add_option("--d", t1_d)->capture_default_str();
  t1->add_option("-o,--output", t1_out, "CSV file (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*build) return do_build(build_flags, build_out, out);
    if (*eval) return do_eval(eval_net, eval_values, eval_random, eval_lo, eval_hi, eval_extended, seed, out);
    if (*verify) return do_verify(vf, out, err);
    if (*size) return do_size(size_net, size_json, size_flat, out);
    if (*sw) return do_sweep(sf, out, err);
    if (*t1) return do_table1(t1_rows, t1_N, t1_d, t1_out, out);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace relu3d::cli
