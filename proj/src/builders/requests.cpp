#include "relu3d/requests.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "relu3d/errors.hpp"
#include "relu3d/hermite.hpp"

namespace relu3d {

using nlohmann::json;

namespace {

std::size_t as_count(double v, const std::string& key) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9)
    throw InvalidArgument("parameter '" + key + "' must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

double BuildRequest::get(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::size_t BuildRequest::count(const std::string& key, std::size_t fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : as_count(it->second, key);
}

BuildRequest parse_build_request(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("", "expected an object");
  BuildRequest req;
  if (!j.contains("theorem_id") || !j["theorem_id"].is_string())
    throw FormatError("/theorem_id", "missing theorem id");
  req.theorem = j["theorem_id"].get<std::string>();
  if (j.contains("target")) req.target = parse_target(j["target"].dump());
  if (j.contains("coeffs")) {
    if (!j["coeffs"].is_array()) throw FormatError("/coeffs", "expected an array");
    for (std::size_t i = 0; i < j["coeffs"].size(); ++i) {
      if (!j["coeffs"][i].is_number())
        throw FormatError("/coeffs/" + std::to_string(i), "expected a number");
      req.coeffs.push_back(j["coeffs"][i].get<double>());
    }
  }
  if (j.contains("params")) {
    const json& p = j["params"];
    if (!p.is_object()) throw FormatError("/params", "expected an object");
    for (const auto& [key, v] : p.items()) {
      const std::string path = "/params/" + key;
      if (key == "beta") {
        if (v.is_number()) {
          req.beta = {v.get<double>()};
        } else if (v.is_array()) {
          for (const auto& b : v) {
            if (!b.is_number()) throw FormatError(path, "expected numbers");
            req.beta.push_back(b.get<double>());
          }
        } else {
          throw FormatError(path, "expected a number or an array");
        }
      } else if (key == "kind") {
        if (!v.is_string()) throw FormatError(path, "expected a string");
        req.kind = v.get<std::string>();
      } else if (v.is_number()) {
        req.params[key] = v.get<double>();
      } else {
        throw FormatError(path, "expected a number");
      }
    }
  }
  return req;
}

std::string build_request_to_json(const BuildRequest& req) {
  json j;
  j["theorem_id"] = req.theorem;
  if (req.target) j["target"] = json::parse(target_to_json(*req.target));
  if (!req.coeffs.empty()) j["coeffs"] = req.coeffs;
  json p = json::object();
  for (const auto& [k, v] : req.params) p[k] = v;
  if (!req.beta.empty()) p["beta"] = req.beta;
  if (req.theorem == "trig") p["kind"] = req.kind;
  j["params"] = p;
  return j.dump(2);
}

TargetSpec default_target(const BuildRequest& req) {
  const std::size_t d = req.count("d", 1);
  const std::string& t = req.theorem;
  if (t == "smooth" || t == "ellipse") return TargetSpec::catalog("reciprocal-shift", {2.0}, d);
  if (t == "analytic-cube") return TargetSpec::catalog("geometric-series", {}, d);
  if (t == "hermite") return TargetSpec::catalog("cosine", {1.0}, d, Domain::gaussian());
  if (t == "lp") return TargetSpec::catalog("abs-power", {0.5}, d, Domain::symmetric());
  throw InvalidArgument("theorem '" + t + "' takes no catalog target");
}

BuildReport build_from_request(const BuildRequest& req) {
  const std::string& t = req.theorem;
  const std::size_t d = req.count("d", 1);
  auto target = [&] { return req.target ? *req.target : default_target(req); };
  if (t == "poly") {
    if (req.coeffs.size() < 2) throw InvalidArgument("poly needs coeffs a_0..a_n with n >= 1");
    return build_poly1d(req.coeffs, req.count("H", 8));
  }
  if (t == "polyNd") {
    if (!req.target || req.target->kind() != TargetKind::kExplicitPolynomial)
      throw InvalidArgument("polyNd needs an explicit polynomial target");
    return build_polyNd(req.target->explicit_coeffs(), req.count("H", 8));
  }
  if (t == "smooth") return build_smooth1d(target(), req.count("N", 8));
  if (t == "analytic-cube")
    return build_analytic_cube(target(), req.count("N", 8), req.get("delta", 0.5), d);
  if (t == "ellipse")
    return build_analytic_ellipse(target(), req.count("N", 8), req.get("rho", 2.4), d);
  if (t == "clipped-hermite") {
    return build_clipped_hermite(req.count("n", 2), req.get("M", 4.0), req.get("delta", 0.5),
                                 req.count("H", 10));
  }
  if (t == "hermite") {
    std::vector<double> beta = req.beta.empty() ? std::vector<double>{1.0} : req.beta;
    return build_hermite_gauss(target(), req.count("N", 4), d, beta);
  }
  if (t == "trig") {
    TrigKind kind;
    if (req.kind == "cos") {
      kind = TrigKind::kCos;
    } else if (req.kind == "sin") {
      kind = TrigKind::kSin;
    } else {
      throw InvalidArgument("trig kind must be cos or sin");
    }
    return build_trig(req.count("k", 1), req.count("N", 8), kind);
  }
  if (t == "lp") {
    LpBuildOptions opt;
    opt.nodes = req.count("nodes", 0);
    return build_lp(target(), req.count("N1", 16), req.count("N2", 24), req.count("r", 2), d,
                    opt);
  }
  throw InvalidArgument("unknown theorem id '" + t + "'");
}

ScalarField reference_field(const BuildRequest& req) {
  const std::string& t = req.theorem;
  if (t == "poly") {
    std::vector<double> c = req.coeffs;
    return [c](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) s = s * x[0] + c[k];
      return s;
    };
  }
  if (t == "trig") {
    const double w = std::numbers::pi * static_cast<double>(req.count("k", 1));
    if (req.kind == "sin") return [w](std::span<const double> x) { return std::sin(w * x[0]); };
    return [w](std::span<const double> x) { return std::cos(w * x[0]); };
  }
  if (t == "clipped-hermite") {
    const std::size_t n = req.count("n", 2);
    return [n](std::span<const double> x) { return hermite_eval(n, x[0]); };
  }
  const TargetSpec target = req.target ? *req.target : default_target(req);
  if (t == "polyNd") {
    PolyND p = target.explicit_coeffs();
    return [p](std::span<const double> x) { return p(x); };
  }
  return [target](std::span<const double> x) { return target(x); };
}

}  // namespace relu3d
