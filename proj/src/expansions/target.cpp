#include "relu3d/target.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "relu3d/errors.hpp"
#include "relu3d/numerics.hpp"

namespace relu3d {

namespace {

const std::set<std::string> kCatalog = {
    "constant", "identity",   "power", "square", "product", "reciprocal-shift",
    "geometric-series", "scaled-exponential", "cosine", "runge", "abs-power", "step",
    "sign"};

double param_or(const std::vector<double>& p, std::size_t i, double def) {
  return i < p.size() ? p[i] : def;
}

double factorial(std::size_t k) { return std::tgamma(double(k) + 1.0); }

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TargetSpec TargetSpec::polynomial(PolyND p, Domain domain) {
  p.validate();
  TargetSpec t;
  t.kind_ = TargetKind::kExplicitPolynomial;
  t.id_ = "polynomial";
  t.dim_ = p.d;
  t.domain_ = domain;
  t.poly_ = std::move(p);
  return t;
}

TargetSpec TargetSpec::power_series(PolyND coefficients, Domain domain) {
  TargetSpec t = polynomial(std::move(coefficients), domain);
  t.kind_ = TargetKind::kExplicitPowerSeries;
  t.id_ = "power-series";
  return t;
}

TargetSpec TargetSpec::catalog(const std::string& id, std::vector<double> params,
                               std::size_t dim, Domain domain) {
  if (!kCatalog.count(id)) throw InvalidArgument("unknown catalog target '" + id + "'");
  if (dim == 0) throw InvalidArgument("target dimension must be positive");
  for (double v : params)
    if (!std::isfinite(v)) throw InvalidArgument("catalog parameters must be finite");
  TargetSpec t;
  t.kind_ = TargetKind::kCatalog;
  t.id_ = id;
  if (id == "square") {
    t.id_ = "power";
    params = {2.0};
  }
  t.params_ = std::move(params);
  t.dim_ = dim;
  t.domain_ = domain;
  if (t.id_ == "identity" && param_or(t.params_, 0, 0) >= double(dim))
    throw InvalidArgument("identity: coordinate out of range");
  if (t.id_ == "power") {
    const double k = param_or(t.params_, 0, 2);
    if (k < 0 || k != std::floor(k)) throw InvalidArgument("power: exponent must be a natural number");
  }
  return t;
}

bool TargetSpec::separable() const {
  return kind_ == TargetKind::kCatalog && id_ != "abs-power";
}

double TargetSpec::factor(std::size_t k, double t) const {
  const auto& p = params_;
  if (id_ == "constant") return k == 0 ? param_or(p, 0, 1.0) : 1.0;
  if (id_ == "identity") return k == std::size_t(param_or(p, 0, 0)) ? t : 1.0;
  if (id_ == "power") return k == 0 ? std::pow(t, param_or(p, 0, 2)) : 1.0;
  if (id_ == "product") return t;
  if (id_ == "reciprocal-shift") return 1.0 / (t + param_or(p, 0, 2.0));
  if (id_ == "geometric-series") return 1.0 / (2.0 - t);
  if (id_ == "scaled-exponential")
    return (k == 0 ? param_or(p, 1, 1.0) : 1.0) * std::exp(param_or(p, 0, 1.0) * t);
  if (id_ == "cosine") return std::cos(param_or(p, 0, 1.0) * t);
  if (id_ == "runge") return 1.0 / (1.0 + param_or(p, 0, 25.0) * t * t);
  if (id_ == "step") return k == 0 ? (t >= param_or(p, 0, 0.0) ? 1.0 : 0.0) : 1.0;
  if (id_ == "sign") return k == 0 ? double((t > 0) - (t < 0)) : 1.0;
  throw InvalidArgument("target '" + id_ + "' is not separable");
}

double TargetSpec::eval_raw(std::span<const double> x) const {
  if (kind_ != TargetKind::kCatalog) return poly_(x);
  if (id_ == "abs-power") {
    const double alpha = param_or(params_, 0, 1.0);
    double s = 0.0;
    for (double v : x) s += std::pow(std::abs(v), alpha);
    return s;
  }
  double prod = 1.0;
  for (std::size_t k = 0; k < dim_; ++k) prod *= factor(k, x[k]);
  return prod;
}

double TargetSpec::operator()(std::span<const double> x) const {
  if (x.size() != dim_) throw InvalidArgument("target: wrong input dimension");
  if (parity_.empty()) return eval_raw(x);
  std::vector<double> y(dim_);
  double s = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << dim_); ++mask) {
    double sign = 1.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const bool flip = (mask >> k) & 1;
      y[k] = flip ? -x[k] : x[k];
      if (flip && parity_[k] == 1) sign = -sign;
    }
    s += sign * eval_raw(y);
  }
  return std::ldexp(s, -static_cast<int>(dim_));
}

double TargetSpec::at(double x) const {
  const double v[1] = {x};
  return (*this)(std::span<const double>(v, 1));
}

TargetSpec TargetSpec::with_parity(std::vector<int> eta) const {
  if (eta.size() != dim_) throw InvalidArgument("with_parity: wrong length");
  for (int e : eta)
    if (e != 0 && e != 1) throw InvalidArgument("with_parity: entries must be 0 or 1");
  if (!parity_.empty()) throw InvalidArgument("with_parity: already a parity component");
  TargetSpec t = *this;
  t.parity_ = std::move(eta);
  return t;
}

TargetSpec TargetSpec::with_domain(Domain domain) const {
  TargetSpec t = *this;
  t.domain_ = domain;
  return t;
}

bool TargetSpec::has_series() const {
  if (!parity_.empty()) return false;
  if (kind_ != TargetKind::kCatalog) return true;
  if (id_ == "runge") return param_or(params_, 0, 25.0) < 1.0;
  return !(id_ == "abs-power" || id_ == "step" || id_ == "sign");
}

PolyND TargetSpec::series(std::size_t N) const {
  if (!has_series()) throw InvalidArgument("target '" + id_ + "' has no closed-form series");
  PolyND out(dim_, N);
  if (kind_ != TargetKind::kCatalog) {
    for (const auto& [j, a] : poly_.coeffs)
      if (total_degree(j) <= N) out.add(j, a);
    return out;
  }
  const auto& p = params_;
  // one-variable coefficient of t^e in factor k
  auto coef = [&](std::size_t k, std::size_t e) -> double {
    if (id_ == "constant") return e == 0 ? (k == 0 ? param_or(p, 0, 1.0) : 1.0) : 0.0;
    if (id_ == "identity") {
      const bool active = k == std::size_t(param_or(p, 0, 0));
      return active ? (e == 1 ? 1.0 : 0.0) : (e == 0 ? 1.0 : 0.0);
    }
    if (id_ == "power") {
      const std::size_t pw = k == 0 ? std::size_t(param_or(p, 0, 2)) : 0;
      return e == pw ? 1.0 : 0.0;
    }
    if (id_ == "product") return e == 1 ? 1.0 : 0.0;
    if (id_ == "reciprocal-shift") {
      const double a = param_or(p, 0, 2.0);
      return (e % 2 ? -1.0 : 1.0) / std::pow(a, double(e + 1));
    }
    if (id_ == "geometric-series") return std::ldexp(1.0, -static_cast<int>(e + 1));
    if (id_ == "scaled-exponential") {
      const double c = param_or(p, 0, 1.0);
      return (k == 0 ? param_or(p, 1, 1.0) : 1.0) * std::pow(c, double(e)) / factorial(e);
    }
    if (id_ == "cosine") {
      if (e % 2) return 0.0;
      const double w = param_or(p, 0, 1.0);
      return ((e / 2) % 2 ? -1.0 : 1.0) * std::pow(w, double(e)) / factorial(e);
    }
    if (id_ == "runge") {
      if (e % 2) return 0.0;
      return std::pow(-param_or(p, 0, 25.0), double(e / 2));
    }
    return 0.0;
  };
  for (const MultiIndex& j : total_degree_indices(dim_, N)) {
    double a = 1.0;
    for (std::size_t k = 0; k < dim_ && a != 0.0; ++k) a *= coef(k, j[k]);
    if (a != 0.0) out.add(j, a);
  }
  return out;
}

double TargetSpec::series_abs_sum() const {
  if (!has_series()) return kInf;
  if (kind_ != TargetKind::kCatalog) return poly_.abs_coeff_sum();
  const auto& p = params_;
  const double d = double(dim_);
  if (id_ == "constant") return std::abs(param_or(p, 0, 1.0));
  if (id_ == "identity" || id_ == "power" || id_ == "product" || id_ == "geometric-series")
    return 1.0;
  if (id_ == "reciprocal-shift") {
    const double a = param_or(p, 0, 2.0);
    return a > 1.0 ? std::pow(1.0 / (a - 1.0), d) : kInf;
  }
  if (id_ == "scaled-exponential")
    return std::abs(param_or(p, 1, 1.0)) * std::exp(std::abs(param_or(p, 0, 1.0)) * d);
  if (id_ == "cosine") return std::pow(std::cosh(param_or(p, 0, 1.0)), d);
  if (id_ == "runge") return std::pow(1.0 / (1.0 - param_or(p, 0, 25.0)), d);
  return kInf;
}

std::optional<double> TargetSpec::derivative_bound(std::size_t k) const {
  if (dim_ != 1 || !parity_.empty()) return std::nullopt;
  if (kind_ != TargetKind::kCatalog) {
    double s = 0.0;
    for (const auto& [j, a] : poly_.coeffs)
      if (j[0] >= k) s += std::abs(a) * factorial(j[0]) / factorial(j[0] - k);
    return s;
  }
  const auto& p = params_;
  if (id_ == "constant") return k == 0 ? std::abs(param_or(p, 0, 1.0)) : 0.0;
  if (id_ == "identity") return k <= 1 ? 1.0 : 0.0;
  if (id_ == "power") {
    const std::size_t pw = std::size_t(param_or(p, 0, 2));
    return k <= pw ? factorial(pw) / factorial(pw - k) : 0.0;
  }
  if (id_ == "product") return k <= 1 ? 1.0 : 0.0;
  if (id_ == "reciprocal-shift") {
    const double a = param_or(p, 0, 2.0);
    if (a <= 0.0) return std::nullopt;
    return factorial(k) / std::pow(a, double(k + 1));
  }
  if (id_ == "geometric-series") return factorial(k);
  if (id_ == "scaled-exponential") {
    const double c = param_or(p, 0, 1.0);
    return std::abs(param_or(p, 1, 1.0)) * std::pow(std::abs(c), double(k)) * std::exp(std::max(c, 0.0));
  }
  if (id_ == "cosine") return std::pow(std::abs(param_or(p, 0, 1.0)), double(k));
  return std::nullopt;
}

bool TargetSpec::factorial_derivative_bound() const {
  for (std::size_t k = 0; k <= 60; ++k) {
    const auto b = derivative_bound(k);
    if (!b || *b > factorial(k) * (1.0 + 1e-12)) return false;
  }
  return true;
}

namespace {

struct FactorMoments {
  double inside = 0.0;   // integral over [-M,M] of g^2 phi
  double outside = 0.0;  // integral over |t| > M
};

FactorMoments factor_moments(const std::function<double(double)>& g, double M) {
  const double reach = std::max(M, 0.0) + 40.0;
  auto w = [&](double t) {
    const double v = g(t);
    return v * v * normal_pdf(t);
  };
  FactorMoments m;
  if (M > 0) m.inside = integrate(w, composite_gauss_legendre(-M, M, 512));
  const auto right = composite_gauss_legendre(std::max(M, 0.0), reach, 512);
  m.outside = integrate(w, right) + integrate([&](double t) { return w(-t); }, right);
  return m;
}

}  // namespace

std::optional<double> TargetSpec::gauss_tail_sq(double M) const {
  if (!separable() || !parity_.empty()) return std::nullopt;
  // poles on the real line
  if (id_ == "reciprocal-shift" || id_ == "geometric-series") return std::nullopt;
  if (id_ == "scaled-exponential" && std::abs(param_or(params_, 0, 1.0)) > 4.0) return std::nullopt;
  // prod full - prod inside, telescoped to avoid cancellation
  std::vector<FactorMoments> m(dim_);
  for (std::size_t k = 0; k < dim_; ++k)
    m[k] = factor_moments([&](double t) { return factor(k, t); }, M);
  CompensatedSum tail;
  for (std::size_t k = 0; k < dim_; ++k) {
    double term = m[k].outside;
    for (std::size_t l = 0; l < k; ++l) term *= m[l].inside;
    for (std::size_t l = k + 1; l < dim_; ++l) term *= m[l].inside + m[l].outside;
    tail.add(term);
  }
  return tail.value();
}

std::optional<double> TargetSpec::gauss_norm_sq() const {
  const auto t = gauss_tail_sq(0.0);
  return t;
}

std::string TargetSpec::describe() const {
  std::ostringstream os;
  os << id_;
  if (!params_.empty()) {
    os << '(';
    for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
    os << ')';
  }
  os << " d=" << dim_;
  if (!parity_.empty()) {
    os << " parity=";
    for (int e : parity_) os << e;
  }
  return os.str();
}

namespace {

using nlohmann::json;

Domain parse_domain(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "unit") return Domain::unit();
    if (s == "symmetric") return Domain::symmetric();
    if (s == "gaussian" || s == "gaussian-line") return Domain::gaussian();
    throw FormatError(path, "unknown domain '" + s + "'");
  }
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    const double lo = j[0].get<double>(), hi = j[1].get<double>();
    if (!(lo < hi)) throw FormatError(path, "empty interval");
    return Domain::shifted(lo, hi);
  }
  throw FormatError(path, "expected a domain name or [lo, hi]");
}

json domain_json(const Domain& d) {
  switch (d.kind) {
    case DomainKind::kUnitCube: return "unit";
    case DomainKind::kSymmetricCube: return "symmetric";
    case DomainKind::kGaussian: return "gaussian";
    case DomainKind::kShiftedCube: return json::array({d.lo, d.hi});
  }
  return "unit";
}

}  // namespace

TargetSpec parse_target(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("", "target must be an object");
  std::size_t dim = 1;
  if (j.contains("dimension")) {
    if (!j["dimension"].is_number_unsigned() || j["dimension"].get<std::size_t>() == 0)
      throw FormatError("/dimension", "expected a positive integer");
    dim = j["dimension"].get<std::size_t>();
  }
  Domain domain = j.contains("domain") ? parse_domain(j["domain"], "/domain") : Domain::unit();
  try {
    if (j.contains("catalog_id")) {
      if (!j["catalog_id"].is_string()) throw FormatError("/catalog_id", "expected a string");
      std::vector<double> params;
      if (j.contains("params")) {
        if (!j["params"].is_array()) throw FormatError("/params", "expected an array");
        for (std::size_t i = 0; i < j["params"].size(); ++i) {
          if (!j["params"][i].is_number())
            throw FormatError("/params/" + std::to_string(i), "expected a number");
          params.push_back(j["params"][i].get<double>());
        }
      }
      return TargetSpec::catalog(j["catalog_id"].get<std::string>(), params, dim, domain);
    }
    if (!j.contains("coeffs") || !j["coeffs"].is_array())
      throw FormatError("/coeffs", "expected catalog_id or a coeffs array");
    std::size_t degree = 0;
    for (const auto& e : j["coeffs"])
      if (e.is_array() && e.size() == dim + 1) {
        std::size_t tot = 0;
        for (std::size_t k = 0; k < dim; ++k)
          if (e[k].is_number_unsigned()) tot += e[k].get<std::size_t>();
        degree = std::max(degree, tot);
      }
    if (j.contains("degree") && j["degree"].is_number_unsigned())
      degree = std::max(degree, j["degree"].get<std::size_t>());
    PolyND p(dim, degree);
    for (std::size_t i = 0; i < j["coeffs"].size(); ++i) {
      const auto& e = j["coeffs"][i];
      const std::string path = "/coeffs/" + std::to_string(i);
      if (!e.is_array() || e.size() != dim + 1) throw FormatError(path, "expected [j_1..j_d, a]");
      MultiIndex idx(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        if (!e[k].is_number_unsigned()) throw FormatError(path, "exponents must be natural numbers");
        idx[k] = e[k].get<std::size_t>();
      }
      if (!e[dim].is_number()) throw FormatError(path, "coefficient must be a number");
      p.add(idx, e[dim].get<double>());
    }
    const std::string kind = j.value("kind", std::string("polynomial"));
    if (kind == "power-series") return TargetSpec::power_series(std::move(p), domain);
    if (kind != "polynomial") throw FormatError("/kind", "unknown kind '" + kind + "'");
    return TargetSpec::polynomial(std::move(p), domain);
  } catch (const InvalidArgument& e) {
    throw FormatError("", e.what());
  }
}

std::string target_to_json(const TargetSpec& t) {
  json j;
  j["dimension"] = t.dim();
  j["domain"] = domain_json(t.domain());
  if (t.kind() == TargetKind::kCatalog) {
    j["catalog_id"] = t.id();
    j["params"] = t.params();
  } else {
    j["kind"] = t.kind() == TargetKind::kExplicitPolynomial ? "polynomial" : "power-series";
    j["degree"] = t.explicit_coeffs().n;
    json arr = json::array();
    for (const auto& [idx, a] : t.explicit_coeffs().coeffs) {
      json e = json::array();
      for (auto v : idx) e.push_back(v);
      e.push_back(a);
      arr.push_back(e);
    }
    j["coeffs"] = arr;
  }
  return j.dump();
}

}  // namespace relu3d
