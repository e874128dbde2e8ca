#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relu3d/builders.hpp"
#include "relu3d/target.hpp"

namespace relu3d {

using ScalarField = std::function<double(std::span<const double>)>;

// A parameter document naming one builder:
//   {"theorem_id": "lp", "target": {...}, "params": {"N1": 16, "N2": 24,
//    "r": 2, "d": 1, "beta": [1.0], "kind": "sin"}, "coeffs": [...]}
// theorem_id in {poly, polyNd, smooth, analytic-cube, ellipse,
// clipped-hermite, hermite, trig, lp}.
struct BuildRequest {
  std::string theorem;
  std::optional<TargetSpec> target;
  std::map<std::string, double> params;
  std::vector<double> coeffs;  // poly: a_0..a_n
  std::vector<double> beta;
  std::string kind = "cos";    // trig: cos | sin

  double get(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
};

BuildRequest parse_build_request(const std::string& json_text);
std::string build_request_to_json(const BuildRequest& req);

// Target used when the request names none.
TargetSpec default_target(const BuildRequest& req);
BuildReport build_from_request(const BuildRequest& req);
// The function the built network approximates.
ScalarField reference_field(const BuildRequest& req);

}  // namespace relu3d
