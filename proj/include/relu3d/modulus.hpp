#pragma once

#include <cstddef>
#include <limits>

#include "relu3d/target.hpp"

namespace relu3d {

constexpr double kSupNorm = std::numeric_limits<double>::infinity();

struct ModulusOptions {
  double half_period = 1.0;  // f is extended with period 2T from [-T,T]^d
  std::size_t steps = 32;    // geometric samples h = t 2^(-i/4)
  std::size_t nodes = 0;     // per dimension; 0 picks 4096 (d = 1) or 256
};

// Estimate of sup over directions and 0 < h <= t of the L^p norm of the
// r-th forward difference of the periodic extension; p = kSupNorm for sup.
double modulus_smoothness(const TargetSpec& target, std::size_t r, double t, double p,
                          std::size_t d, const ModulusOptions& opt = {});

}  // namespace relu3d
