#pragma once

#include <cstddef>

#include "relu3d/net3d.hpp"

namespace relu3d {

struct GadgetParams {
  std::size_t H = 0;
  double M = 1.0;
  std::size_t d = 1;
  double delta = 0.5;
  // Throws InvalidArgument unless M > 0, d >= 1 and 0 < delta < M.
  void validate() const;
};

// Tent iterate g_s on [0,1]: one layer, s floors of two neurons.
Net3D sawtooth_net(std::size_t s);

// Interpolant of x^2 on the dyadic grid of step 2^-H; error 2^-2(H+1) on [0,1].
Net3D square_net(std::size_t H);

// Approximate product on [0,1]^2; error at most 6 * 2^-2(H+1).
Net3D product2_unit(std::size_t H);

// Approximate d-fold product on [-M,M]^d: width 4+d, depth d-1, height H+1.
// d < 2 yields the identity on the single input.
Net3D product_d_net(std::size_t d, std::size_t H, double M);

// Outputs h_1..h_n with h_k ~ x^k on [0,1].
Net3D power_chain_net(std::size_t n, std::size_t H);

// g_s(k |x| / 2^s) with s = ceil(log2 k); so cos(pi * out) = cos(k pi x).
Net3D periodic_fold_net(std::size_t k);

// Two outputs: the clipped identity and the clipped indicator on [-M,M].
Net3D clip_window_net(double M, double delta);

// Smallest s with 2^s >= k.
std::size_t ceil_log2(std::size_t k);

}  // namespace relu3d
