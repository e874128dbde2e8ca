#pragma once

// Single-layer building blocks emitted into the currently open layer of a
// NetAssembler. Each returns affine forms over nodes of that layer.

#include <cstddef>
#include <vector>

#include "relu3d/assembler.hpp"

namespace relu3d::gadgets {

// Tent iterates g_1..g_s of z in [0,1], one floor per iterate starting at
// `base`. `identity` is sigma(z), which equals z on [0,1].
struct SawtoothChain {
  Affine identity;
  std::vector<Affine> g;  // g[j-1] = g_j(z)
};
SawtoothChain sawtooth_chain(NetAssembler& a, std::size_t base, const Affine& z,
                             std::size_t s);

// Piecewise linear interpolant of z^2 on the grid of step 2^-H, z in [0,1].
// Occupies floors base .. base + max(H,1) - 1, two neurons per floor.
Affine square_unit(NetAssembler& a, std::size_t base, const Affine& z, std::size_t H);

// Approximate product on [0,1]^2, six neurons per floor.
Affine product_unit(NetAssembler& a, std::size_t base, const Affine& x, const Affine& y,
                    std::size_t H);

// Approximate t^2 for t in [-1,1]; floors base .. base + H.
Affine square_sym(NetAssembler& a, std::size_t base, const Affine& t, std::size_t H);

// Approximate product on [-M,M]^2: M^2 * P(x/M, y/M) with P built from
// square_sym; floors base .. base + H, six neurons per floor.
Affine product_sym(NetAssembler& a, std::size_t base, const Affine& x, const Affine& y,
                   std::size_t H, double M);

// sigma(x) + sigma(-x), two neurons on `floor`.
Affine abs_value(NetAssembler& a, std::size_t floor, const Affine& x);

// Clip window on [-M,M] with ramp width delta: four neurons on `floor`.
struct ClipWindow {
  Affine xi;   // x on [-M+delta, M-delta], 0 outside [-M,M]
  Affine chi;  // 1 on [-M+delta, M-delta], 0 outside [-M,M]
};
ClipWindow clip_window(NetAssembler& a, std::size_t floor, const Affine& x, double M,
                       double delta);

// Lockstep realization of the d-fold product x_1 * ... * x_d on [-M,M]^d by
// the recursion P_k = P_2(P_{k-1}, x_k), one layer per step. Factors are
// affine forms over the layer preceding the first step.
class ProductTree {
 public:
  ProductTree(std::vector<Affine> factors, std::size_t H, double M);
  std::size_t steps() const { return total_steps_; }
  std::size_t steps_done() const { return done_; }
  // Emits the next layer's neurons starting at floor `base`.
  void step(NetAssembler& a, std::size_t base = 0);
  // Available once steps_done() == steps().
  Affine result() const;

 private:
  std::size_t H_;
  double M_;
  std::size_t d_;
  std::size_t total_steps_;
  std::size_t done_ = 0;
  Affine partial_;
  std::vector<Affine> remaining_;
};

}  // namespace relu3d::gadgets
