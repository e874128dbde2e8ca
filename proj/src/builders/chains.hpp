#pragma once

// Layer-stepped sub-networks shared by the builders. Each object emits its
// neurons into whichever layer is currently open, so several of them can run
// side by side in the same layers.

#include <cstddef>
#include <map>
#include <set>
#include <vector>

#include "relu3d/assembler.hpp"
#include "relu3d/poly.hpp"

namespace relu3d::detail {

std::size_t product_unit_neurons(std::size_t H);

// Polynomial on [0,1]^d. Monomials x^j are built as x_i * h_{j - e_i} with i
// the first nonzero coordinate of j; one degree per layer. A single
// accumulator neuron carries the running partial sum, offset to stay
// nonnegative. Inputs are affine forms over the layer before the first step.
class PolyChain {
 public:
  PolyChain(std::vector<Affine> inputs, const PolyND& p, std::size_t H,
            std::set<MultiIndex> support);

  // Every index of total degree <= n.
  static std::set<MultiIndex> full_support(std::size_t d, std::size_t n);
  // Indices with nonzero coefficient, closed under taking parents.
  static std::set<MultiIndex> needed_support(const PolyND& p);
  // x_i^t for every i and 1 <= t <= n.
  static std::set<MultiIndex> pure_powers(std::size_t d, std::size_t n);

  std::size_t degree() const { return degree_; }
  std::size_t steps() const { return degree_ >= 2 ? degree_ - 1 : 0; }
  std::size_t steps_done() const { return done_; }
  // Widest floor of any step and number of floors used per step.
  std::size_t width() const;
  std::size_t height() const { return H_ == 0 ? 1 : H_; }

  void step(NetAssembler& a, std::size_t base = 0);
  Affine result() const;

 private:
  std::size_t d_;
  std::size_t H_;
  std::size_t degree_ = 0;
  std::size_t done_ = 0;
  double offset_ = 0.0;
  PolyND p_;
  std::map<std::size_t, std::vector<MultiIndex>> by_degree_;
  std::vector<Affine> x_;
  std::map<MultiIndex, Affine> top_;  // monomials of degree done_ + 1
  Affine acc_;
};

// Polynomials in one variable on [-M,M], evaluated at the clipped input and
// forced to zero outside [-M,M]. Layer 1 holds the clip window; each further
// layer raises the power chain of u = xi/M by one degree. Each polynomial
// gets its own accumulator; result(i) equals P_i(xi) - P_i(0)(1 - chi) up to
// the product-gadget error.
class ClippedChain {
 public:
  ClippedChain(Affine x, std::vector<std::vector<double>> polys, double M, double delta,
               std::size_t H, std::size_t length);

  std::size_t length() const { return length_; }
  std::size_t layers_done() const { return done_; }
  std::size_t width() const;  // widest floor over the chain layers

  void step(NetAssembler& a, std::size_t base = 0);
  Affine result(std::size_t i) const;
  std::size_t count() const { return polys_.size(); }

 private:
  Affine x_;
  std::vector<std::vector<double>> polys_;
  std::vector<double> offset_;
  double M_;
  double delta_;
  std::size_t H_;
  std::size_t length_;
  std::size_t done_ = 0;
  Affine xi_, chi_, u_, k_;
  std::vector<Affine> acc_;
};

// Folded arguments z in [0,1] with cos(pi z) reproducing cos(k pi x) or, as a
// signed pair, sin(k pi x) = S(sigma(x)) - S(sigma(-x)) with
// S(t) = cos(k pi (t - 1/(2k))). Emitted into the open layer; `pos` and `neg`
// are sigma(x) and sigma(-x) living on floor 0 of that layer.
struct FoldedVar {
  Affine z;
  double sign = 1.0;
};
std::vector<FoldedVar> fold_cos(NetAssembler& a, const Affine& pos, const Affine& neg,
                                std::size_t k);
std::vector<FoldedVar> fold_sin(NetAssembler& a, const Affine& pos, const Affine& neg,
                                std::size_t k);
// Floors used by the folds (including floor 0).
std::size_t fold_cos_height(std::size_t k);
std::size_t fold_sin_height(std::size_t k);

}  // namespace relu3d::detail
