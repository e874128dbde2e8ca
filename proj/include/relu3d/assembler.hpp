#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "relu3d/net3d.hpp"

namespace relu3d {

// Handle to a value inside a network under construction. Layer 0 is the input
// vector; hidden layers are numbered from 1.
struct Node {
  std::uint32_t layer = 0;
  std::uint32_t id = 0;
  bool operator==(const Node&) const = default;
};

// constant + sum coeff * node
struct Affine {
  double constant = 0.0;
  std::vector<std::pair<Node, double>> terms;

  Affine() = default;
  Affine(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  Affine(Node n) : terms{{n, 1.0}} {}  // NOLINT(google-explicit-constructor)

  Affine& operator+=(const Affine& o);
  Affine& operator-=(const Affine& o);
  Affine& operator*=(double s);
};

Affine operator+(Affine a, const Affine& b);
Affine operator-(Affine a, const Affine& b);
Affine operator-(Affine a);
Affine operator*(Affine a, double s);
Affine operator*(double s, Affine a);

// Builds a Net3D one hidden layer at a time. A neuron's pre-activation may
// reference nodes of the previous layer (inbound weights) and nodes already
// placed in the current layer on the same or a lower floor (intra-links).
// Floors that end up empty are dropped when the net is finished.
class NetAssembler {
 public:
  explicit NetAssembler(std::size_t input_dim);

  Node input(std::size_t i) const;
  std::size_t input_dim() const { return input_dim_; }

  // Starts a new hidden layer; returns its index (1-based).
  std::uint32_t open_layer();
  std::uint32_t current_layer() const { return static_cast<std::uint32_t>(layers_.size()); }

  Node relu(std::size_t floor, const Affine& pre);

  // sigma(v) for v >= 0.
  Affine carry_nonneg(std::size_t floor, const Affine& v);
  // sigma(v + c) - c for v >= -c.
  Affine carry_bounded(std::size_t floor, const Affine& v, double c);
  // sigma(v) - sigma(-v) for any v.
  Affine carry_signed(std::size_t floor, const Affine& v);

  Net3D finish(const std::vector<Affine>& outputs) const;

 private:
  struct Pending {
    std::size_t floor;
    Affine pre;
  };
  std::size_t input_dim_;
  std::vector<std::vector<Pending>> layers_;
};

}  // namespace relu3d
