#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "relu3d/errors.hpp"

namespace relu3d {

struct WeightEntry {
  std::size_t index = 0;
  double weight = 0.0;
};

// Adds coeff * activation(floor, index) of the same layer to the pre-activation.
struct IntraLink {
  std::size_t floor = 0;
  std::size_t index = 0;
  double coeff = 0.0;
};

struct Neuron {
  std::vector<WeightEntry> inbound;  // sparse, indices into previous layer
  double bias = 0.0;
  std::vector<IntraLink> intra;
};

struct Floor {
  std::vector<Neuron> neurons;
};

struct Layer {
  std::vector<Floor> floors;
  std::size_t size() const;
};

// Affine map over the last layer's flattened outputs (or the input when
// there are no hidden layers).
struct Readout {
  std::vector<WeightEntry> weights;
  double bias = 0.0;
};

struct SizeMetrics {
  std::size_t width = 0;
  std::size_t depth = 0;
  std::size_t height = 0;
  std::size_t neuron_count = 0;
  std::size_t param_count = 0;
  bool operator==(const SizeMetrics&) const = default;
};

class Net3D {
 public:
  // Validates every structural invariant; throws InvalidArgument.
  Net3D(std::size_t input_dim, std::vector<Layer> layers,
        std::vector<Readout> readouts);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return readouts_.size(); }
  std::size_t depth() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  const std::vector<Readout>& readouts() const { return readouts_; }

  // Flattened size of hidden layer k; layer_size(-1) style access to the
  // input is provided through source_size.
  std::size_t layer_size(std::size_t k) const { return sizes_[k]; }
  // Size of the vector feeding layer k (input_dim for k == 0); k == depth()
  // gives the vector feeding the readout.
  std::size_t source_size(std::size_t k) const {
    return k == 0 ? input_dim_ : sizes_[k - 1];
  }
  std::size_t floor_offset(std::size_t layer, std::size_t floor) const {
    return offsets_[layer][floor];
  }
  std::size_t max_layer_size() const;

 private:
  std::size_t input_dim_;
  std::vector<Layer> layers_;
  std::vector<Readout> readouts_;
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<std::size_t>> offsets_;
};

// Evaluation in an arbitrary ordered field (double, rationals, ...).
// Non-finite intermediates are rejected for floating types.
template <class Scalar>
std::vector<Scalar> evaluate_as(const Net3D& net, std::span<const Scalar> x);

// Single-output evaluation. Throws if the net has more than one output.
double evaluate(const Net3D& net, std::span<const double> x);
inline double evaluate(const Net3D& net, std::initializer_list<double> x) {
  return evaluate(net, std::span<const double>(x.begin(), x.size()));
}
std::vector<double> evaluate_outputs(const Net3D& net, std::span<const double> x);

// Reusable scratch buffers for repeated double evaluation.
class Evaluator {
 public:
  explicit Evaluator(const Net3D& net);
  std::span<const double> operator()(std::span<const double> x);
  double scalar(std::span<const double> x);

 private:
  const Net3D* net_;
  std::vector<double> prev_, cur_, out_;
};

// Order preserved; work split across threads when more than one core is
// available. Results do not depend on the split.
std::vector<double> evaluate_batch(const Net3D& net,
                                   const std::vector<std::vector<double>>& points);

SizeMetrics metrics(const Net3D& net);

enum class FlattenMode {
  kMerge,           // width = sum of per-floor widths of each layer
  kPadToWidthTimesHeight  // widest layer padded with inert neurons to W*H
};
Net3D flatten_to_2d(const Net3D& net, FlattenMode mode = FlattenMode::kMerge);

// sum_i coeffs[i] * nets[i](x) + bias. All nets share input_dim and are
// single-output.
Net3D linear_combine(std::span<const Net3D> nets, std::span<const double> coeffs,
                     double bias);
// outer(inner(x)); outer.input_dim() must equal inner.output_dim().
Net3D chain(const Net3D& outer, const Net3D& inner);
// Runs the nets side by side on the same input; outputs are concatenated.
// Shallower nets are lifted with identity carries so depths agree.
Net3D parallel(std::span<const Net3D> nets);
// Zero-hidden-layer net returning its input (dim outputs).
Net3D identity_net(std::size_t dim);
// Single-output net with one layer computing sigma(x) - sigma(-x) per coordinate
// selected by `coord`.
Net3D relu_identity_net(std::size_t dim, std::size_t coord);

// ---------------------------------------------------------------------------

namespace detail {
[[noreturn]] void throw_non_finite(std::size_t layer, std::size_t floor,
                                   std::size_t neuron);
[[noreturn]] void throw_dim(std::size_t expected, std::size_t got);
}  // namespace detail

template <class Scalar>
std::vector<Scalar> evaluate_as(const Net3D& net, std::span<const Scalar> x) {
  if (x.size() != net.input_dim()) detail::throw_dim(net.input_dim(), x.size());
  std::vector<Scalar> prev(x.begin(), x.end());
  std::vector<Scalar> cur;
  const Scalar zero(0);
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const Layer& layer = net.layers()[k];
    cur.assign(net.layer_size(k), zero);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < layer.floors.size(); ++f) {
      const auto& neurons = layer.floors[f].neurons;
      for (std::size_t i = 0; i < neurons.size(); ++i, ++pos) {
        const Neuron& n = neurons[i];
        Scalar acc(n.bias);
        for (const auto& e : n.inbound) acc += Scalar(e.weight) * prev[e.index];
        for (const auto& l : n.intra)
          acc += Scalar(l.coeff) * cur[net.floor_offset(k, l.floor) + l.index];
        if constexpr (std::is_floating_point_v<Scalar>) {
          if (!__builtin_isfinite(acc)) detail::throw_non_finite(k, f, i);
        }
        cur[pos] = acc > zero ? acc : zero;
      }
    }
    prev.swap(cur);
  }
  std::vector<Scalar> out;
  out.reserve(net.output_dim());
  for (const auto& r : net.readouts()) {
    Scalar acc(r.bias);
    for (const auto& e : r.weights) acc += Scalar(e.weight) * prev[e.index];
    out.push_back(acc);
  }
  return out;
}

}  // namespace relu3d
