#include "relu3d/assembler.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace relu3d {

Affine& Affine::operator+=(const Affine& o) {
  constant += o.constant;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

Affine& Affine::operator-=(const Affine& o) {
  constant -= o.constant;
  for (const auto& [n, c] : o.terms) terms.push_back({n, -c});
  return *this;
}

Affine& Affine::operator*=(double s) {
  constant *= s;
  for (auto& t : terms) t.second *= s;
  return *this;
}

Affine operator+(Affine a, const Affine& b) { return a += b; }
Affine operator-(Affine a, const Affine& b) { return a -= b; }
Affine operator-(Affine a) { return a *= -1.0; }
Affine operator*(Affine a, double s) { return a *= s; }
Affine operator*(double s, Affine a) { return a *= s; }

namespace {

// Merges duplicate nodes in first-appearance order of sorted keys.
std::map<std::pair<std::uint32_t, std::uint32_t>, double> collect(const Affine& a) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> out;
  for (const auto& [n, c] : a.terms) out[{n.layer, n.id}] += c;
  return out;
}

}  // namespace

NetAssembler::NetAssembler(std::size_t input_dim) : input_dim_(input_dim) {
  if (input_dim == 0) throw InvalidArgument("assembler: input_dim must be positive");
}

Node NetAssembler::input(std::size_t i) const {
  if (i >= input_dim_) throw InvalidArgument("assembler: input index out of range");
  return {0, static_cast<std::uint32_t>(i)};
}

std::uint32_t NetAssembler::open_layer() {
  layers_.emplace_back();
  return current_layer();
}

Node NetAssembler::relu(std::size_t floor, const Affine& pre) {
  if (layers_.empty()) throw InvalidArgument("assembler: no open layer");
  const std::uint32_t cur = current_layer();
  auto& layer = layers_.back();
  for (const auto& [n, c] : pre.terms) {
    if (n.layer + 1 == cur) {
      const std::size_t size = n.layer == 0 ? input_dim_ : layers_[n.layer - 1].size();
      if (n.id >= size) throw InvalidArgument("assembler: unknown source node");
    } else if (n.layer == cur) {
      if (n.id >= layer.size()) throw InvalidArgument("assembler: unknown same-layer node");
      if (layer[n.id].floor > floor)
        throw InvalidArgument("assembler: intra-link from floor " +
                              std::to_string(layer[n.id].floor) + " into floor " +
                              std::to_string(floor));
    } else {
      throw InvalidArgument("assembler: term skips a layer; carry it first");
    }
  }
  layer.push_back({floor, pre});
  return {cur, static_cast<std::uint32_t>(layer.size() - 1)};
}

Affine NetAssembler::carry_nonneg(std::size_t floor, const Affine& v) {
  return Affine(relu(floor, v));
}

Affine NetAssembler::carry_bounded(std::size_t floor, const Affine& v, double c) {
  return Affine(relu(floor, v + c)) - c;
}

Affine NetAssembler::carry_signed(std::size_t floor, const Affine& v) {
  return Affine(relu(floor, v)) - Affine(relu(floor, -v));
}

Net3D NetAssembler::finish(const std::vector<Affine>& outputs) const {
  const std::size_t depth = layers_.size();
  // position[k][id] = (compact floor, index within floor), flat[k][id] = flat index
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> position(depth);
  std::vector<std::vector<std::size_t>> flat(depth);
  std::vector<Layer> layers(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    const auto& pend = layers_[k];
    if (pend.empty()) throw InvalidArgument("assembler: layer " + std::to_string(k + 1) + " is empty");
    std::vector<std::size_t> order(pend.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pend[a].floor < pend[b].floor; });
    position[k].resize(pend.size());
    flat[k].resize(pend.size());
    std::size_t compact = 0, within = 0;
    for (std::size_t p = 0; p < order.size(); ++p) {
      if (p > 0 && pend[order[p]].floor != pend[order[p - 1]].floor) {
        ++compact;
        within = 0;
      }
      position[k][order[p]] = {compact, within++};
      flat[k][order[p]] = p;
    }
    layers[k].floors.resize(compact + 1);
  }
  auto source_index = [&](std::uint32_t layer, std::uint32_t id) -> std::size_t {
    return layer == 0 ? id : flat[layer - 1][id];
  };
  for (std::size_t k = 0; k < depth; ++k) {
    const auto& pend = layers_[k];
    std::vector<Neuron> built(pend.size());
    for (std::size_t id = 0; id < pend.size(); ++id) {
      Neuron& n = built[id];
      n.bias = pend[id].pre.constant;
      std::map<std::size_t, double> inbound;
      for (const auto& [key, c] : collect(pend[id].pre)) {
        if (c == 0.0) continue;
        if (key.first == k + 1) {
          const auto [f, i] = position[k][key.second];
          n.intra.push_back({f, i, c});
        } else {
          inbound[source_index(key.first, key.second)] += c;
        }
      }
      for (const auto& [i, w] : inbound)
        if (w != 0.0) n.inbound.push_back({i, w});
      std::sort(n.intra.begin(), n.intra.end(), [](const IntraLink& a, const IntraLink& b) {
        return a.floor != b.floor ? a.floor < b.floor : a.index < b.index;
      });
    }
    for (std::size_t id = 0; id < pend.size(); ++id) {
      const auto [f, i] = position[k][id];
      auto& neurons = layers[k].floors[f].neurons;
      if (neurons.size() <= i) neurons.resize(i + 1);
      neurons[i] = std::move(built[id]);
    }
  }
  std::vector<Readout> outs;
  for (const auto& a : outputs) {
    Readout r;
    r.bias = a.constant;
    std::map<std::size_t, double> acc;
    for (const auto& [key, c] : collect(a)) {
      if (key.first != depth)
        throw InvalidArgument("assembler: output references a non-final layer");
      acc[source_index(key.first, key.second)] += c;
    }
    for (const auto& [i, w] : acc)
      if (w != 0.0) r.weights.push_back({i, w});
    outs.push_back(std::move(r));
  }
  return Net3D(input_dim_, std::move(layers), std::move(outs));
}

}  // namespace relu3d
