#include "relu3d/net3d.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

namespace relu3d {

namespace detail {

void throw_non_finite(std::size_t layer, std::size_t floor, std::size_t neuron) {
  std::ostringstream os;
  os << "non-finite pre-activation at layer " << layer << ", floor " << floor
     << ", neuron " << neuron;
  throw NumericError(os.str());
}

void throw_dim(std::size_t expected, std::size_t got) {
  std::ostringstream os;
  os << "input dimension mismatch: expected " << expected << ", got " << got;
  throw InvalidArgument(os.str());
}

}  // namespace detail

namespace {

std::string where(std::size_t k, std::size_t f, std::size_t i) {
  std::ostringstream os;
  os << "layer " << k << ", floor " << f << ", neuron " << i;
  return os.str();
}

void check_weights(const std::vector<WeightEntry>& ws, std::size_t source_size,
                   const std::string& ctx) {
  for (std::size_t j = 0; j < ws.size(); ++j) {
    if (ws[j].index >= source_size)
      throw InvalidArgument(ctx + ": inbound index out of range");
    if (j > 0 && ws[j].index <= ws[j - 1].index)
      throw InvalidArgument(ctx + ": inbound indices must be strictly increasing");
    if (!std::isfinite(ws[j].weight))
      throw InvalidArgument(ctx + ": non-finite weight");
  }
}

std::vector<WeightEntry> sparsify(const std::map<std::size_t, double>& acc) {
  std::vector<WeightEntry> out;
  for (const auto& [i, w] : acc)
    if (w != 0.0) out.push_back({i, w});
  return out;
}

// Substitutes the inner readouts into an affine form over inner outputs.
Readout compose_affine(const std::vector<WeightEntry>& w, double b,
                       const std::vector<Readout>& inner) {
  std::map<std::size_t, double> acc;
  double bias = b;
  for (const auto& e : w) {
    const Readout& r = inner[e.index];
    bias += e.weight * r.bias;
    for (const auto& re : r.weights) acc[re.index] += e.weight * re.weight;
  }
  return {sparsify(acc), bias};
}

// Appends a layer carrying every output o as sigma(R_o) - sigma(-R_o).
Net3D add_carry_layer(const Net3D& net) {
  Layer layer;
  layer.floors.resize(1);
  std::vector<Readout> outs;
  for (std::size_t o = 0; o < net.output_dim(); ++o) {
    const Readout& r = net.readouts()[o];
    Neuron pos{r.weights, r.bias, {}};
    Neuron neg{r.weights, -r.bias, {}};
    for (auto& e : neg.inbound) e.weight = -e.weight;
    layer.floors[0].neurons.push_back(std::move(pos));
    layer.floors[0].neurons.push_back(std::move(neg));
    outs.push_back({{{2 * o, 1.0}, {2 * o + 1, -1.0}}, 0.0});
  }
  std::vector<Layer> layers = net.layers();
  layers.push_back(std::move(layer));
  return Net3D(net.input_dim(), std::move(layers), std::move(outs));
}

}  // namespace

std::size_t Layer::size() const {
  std::size_t s = 0;
  for (const auto& f : floors) s += f.neurons.size();
  return s;
}

Net3D::Net3D(std::size_t input_dim, std::vector<Layer> layers,
             std::vector<Readout> readouts)
    : input_dim_(input_dim), layers_(std::move(layers)), readouts_(std::move(readouts)) {
  if (input_dim_ == 0) throw InvalidArgument("input_dim must be positive");
  if (readouts_.empty()) throw InvalidArgument("network needs at least one readout");
  std::size_t src = input_dim_;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Layer& layer = layers_[k];
    if (layer.floors.empty()) throw InvalidArgument(where(k, 0, 0) + ": empty layer");
    std::vector<std::size_t> off;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < layer.floors.size(); ++f) {
      const auto& neurons = layer.floors[f].neurons;
      if (neurons.empty()) throw InvalidArgument(where(k, f, 0) + ": empty floor");
      off.push_back(pos);
      for (std::size_t i = 0; i < neurons.size(); ++i) {
        const Neuron& n = neurons[i];
        const std::string ctx = where(k, f, i);
        check_weights(n.inbound, src, ctx);
        if (!std::isfinite(n.bias)) throw InvalidArgument(ctx + ": non-finite bias");
        for (const auto& l : n.intra) {
          const bool earlier = l.floor < f || (l.floor == f && l.index < i);
          if (!earlier)
            throw InvalidArgument(ctx + ": intra-link source must precede target");
          if (l.index >= layer.floors[l.floor].neurons.size())
            throw InvalidArgument(ctx + ": intra-link index out of range");
          if (!std::isfinite(l.coeff))
            throw InvalidArgument(ctx + ": non-finite intra coefficient");
        }
      }
      pos += neurons.size();
    }
    offsets_.push_back(std::move(off));
    sizes_.push_back(pos);
    src = pos;
  }
  for (std::size_t o = 0; o < readouts_.size(); ++o) {
    check_weights(readouts_[o].weights, src, "readout " + std::to_string(o));
    if (!std::isfinite(readouts_[o].bias))
      throw InvalidArgument("readout " + std::to_string(o) + ": non-finite bias");
  }
}

std::size_t Net3D::max_layer_size() const {
  std::size_t m = 0;
  for (auto s : sizes_) m = std::max(m, s);
  return m;
}

Evaluator::Evaluator(const Net3D& net) : net_(&net) {
  const std::size_t cap = std::max(net.input_dim(), net.max_layer_size());
  prev_.reserve(cap);
  cur_.reserve(cap);
  out_.resize(net.output_dim());
}

std::span<const double> Evaluator::operator()(std::span<const double> x) {
  const Net3D& net = *net_;
  if (x.size() != net.input_dim()) detail::throw_dim(net.input_dim(), x.size());
  prev_.assign(x.begin(), x.end());
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const Layer& layer = net.layers()[k];
    cur_.assign(net.layer_size(k), 0.0);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < layer.floors.size(); ++f) {
      const auto& neurons = layer.floors[f].neurons;
      for (std::size_t i = 0; i < neurons.size(); ++i, ++pos) {
        const Neuron& n = neurons[i];
        double acc = n.bias;
        for (const auto& e : n.inbound) acc += e.weight * prev_[e.index];
        for (const auto& l : n.intra)
          acc += l.coeff * cur_[net.floor_offset(k, l.floor) + l.index];
        if (!std::isfinite(acc)) detail::throw_non_finite(k, f, i);
        cur_[pos] = acc > 0.0 ? acc : 0.0;
      }
    }
    prev_.swap(cur_);
  }
  for (std::size_t o = 0; o < net.output_dim(); ++o) {
    const Readout& r = net.readouts()[o];
    double acc = r.bias;
    for (const auto& e : r.weights) acc += e.weight * prev_[e.index];
    out_[o] = acc;
  }
  return out_;
}

double Evaluator::scalar(std::span<const double> x) {
  if (net_->output_dim() != 1)
    throw InvalidArgument("scalar evaluation of a multi-output network");
  return (*this)(x)[0];
}

double evaluate(const Net3D& net, std::span<const double> x) {
  return Evaluator(net).scalar(x);
}

std::vector<double> evaluate_outputs(const Net3D& net, std::span<const double> x) {
  Evaluator ev(net);
  auto out = ev(x);
  return {out.begin(), out.end()};
}

std::vector<double> evaluate_batch(const Net3D& net,
                                   const std::vector<std::vector<double>>& points) {
  std::vector<double> out(points.size());
  if (points.empty()) return out;
  if (net.output_dim() != 1)
    throw InvalidArgument("batch evaluation of a multi-output network");
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads = std::min<std::size_t>(hw, (points.size() + 255) / 256);
  auto work = [&](std::size_t lo, std::size_t hi) {
    Evaluator ev(net);
    for (std::size_t i = lo; i < hi; ++i) out[i] = ev.scalar(points[i]);
  };
  if (nthreads <= 1) {
    work(0, points.size());
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nthreads);
  const std::size_t chunk = (points.size() + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(points.size(), lo + chunk);
    pool.emplace_back([&, t, lo, hi] {
      try {
        work(lo, hi);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

SizeMetrics metrics(const Net3D& net) {
  SizeMetrics m;
  m.depth = net.depth();
  auto count = [](const std::vector<WeightEntry>& ws) {
    return static_cast<std::size_t>(std::count_if(
        ws.begin(), ws.end(), [](const WeightEntry& e) { return e.weight != 0.0; }));
  };
  for (const auto& layer : net.layers()) {
    m.height = std::max(m.height, layer.floors.size());
    for (const auto& floor : layer.floors) {
      m.width = std::max(m.width, floor.neurons.size());
      m.neuron_count += floor.neurons.size();
      for (const auto& n : floor.neurons) {
        m.param_count += count(n.inbound) + (n.bias != 0.0 ? 1 : 0);
        for (const auto& l : n.intra) m.param_count += l.coeff != 0.0 ? 1 : 0;
      }
    }
  }
  for (const auto& r : net.readouts())
    m.param_count += count(r.weights) + (r.bias != 0.0 ? 1 : 0);
  return m;
}

Net3D flatten_to_2d(const Net3D& net, FlattenMode mode) {
  std::vector<Layer> layers;
  layers.reserve(net.depth());
  for (std::size_t k = 0; k < net.depth(); ++k) {
    Layer flat;
    flat.floors.resize(1);
    auto& out = flat.floors[0].neurons;
    const Layer& layer = net.layers()[k];
    for (const auto& floor : layer.floors) {
      for (Neuron n : floor.neurons) {
        for (auto& l : n.intra) {
          l.index += net.floor_offset(k, l.floor);
          l.floor = 0;
        }
        out.push_back(std::move(n));
      }
    }
    layers.push_back(std::move(flat));
  }
  if (mode == FlattenMode::kPadToWidthTimesHeight && !layers.empty()) {
    const SizeMetrics m = metrics(net);
    const std::size_t target = m.width * m.height;
    std::size_t widest = 0;
    for (std::size_t k = 1; k < layers.size(); ++k)
      if (net.layer_size(k) > net.layer_size(widest)) widest = k;
    layers[widest].floors[0].neurons.resize(target);
  }
  return Net3D(net.input_dim(), std::move(layers), net.readouts());
}

Net3D parallel(std::span<const Net3D> nets) {
  if (nets.empty()) throw InvalidArgument("parallel: no networks");
  const std::size_t dim = nets[0].input_dim();
  std::size_t depth = 0;
  for (const auto& n : nets) {
    if (n.input_dim() != dim) throw InvalidArgument("parallel: input dimension mismatch");
    depth = std::max(depth, n.depth());
  }
  std::vector<Net3D> lifted;
  for (const auto& n : nets) {
    Net3D cur = n;
    while (cur.depth() < depth) cur = add_carry_layer(cur);
    lifted.push_back(std::move(cur));
  }
  const std::size_t count = lifted.size();
  // index_map[i][old flat index in previous layer] = new flat index.
  std::vector<std::vector<std::size_t>> index_map(count);
  for (std::size_t i = 0; i < count; ++i) {
    index_map[i].resize(dim);
    for (std::size_t j = 0; j < dim; ++j) index_map[i][j] = j;
  }
  std::vector<Layer> layers;
  for (std::size_t k = 0; k < depth; ++k) {
    std::size_t floors = 0;
    for (const auto& n : lifted) floors = std::max(floors, n.layers()[k].floors.size());
    std::vector<std::vector<std::size_t>> block(count, std::vector<std::size_t>(floors, 0));
    std::vector<std::size_t> floor_size(floors, 0);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& fl = lifted[i].layers()[k].floors;
      for (std::size_t f = 0; f < fl.size(); ++f) {
        block[i][f] = floor_size[f];
        floor_size[f] += fl[f].neurons.size();
      }
    }
    std::vector<std::size_t> floor_off(floors, 0);
    for (std::size_t f = 1; f < floors; ++f) floor_off[f] = floor_off[f - 1] + floor_size[f - 1];
    Layer merged;
    merged.floors.resize(floors);
    std::vector<std::vector<std::size_t>> next_map(count);
    for (std::size_t f = 0; f < floors; ++f) {
      for (std::size_t i = 0; i < count; ++i) {
        const auto& fl = lifted[i].layers()[k].floors;
        if (f >= fl.size()) continue;
        for (Neuron n : fl[f].neurons) {
          for (auto& e : n.inbound) e.index = index_map[i][e.index];
          std::sort(n.inbound.begin(), n.inbound.end(),
                    [](const WeightEntry& a, const WeightEntry& b) { return a.index < b.index; });
          for (auto& l : n.intra) l.index += block[i][l.floor];
          merged.floors[f].neurons.push_back(std::move(n));
        }
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto& fl = lifted[i].layers()[k].floors;
      for (std::size_t f = 0; f < fl.size(); ++f)
        for (std::size_t j = 0; j < fl[f].neurons.size(); ++j)
          next_map[i].push_back(floor_off[f] + block[i][f] + j);
    }
    index_map = std::move(next_map);
    layers.push_back(std::move(merged));
  }
  std::vector<Readout> outs;
  for (std::size_t i = 0; i < count; ++i) {
    for (Readout r : lifted[i].readouts()) {
      for (auto& e : r.weights) e.index = index_map[i][e.index];
      std::sort(r.weights.begin(), r.weights.end(),
                [](const WeightEntry& a, const WeightEntry& b) { return a.index < b.index; });
      outs.push_back(std::move(r));
    }
  }
  return Net3D(dim, std::move(layers), std::move(outs));
}

Net3D linear_combine(std::span<const Net3D> nets, std::span<const double> coeffs,
                     double bias) {
  if (nets.size() != coeffs.size())
    throw InvalidArgument("linear_combine: coefficient count mismatch");
  for (const auto& n : nets)
    if (n.output_dim() != 1) throw InvalidArgument("linear_combine: multi-output input");
  Net3D joint = parallel(nets);
  std::vector<WeightEntry> w;
  for (std::size_t i = 0; i < coeffs.size(); ++i) w.push_back({i, coeffs[i]});
  Readout r = compose_affine(w, bias, joint.readouts());
  return Net3D(joint.input_dim(), joint.layers(), {r});
}

Net3D chain(const Net3D& outer, const Net3D& inner) {
  if (outer.input_dim() != inner.output_dim())
    throw InvalidArgument("chain: outer input_dim must equal inner output_dim");
  std::vector<Layer> layers = inner.layers();
  std::vector<Readout> outs;
  if (outer.depth() == 0) {
    for (const auto& r : outer.readouts())
      outs.push_back(compose_affine(r.weights, r.bias, inner.readouts()));
  } else {
    Layer first = outer.layers()[0];
    for (auto& floor : first.floors)
      for (auto& n : floor.neurons) {
        Readout c = compose_affine(n.inbound, n.bias, inner.readouts());
        n.inbound = std::move(c.weights);
        n.bias = c.bias;
      }
    layers.push_back(std::move(first));
    for (std::size_t k = 1; k < outer.depth(); ++k) layers.push_back(outer.layers()[k]);
    outs = outer.readouts();
  }
  return Net3D(inner.input_dim(), std::move(layers), std::move(outs));
}

Net3D identity_net(std::size_t dim) {
  std::vector<Readout> outs;
  for (std::size_t i = 0; i < dim; ++i) outs.push_back({{{i, 1.0}}, 0.0});
  return Net3D(dim, {}, std::move(outs));
}

Net3D relu_identity_net(std::size_t dim, std::size_t coord) {
  if (coord >= dim) throw InvalidArgument("relu_identity_net: coordinate out of range");
  Layer layer;
  layer.floors.resize(1);
  layer.floors[0].neurons.push_back({{{coord, 1.0}}, 0.0, {}});
  layer.floors[0].neurons.push_back({{{coord, -1.0}}, 0.0, {}});
  return Net3D(dim, {layer}, {{{{0, 1.0}, {1, -1.0}}, 0.0}});
}

}  // namespace relu3d
