#include "relu3d/blocks.hpp"

#include <cmath>

#include "relu3d/assembler.hpp"
#include "relu3d/gadgets.hpp"

namespace relu3d {

void GadgetParams::validate() const {
  if (!(M > 0.0)) throw InvalidArgument("GadgetParams: M must be positive");
  if (d < 1) throw InvalidArgument("GadgetParams: d must be at least 1");
  if (!(delta > 0.0 && delta < M))
    throw InvalidArgument("GadgetParams: delta must lie in (0, M)");
}

std::size_t ceil_log2(std::size_t k) {
  if (k == 0) throw InvalidArgument("ceil_log2 of zero");
  std::size_t s = 0;
  while ((std::size_t{1} << s) < k) ++s;
  return s;
}

Net3D sawtooth_net(std::size_t s) {
  if (s == 0) throw InvalidArgument("sawtooth_net needs s >= 1");
  NetAssembler a(1);
  a.open_layer();
  auto chain = gadgets::sawtooth_chain(a, 0, a.input(0), s);
  return a.finish({chain.g.back()});
}

Net3D square_net(std::size_t H) {
  NetAssembler a(1);
  a.open_layer();
  return a.finish({gadgets::square_unit(a, 0, a.input(0), H)});
}

Net3D product2_unit(std::size_t H) {
  NetAssembler a(2);
  a.open_layer();
  return a.finish({gadgets::product_unit(a, 0, a.input(0), a.input(1), H)});
}

Net3D product_d_net(std::size_t d, std::size_t H, double M) {
  if (!(M > 0.0)) throw InvalidArgument("product_d_net needs M > 0");
  if (d < 2) return identity_net(1);
  NetAssembler a(d);
  std::vector<Affine> factors;
  for (std::size_t i = 0; i < d; ++i) factors.emplace_back(a.input(i));
  gadgets::ProductTree tree(std::move(factors), H, M);
  while (tree.steps_done() < tree.steps()) {
    a.open_layer();
    tree.step(a);
  }
  return a.finish({tree.result()});
}

Net3D power_chain_net(std::size_t n, std::size_t H) {
  if (n == 0) throw InvalidArgument("power_chain_net needs n >= 1");
  NetAssembler a(1);
  std::vector<Affine> h{Affine(a.input(0))};
  while (h.size() < n) {
    a.open_layer();
    Affine next = gadgets::product_unit(a, 0, h.front(), h.back(), H);
    for (auto& v : h) v = a.carry_nonneg(0, v);
    h.push_back(std::move(next));
  }
  return a.finish(h);
}

Net3D periodic_fold_net(std::size_t k) {
  if (k == 0) throw InvalidArgument("periodic_fold_net needs k >= 1");
  const std::size_t s = ceil_log2(k);
  NetAssembler a(1);
  a.open_layer();
  Affine absx = gadgets::abs_value(a, 0, a.input(0));
  Affine z = absx * (static_cast<double>(k) / std::ldexp(1.0, static_cast<int>(s)));
  if (s == 0) return a.finish({z});
  auto chain = gadgets::sawtooth_chain(a, 1, z, s);
  return a.finish({chain.g.back()});
}

Net3D clip_window_net(double M, double delta) {
  if (!(delta > 0.0) || !(delta < M))
    throw InvalidArgument("clip_window_net needs 0 < delta < M");
  NetAssembler a(1);
  a.open_layer();
  auto w = gadgets::clip_window(a, 0, a.input(0), M, delta);
  return a.finish({w.xi, w.chi});
}

}  // namespace relu3d
