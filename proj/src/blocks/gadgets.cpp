#include "relu3d/gadgets.hpp"

#include <cmath>

namespace relu3d::gadgets {

SawtoothChain sawtooth_chain(NetAssembler& a, std::size_t base, const Affine& z,
                             std::size_t s) {
  SawtoothChain out;
  out.identity = Affine(a.relu(base, z));
  if (s == 0) return out;
  Affine u = Affine(a.relu(base, z - 0.5));
  out.g.push_back(2.0 * out.identity - 4.0 * u);
  for (std::size_t j = 2; j <= s; ++j) {
    const Affine& prev = out.g.back();
    const std::size_t floor = base + j - 1;
    Affine w = Affine(a.relu(floor, prev));
    Affine v = Affine(a.relu(floor, 0.5 - prev));
    // g_1(g) = 2g for g <= 1/2 and 2 - 2g above, written without |.|
    out.g.push_back(-4.0 * v - 2.0 * w + 2.0);
  }
  return out;
}

Affine square_unit(NetAssembler& a, std::size_t base, const Affine& z, std::size_t H) {
  SawtoothChain c = sawtooth_chain(a, base, z, H);
  Affine f = c.identity;
  double scale = 1.0;
  for (const Affine& g : c.g) {
    scale *= 0.25;
    f -= g * scale;
  }
  return f;
}

Affine product_unit(NetAssembler& a, std::size_t base, const Affine& x, const Affine& y,
                    std::size_t H) {
  Affine both = square_unit(a, base, 0.5 * (x + y), H);
  Affine fx = square_unit(a, base, 0.5 * x, H);
  Affine fy = square_unit(a, base, 0.5 * y, H);
  return 2.0 * both - 2.0 * fx - 2.0 * fy;
}

Affine square_sym(NetAssembler& a, std::size_t base, const Affine& t, std::size_t H) {
  SawtoothChain c = sawtooth_chain(a, base, 0.5 * (t + 1.0), H + 1);
  // g_1((t+1)/2) = 1 - |t| and g_{j+1}((t+1)/2) = g_j(|t|)
  Affine f = 1.0 - c.g[0];
  double scale = 1.0;
  for (std::size_t j = 1; j <= H; ++j) {
    scale *= 0.25;
    f -= c.g[j] * scale;
  }
  return f;
}

Affine product_sym(NetAssembler& a, std::size_t base, const Affine& x, const Affine& y,
                   std::size_t H, double M) {
  const double inv = 1.0 / M;
  Affine both = square_sym(a, base, (0.5 * inv) * (x + y), H);
  Affine fx = square_sym(a, base, (0.5 * inv) * x, H);
  Affine fy = square_sym(a, base, (0.5 * inv) * y, H);
  return (2.0 * M * M) * (both - fx - fy);
}

Affine abs_value(NetAssembler& a, std::size_t floor, const Affine& x) {
  return Affine(a.relu(floor, x)) + Affine(a.relu(floor, -x));
}

ClipWindow clip_window(NetAssembler& a, std::size_t floor, const Affine& x, double M,
                       double delta) {
  if (!(delta > 0.0) || !(delta < M))
    throw InvalidArgument("clip window needs 0 < delta < M");
  Affine n1 = Affine(a.relu(floor, x + M));
  Affine n2 = Affine(a.relu(floor, x + (M - delta)));
  Affine n3 = Affine(a.relu(floor, x - (M - delta)));
  Affine n4 = Affine(a.relu(floor, x - M));
  ClipWindow w;
  const double inner = (M - delta) / delta, outer = M / delta;
  w.xi = (-inner) * n1 + outer * n2 - outer * n3 + inner * n4;
  w.chi = (1.0 / delta) * (n1 - n2 - n3 + n4);
  return w;
}

ProductTree::ProductTree(std::vector<Affine> factors, std::size_t H, double M)
    : H_(H), M_(M), d_(factors.size()), total_steps_(d_ >= 2 ? d_ - 1 : 0) {
  if (!(M > 0.0)) throw InvalidArgument("product tree needs M > 0");
  if (d_ <= 1) {
    partial_ = d_ == 0 ? Affine(1.0) : factors[0];
    return;
  }
  const double inv = 1.0 / M;
  partial_ = factors[0] * inv;
  for (std::size_t i = 1; i < d_; ++i) remaining_.push_back(factors[i] * inv);
}

void ProductTree::step(NetAssembler& a, std::size_t base) {
  if (done_ >= total_steps_) throw InvalidArgument("product tree already complete");
  Affine next = product_sym(a, base, partial_, remaining_.front(), H_, 1.0);
  std::vector<Affine> rest;
  for (std::size_t i = 1; i < remaining_.size(); ++i)
    rest.push_back(a.carry_bounded(base, remaining_[i], 1.0));
  partial_ = std::move(next);
  remaining_ = std::move(rest);
  ++done_;
}

Affine ProductTree::result() const {
  if (done_ != total_steps_) throw InvalidArgument("product tree incomplete");
  if (d_ <= 1) return partial_;
  return partial_ * std::pow(M_, static_cast<double>(d_));
}

}  // namespace relu3d::gadgets
