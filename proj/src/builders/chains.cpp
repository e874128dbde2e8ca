#include "chains.hpp"

#include <algorithm>
#include <cmath>

#include "relu3d/blocks.hpp"
#include "relu3d/errors.hpp"
#include "relu3d/gadgets.hpp"

namespace relu3d::detail {

std::size_t product_unit_neurons(std::size_t H) { return H == 0 ? 3 : 6; }

namespace {

MultiIndex parent_of(const MultiIndex& j, std::size_t& axis) {
  MultiIndex p = j;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i] > 0) {
      axis = i;
      --p[i];
      return p;
    }
  }
  throw InvalidArgument("constant monomial has no parent");
}

}  // namespace

std::set<MultiIndex> PolyChain::full_support(std::size_t d, std::size_t n) {
  auto all = total_degree_indices(d, n);
  return {all.begin(), all.end()};
}

std::set<MultiIndex> PolyChain::needed_support(const PolyND& p) {
  std::set<MultiIndex> out;
  for (const auto& [j, a] : p.coeffs) {
    if (a == 0.0) continue;
    MultiIndex cur = j;
    while (total_degree(cur) > 0 && out.insert(cur).second) {
      std::size_t axis = 0;
      cur = parent_of(cur, axis);
    }
  }
  return out;
}

std::set<MultiIndex> PolyChain::pure_powers(std::size_t d, std::size_t n) {
  std::set<MultiIndex> out;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t t = 1; t <= n; ++t) {
      MultiIndex j(d, 0);
      j[i] = t;
      out.insert(j);
    }
  }
  return out;
}

PolyChain::PolyChain(std::vector<Affine> inputs, const PolyND& p, std::size_t H,
                     std::set<MultiIndex> support)
    : d_(inputs.size()), H_(H), p_(p), x_(std::move(inputs)) {
  if (p.d != d_) throw InvalidArgument("polynomial dimension does not match inputs");
  for (const auto& [j, a] : p.coeffs) {
    if (a != 0.0 && total_degree(j) > 0) support.insert(j);
  }
  // close under parents
  std::vector<MultiIndex> pending(support.begin(), support.end());
  while (!pending.empty()) {
    MultiIndex j = std::move(pending.back());
    pending.pop_back();
    if (total_degree(j) <= 1) continue;
    std::size_t axis = 0;
    MultiIndex par = parent_of(j, axis);
    if (support.insert(par).second) pending.push_back(par);
  }
  for (const auto& j : support) {
    const std::size_t t = total_degree(j);
    if (t == 0) continue;
    by_degree_[t].push_back(j);
    degree_ = std::max(degree_, t);
  }
  for (const auto& [j, a] : p_.coeffs) {
    const std::size_t t = total_degree(j);
    if (t >= 1 && t < degree_) offset_ += std::abs(a);
  }
  for (const auto& j : by_degree_[1]) {
    std::size_t axis = 0;
    parent_of(j, axis);
    top_.emplace(j, x_[axis]);
  }
}

std::size_t PolyChain::width() const {
  std::size_t w = 0;
  for (std::size_t t = 2; t <= degree_; ++t) {
    auto it = by_degree_.find(t);
    const std::size_t count = it == by_degree_.end() ? 0 : it->second.size();
    w = std::max(w, product_unit_neurons(H_) * count + d_ + 1);
  }
  return w;
}

void PolyChain::step(NetAssembler& a, std::size_t base) {
  if (done_ >= steps()) throw InvalidArgument("polynomial chain already complete");
  const std::size_t t = done_ + 1;  // top_ holds degree t
  std::map<MultiIndex, Affine> next;
  auto it = by_degree_.find(t + 1);
  if (it != by_degree_.end()) {
    for (const auto& j : it->second) {
      std::size_t axis = 0;
      MultiIndex par = parent_of(j, axis);
      next.emplace(j, gadgets::product_unit(a, base, x_[axis], top_.at(par), H_));
    }
  }
  Affine pre = t == 1 ? Affine(offset_) : acc_;
  for (const auto& [j, h] : top_) {
    const double c = p_.coeff(j);
    if (c != 0.0) pre += c * h;
  }
  acc_ = Affine(a.relu(base, pre));
  for (auto& xi : x_) xi = a.carry_nonneg(base, xi);
  top_ = std::move(next);
  ++done_;
}

Affine PolyChain::result() const {
  if (done_ != steps()) throw InvalidArgument("polynomial chain incomplete");
  Affine out(p_.coeff(MultiIndex(d_, 0)));
  if (steps() == 0) {
    for (const auto& [j, h] : top_) out += p_.coeff(j) * h;
    return out;
  }
  out += acc_ - offset_;
  for (const auto& [j, h] : top_) {
    const double c = p_.coeff(j);
    if (c != 0.0) out += c * h;
  }
  return out;
}

ClippedChain::ClippedChain(Affine x, std::vector<std::vector<double>> polys, double M,
                           double delta, std::size_t H, std::size_t length)
    : x_(std::move(x)), polys_(std::move(polys)), M_(M), delta_(delta), H_(H),
      length_(std::max<std::size_t>(length, 1)) {
  if (!(M >= 1.0)) throw InvalidArgument("clipped chain needs M >= 1");
  if (!(delta > 0.0 && delta < M)) throw InvalidArgument("clipped chain needs 0 < delta < M");
  for (const auto& c : polys_) {
    if (c.empty()) throw InvalidArgument("empty polynomial");
    if (c.size() - 1 > length_) throw InvalidArgument("polynomial degree exceeds chain length");
    double off = std::abs(c[0]);
    double scale = 1.0;
    for (std::size_t j = 1; j < c.size() && j < length_; ++j) {
      scale *= M_;
      off += std::abs(c[j]) * scale;
    }
    offset_.push_back(off);
  }
}

std::size_t ClippedChain::width() const {
  if (length_ == 1) return 4;
  return 6 + 1 + polys_.size();
}

void ClippedChain::step(NetAssembler& a, std::size_t base) {
  if (done_ >= length_) throw InvalidArgument("clipped chain already complete");
  if (done_ == 0) {
    auto w = gadgets::clip_window(a, base, x_, M_, delta_);
    xi_ = w.xi;
    chi_ = w.chi;
    u_ = xi_ * (1.0 / M_);
    k_ = u_;
    ++done_;
    return;
  }
  const std::size_t j = done_ + 1;  // layer index; k_ holds power j - 1
  Affine next = gadgets::product_sym(a, base, u_, k_, H_, 1.0);
  const double scale = std::pow(M_, static_cast<double>(j - 1));
  std::vector<Affine> acc;
  for (std::size_t i = 0; i < polys_.size(); ++i) {
    const auto& c = polys_[i];
    Affine pre = j == 2 ? Affine(offset_[i]) + c[0] * chi_ : acc_[i];
    if (j - 1 < c.size() && c[j - 1] != 0.0) pre += (c[j - 1] * scale) * k_;
    acc.emplace_back(a.relu(base, pre));
  }
  acc_ = std::move(acc);
  u_ = a.carry_bounded(base, u_, 1.0);
  k_ = std::move(next);
  ++done_;
}

Affine ClippedChain::result(std::size_t i) const {
  if (done_ != length_) throw InvalidArgument("clipped chain incomplete");
  const auto& c = polys_.at(i);
  if (length_ == 1) {
    Affine out = c[0] * chi_;
    if (c.size() > 1) out += c[1] * xi_;
    return out;
  }
  Affine out = acc_[i] - offset_[i];
  if (c.size() - 1 == length_ && c.back() != 0.0)
    out += (c.back() * std::pow(M_, static_cast<double>(length_))) * k_;
  return out;
}

namespace {

Affine fold_tail(NetAssembler& a, std::size_t base, const Affine& z, std::size_t s) {
  if (s == 0) return z;
  return gadgets::sawtooth_chain(a, base, z, s).g.back();
}

}  // namespace

std::vector<FoldedVar> fold_cos(NetAssembler& a, const Affine& pos, const Affine& neg,
                                std::size_t k) {
  const std::size_t s = ceil_log2(k);
  const double scale = static_cast<double>(k) / std::ldexp(1.0, static_cast<int>(s));
  return {{fold_tail(a, 1, (pos + neg) * scale, s), 1.0}};
}

std::vector<FoldedVar> fold_sin(NetAssembler& a, const Affine& pos, const Affine& neg,
                                std::size_t k) {
  const std::size_t s = ceil_log2(k);
  const double scale = static_cast<double>(k) / std::ldexp(1.0, static_cast<int>(s));
  const double shift = 0.5 / static_cast<double>(k);
  Affine wp = gadgets::abs_value(a, 1, pos - shift);
  Affine wn = gadgets::abs_value(a, 1, neg - shift);
  return {{fold_tail(a, 2, wp * scale, s), 1.0}, {fold_tail(a, 2, wn * scale, s), -1.0}};
}

std::size_t fold_cos_height(std::size_t k) { return ceil_log2(k) + 1; }
std::size_t fold_sin_height(std::size_t k) { return ceil_log2(k) + 2; }

}  // namespace relu3d::detail
