#include "crystal/crystal.hpp"

#include <algorithm>

namespace crystal {

Elem Crystal::e_max(ElemView b, int i) const {
  Elem cur(b.begin(), b.end());
  while (auto next = e(cur, i)) cur = std::move(*next);
  return cur;
}

Weight Crystal::eps_weight(ElemView b) const {
  Weight w(static_cast<std::size_t>(rank()));
  for (int i = 0; i < rank(); ++i) {
    ExtInt x = eps(b, i);
    if (!x.is_finite()) throw std::domain_error("eps_weight: ε is -inf");
    w[i] = x.value();
  }
  return w;
}

Weight Crystal::phi_weight(ElemView b) const {
  Weight w(static_cast<std::size_t>(rank()));
  for (int i = 0; i < rank(); ++i) {
    ExtInt x = phi(b, i);
    if (!x.is_finite()) throw std::domain_error("phi_weight: φ is -inf");
    w[i] = x.value();
  }
  return w;
}

// ---------------------------------------------------------------------------
// T_λ

TCrystal::TCrystal(std::shared_ptr<const RootData> rd, Weight lambda)
    : Crystal(std::move(rd)), lambda_(std::move(lambda)) {
  if (lambda_.size() != static_cast<std::size_t>(rank())) throw DimensionMismatch("T_λ weight size");
}

json TCrystal::to_json(ElemView) const { return json{{"t", lambda_.values()}}; }

Elem TCrystal::from_json(const json& j) const {
  if (!j.is_object() || !j.contains("t") || j.at("t").get<std::vector<int>>() != lambda_.values())
    throw std::invalid_argument("not the element of " + describe() + ": " + j.dump());
  return {};
}

std::string TCrystal::describe() const { return "T(" + lambda_.token() + ")"; }

// ---------------------------------------------------------------------------
// Tensor rule

TensorCrystal::TensorCrystal(CrystalPtr left, CrystalPtr right)
    : Crystal(left->root_data_ptr()), left_(std::move(left)), right_(std::move(right)) {
  if (!(left_->root_data().type() == right_->root_data().type()))
    throw InvalidType("tensor factors over different affine types");
}

Elem TensorCrystal::pair(ElemView b1, ElemView b2) {
  Elem out;
  out.reserve(b1.size() + b2.size());
  out.insert(out.end(), b1.begin(), b1.end());
  out.insert(out.end(), b2.begin(), b2.end());
  return out;
}

Weight TensorCrystal::wt(ElemView b) const { return left_->wt(left_part(b)) + right_->wt(right_part(b)); }

ExtInt TensorCrystal::eps(ElemView b, int i) const {
  auto b1 = left_part(b);
  auto b2 = right_part(b);
  return max(left_->eps(b1, i), right_->eps(b2, i) - left_->wt(b1)[i]);
}

ExtInt TensorCrystal::phi(ElemView b, int i) const {
  auto b1 = left_part(b);
  auto b2 = right_part(b);
  return max(right_->phi(b2, i), left_->phi(b1, i) + right_->wt(b2)[i]);
}

std::optional<Elem> TensorCrystal::e(ElemView b, int i) const {
  auto b1 = left_part(b);
  auto b2 = right_part(b);
  if (left_->phi(b1, i) >= right_->eps(b2, i)) {
    auto x = left_->e(b1, i);
    if (!x) return std::nullopt;
    return pair(*x, b2);
  }
  auto y = right_->e(b2, i);
  if (!y) return std::nullopt;
  return pair(b1, *y);
}

std::optional<Elem> TensorCrystal::f(ElemView b, int i) const {
  auto b1 = left_part(b);
  auto b2 = right_part(b);
  if (left_->phi(b1, i) > right_->eps(b2, i)) {
    auto x = left_->f(b1, i);
    if (!x) return std::nullopt;
    return pair(*x, b2);
  }
  auto y = right_->f(b2, i);
  if (!y) return std::nullopt;
  return pair(b1, *y);
}

json TensorCrystal::to_json(ElemView b) const {
  return json::array({left_->to_json(left_part(b)), right_->to_json(right_part(b))});
}

Elem TensorCrystal::from_json(const json& j) const {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("tensor element must be a 2-array: " + j.dump());
  return pair(left_->from_json(j[0]), right_->from_json(j[1]));
}

std::string TensorCrystal::describe() const { return "(" + left_->describe() + " x " + right_->describe() + ")"; }

CrystalPtr tensor(const std::vector<CrystalPtr>& factors) {
  if (factors.empty()) throw std::invalid_argument("empty tensor product");
  CrystalPtr acc = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) acc = std::make_shared<TensorCrystal>(acc, factors[k]);
  return acc;
}

// ---------------------------------------------------------------------------

SeminormalResult seminormal_check(const Crystal& c, ElemView b, int i, int bound) {
  ExtInt ep = c.eps(b, i);
  ExtInt ph = c.phi(b, i);
  if (!ep.is_finite() || !ph.is_finite()) return {false, "minus-infinity string"};
  auto count = [&](bool up) {
    int k = 0;
    Elem cur(b.begin(), b.end());
    while (auto nxt = up ? c.e(cur, i) : c.f(cur, i)) {
      if (++k > bound) throw BoundExceeded("string through element exceeds bound " + std::to_string(bound));
      cur = std::move(*nxt);
    }
    return k;
  };
  int up = count(true);
  int down = count(false);
  if (up != ep.value())
    return {false, "eps_" + std::to_string(i) + " = " + ep.str() + " but string above has length " + std::to_string(up)};
  if (down != ph.value())
    return {false,
            "phi_" + std::to_string(i) + " = " + ph.str() + " but string below has length " + std::to_string(down)};
  return {true, {}};
}

std::string axiom_violation(const Crystal& c, ElemView b, int i) {
  const RootData& rd = c.root_data();
  Weight w = c.wt(b);
  ExtInt ep = c.eps(b, i);
  ExtInt ph = c.phi(b, i);
  if (ep.is_finite() && ph.is_finite() && w[i] != ph.value() - ep.value())
    return "<h_i, wt> != phi - eps";
  auto eb = c.e(b, i);
  auto fb = c.f(b, i);
  if (ep.is_neg_inf() && (eb || fb)) return "operator defined although eps = -inf";
  if (eb) {
    if (c.wt(*eb) != w + rd.alpha(i)) return "wt(e b) != wt(b) + alpha_i";
    auto back = c.f(*eb, i);
    if (!back || !std::equal(back->begin(), back->end(), b.begin(), b.end())) return "f(e b) != b";
  }
  if (fb) {
    if (c.wt(*fb) != w - rd.alpha(i)) return "wt(f b) != wt(b) - alpha_i";
    auto back = c.e(*fb, i);
    if (!back || !std::equal(back->begin(), back->end(), b.begin(), b.end())) return "e(f b) != b";
  }
  return {};
}

}  // namespace crystal
