#include "crystal/path.hpp"

namespace crystal {

PathCrystal::PathCrystal(std::shared_ptr<const RootData> rd, Weight lambda, int slots)
    : Crystal(std::move(rd)), lambda_(std::move(lambda)), n_slots_(slots) {
  const AffineType& t = root_data().type();
  if (t.family != Family::A1) throw InvalidType("path model is available for family A1 only");
  if (lambda_.size() != static_cast<std::size_t>(rank())) throw DimensionMismatch("weight size differs from rank");
  if (!is_dominant(lambda_)) throw std::invalid_argument("highest weight must be dominant");
  if (slots < 1) throw std::invalid_argument("path needs at least one slot");
  k_ = root_data().level(lambda_);
  width_ = rank();
  slot_crystal_ = std::make_shared<PerfectCrystalA>(root_data_ptr(), k_);
  ground_.resize(static_cast<std::size_t>(slots) + 1);
  Weight mu = lambda_;
  for (int j = 1; j <= slots; ++j) {
    mu = sigma(t, mu);
    ground_[j] = minimal_for(t, k_, mu);
  }
  mu_ = mu;
}

Elem PathCrystal::ground_state() const {
  Elem out;
  out.reserve(arity());
  for (int j = n_slots_; j >= 1; --j) out.insert(out.end(), ground_[j].begin(), ground_[j].end());
  return out;
}

Coord PathCrystal::slot(ElemView b, int j) const {
  auto s = at(b, n_slots_ - j);
  return Coord(s.begin(), s.end());
}

Elem PathCrystal::deepen(ElemView b, int extra) const {
  if (extra < 0) throw std::invalid_argument("deepen by a negative amount");
  PathCrystal bigger(root_data_ptr(), lambda_, n_slots_ + extra);
  Elem out;
  out.reserve(b.size() + static_cast<std::size_t>(extra * width_));
  for (int j = n_slots_ + extra; j > n_slots_; --j) out.insert(out.end(), bigger.ground_[j].begin(), bigger.ground_[j].end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Weight PathCrystal::wt(ElemView b) const {
  Weight w = mu_;
  for (int p = 0; p < n_slots_; ++p) w += slot_crystal_->wt(at(b, p));
  return w;
}

ExtInt PathCrystal::eps(ElemView b, int i) const {
  int e = 0;
  int w = mu_[i];
  for (int p = 0; p < n_slots_; ++p) {
    auto s = at(b, p);
    e = std::max(e, slot_crystal_->eps(s, i).value() - w);
    w += slot_crystal_->wt(s)[i];
  }
  return e;
}

ExtInt PathCrystal::phi(ElemView b, int i) const {
  int ph = mu_[i];
  for (int p = 0; p < n_slots_; ++p) {
    auto s = at(b, p);
    ph = std::max(slot_crystal_->phi(s, i).value(), ph + slot_crystal_->wt(s)[i]);
  }
  return ph;
}

int PathCrystal::select(ElemView b, int i, bool raising) const {
  // prefix[p] = φ_i of the head and the first p slots
  std::vector<int> prefix(static_cast<std::size_t>(n_slots_) + 1);
  prefix[0] = mu_[i];
  for (int p = 0; p < n_slots_; ++p) {
    auto s = at(b, p);
    prefix[p + 1] = std::max(slot_crystal_->phi(s, i).value(), prefix[p] + slot_crystal_->wt(s)[i]);
  }
  for (int p = n_slots_ - 1; p >= 0; --p) {
    int e = slot_crystal_->eps(at(b, p), i).value();
    bool left = raising ? prefix[p] >= e : prefix[p] > e;
    if (!left) return p;
  }
  return -1;
}

std::optional<Elem> PathCrystal::e(ElemView b, int i) const {
  int p = select(b, i, true);
  if (p < 0) return std::nullopt;
  auto s = slot_crystal_->e(at(b, p), i);
  if (!s) return std::nullopt;
  Elem out(b.begin(), b.end());
  std::copy(s->begin(), s->end(), out.begin() + p * width_);
  return out;
}

std::optional<Elem> PathCrystal::f(ElemView b, int i) const {
  int p = select(b, i, false);
  if (p < 0) {
    int s = fault_distance(b, i);
    throw TruncationFault("f_" + std::to_string(i) + " reaches the frozen head of " + describe(), s);
  }
  auto s = slot_crystal_->f(at(b, p), i);
  if (!s) return std::nullopt;
  Elem out(b.begin(), b.end());
  std::copy(s->begin(), s->end(), out.begin() + p * width_);
  return out;
}

int PathCrystal::fault_distance(ElemView b, int i) const {
  constexpr int kSearch = 64;
  for (int extra = 1; extra <= kSearch; ++extra) {
    PathCrystal bigger(root_data_ptr(), lambda_, n_slots_ + extra);
    if (bigger.select(deepen(b, extra), i, false) >= 0) return extra;
  }
  return kSearch;
}

json PathCrystal::to_json(ElemView b) const {
  json slots = json::array();
  for (int p = 0; p < n_slots_; ++p) {
    auto s = at(b, p);
    slots.push_back(std::vector<int>(s.begin(), s.end()));
  }
  return json{{"mu_N", mu_.values()}, {"slots", slots}};
}

Elem PathCrystal::from_json(const json& j) const {
  if (!j.is_object() || !j.contains("mu_N") || !j.contains("slots"))
    throw std::invalid_argument("path needs \"mu_N\" and \"slots\"");
  if (j.at("mu_N").get<std::vector<int>>() != mu_.values())
    throw std::invalid_argument("path head weight does not match " + describe());
  const auto& slots = j.at("slots");
  if (static_cast<int>(slots.size()) != n_slots_) throw std::invalid_argument("path has the wrong number of slots");
  Elem out;
  for (const auto& s : slots) {
    auto c = s.get<std::vector<int>>();
    if (!bl_contains(root_data().type(), k_, c)) throw std::invalid_argument("slot not in B_k: " + s.dump());
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

std::string PathCrystal::describe() const {
  return "B(" + lambda_.token() + ")[N=" + std::to_string(n_slots_) + "]";
}

PathGraph generate_bl_lambda_crystal(std::shared_ptr<const RootData> rd, const Weight& lambda, int depth, int slots,
                                     const Budget& budget, int slot_cap) {
  if (slots <= 0) slots = default_slots(depth);
  PathGraph out;
  out.graph = with_truncation_retry(
      slots, slot_cap,
      [&](int N) {
        PathCrystal pc(rd, lambda, N);
        return generate(pc, {pc.ground_state()}, depth, Direction::f_only, budget);
      },
      &out.slots);
  return out;
}

}  // namespace crystal
