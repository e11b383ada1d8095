#include "crystal/perfect.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace crystal {

namespace {

int sum(const Coord& c) { return std::accumulate(c.begin(), c.end(), 0); }

void check_arity(const AffineType& t, const Coord& c) {
  if (c.size() != coord_arity(t))
    throw std::invalid_argument("coordinate tuple for " + t.str() + " needs " + std::to_string(coord_arity(t)) +
                                " entries, got " + std::to_string(c.size()));
}

void check_weight(const AffineType& t, const Weight& lambda) {
  if (lambda.size() != static_cast<std::size_t>(t.rank()))
    throw DimensionMismatch("weight has " + std::to_string(lambda.size()) + " components for " + t.str());
}

int half_up(int a) { return (a + 1) / 2; }

}  // namespace

CoordLayout::CoordLayout(AffineType t)
    : n_(t.n), has_x0_(t.family == Family::B1 || t.family == Family::D2dual) {
  if (t.family == Family::A1)
    arity_ = static_cast<std::size_t>(n_ + 1);
  else
    arity_ = static_cast<std::size_t>(2 * n_ + (has_x0_ ? 1 : 0));
}

std::size_t CoordLayout::xbar(int i) const { return arity_ - static_cast<std::size_t>(i); }

std::size_t coord_arity(const AffineType& t) { return CoordLayout(t).arity(); }

std::string format_coord(const Coord& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + std::to_string(c[i]);
  return out;
}

Coord parse_coord(const std::string& text) {
  Coord out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed coordinate '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw std::invalid_argument("malformed coordinate '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty coordinate list");
  return out;
}

bool bl_contains(const AffineType& t, int l, const Coord& c) {
  check_arity(t, c);
  for (int x : c)
    if (x < 0) return false;
  CoordLayout lay(t);
  if (lay.has_x0() && c[lay.x0()] > 1) return false;
  const int s = sum(c);
  switch (t.family) {
    case Family::A1:
    case Family::A2dual_odd:
    case Family::B1:
      return s == l;
    case Family::A2dual_even:
    case Family::D2dual:
      return s <= l;
    case Family::C1:
      return s <= 2 * l && s % 2 == 0;
    case Family::D1:
      return s == l && (c[lay.x(t.n)] == 0 || c[lay.xbar(t.n)] == 0);
  }
  return false;
}

std::vector<Coord> enumerate_bl(const AffineType& t, int l) {
  std::vector<Coord> out;
  if (l < 0) return out;
  const std::size_t m = coord_arity(t);
  const int bound = t.family == Family::C1 ? 2 * l : l;
  Coord c(m, 0);
  auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos == m) {
      if (bl_contains(t, l, c)) out.push_back(c);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      c[pos] = v;
      self(self, pos + 1, remaining - v);
    }
    c[pos] = 0;
  };
  rec(rec, 0, bound);
  std::sort(out.begin(), out.end());
  return out;
}

int level_of_weight(const AffineType& t, const Weight& a) {
  check_weight(t, a);
  const int n = t.n;
  auto range = [&](int from, int to) {
    int s = 0;
    for (int i = from; i <= to; ++i) s += a[i];
    return s;
  };
  switch (t.family) {
    case Family::A1:
    case Family::C1:
      return range(0, n);
    case Family::A2dual_odd:
      return a[0] + a[1] + 2 * range(2, n);
    case Family::B1:
      return a[0] + a[1] + 2 * range(2, n - 1) + a[n];
    case Family::A2dual_even:
      return a[0] + 2 * range(1, n);
    case Family::D2dual:
      return a[0] + 2 * range(1, n - 1) + a[n];
    case Family::D1:
      return a[0] + a[1] + 2 * range(2, n - 2) + a[n - 1] + a[n];
  }
  return 0;
}

std::optional<std::string> head_set_failure(const AffineType& t, int l, const Weight& a, const Coord& c) {
  check_weight(t, a);
  check_arity(t, c);
  if (!is_dominant(a)) throw std::invalid_argument("lambda must be dominant");
  const int k = level_of_weight(t, a);
  if (k >= l)
    throw LevelViolation("head set B_l^(lambda) needs level(lambda) < l; got k = " + std::to_string(k) +
                         ", l = " + std::to_string(l));
  if (!bl_contains(t, l, c)) return "b is not in B_" + std::to_string(l);

  CoordLayout lay(t);
  const int n = t.n;
  auto x = [&](int i) { return c[lay.x(i)]; };
  auto xb = [&](int i) { return c[lay.xbar(i)]; };
  auto x0 = [&] { return c[lay.x0()]; };
  std::optional<std::string> fail;
  auto need = [&](bool ok, const std::string& what) {
    if (!fail && !ok) fail = what;
  };
  auto geq = [&](int lhs, int rhs, const std::string& name) {
    need(lhs >= rhs, name + " = " + std::to_string(lhs) + " < " + std::to_string(rhs));
  };
  auto pair_range = [&](int from, int to) {
    for (int i = from; i <= to; ++i) {
      geq(x(i), a[i], "x_" + std::to_string(i));
      geq(xb(i), a[i], "xbar_" + std::to_string(i));
    }
  };
  const int s = sum(c);

  switch (t.family) {
    case Family::A1:
      for (int j = 1; j <= n + 1; ++j) geq(x(j), a[j - 1], "x_" + std::to_string(j));
      break;
    case Family::A2dual_odd:
      geq(x(1), a[0], "x_1");
      geq(xb(1), a[1], "xbar_1");
      pair_range(2, n);
      break;
    case Family::B1:
      geq(x(1), a[0], "x_1");
      geq(xb(1), a[1], "xbar_1");
      pair_range(2, n - 1);
      geq(2 * x(n) + x0(), a[n], "2x_n+x_0");
      geq(2 * xb(n) + x0(), a[n], "2xbar_n+x_0");
      break;
    case Family::A2dual_even:
      pair_range(1, n);
      need(s <= l - a[0], "s(b) = " + std::to_string(s) + " > l - a_0 = " + std::to_string(l - a[0]));
      break;
    case Family::D2dual:
      pair_range(1, n - 1);
      geq(2 * x(n) + x0(), a[n], "2x_n+x_0");
      geq(2 * xb(n) + x0(), a[n], "2xbar_n+x_0");
      need(s <= l - a[0], "s(b) = " + std::to_string(s) + " > l - a_0 = " + std::to_string(l - a[0]));
      break;
    case Family::C1:
      pair_range(1, n);
      need(s <= 2 * (l - a[0]),
           "s(b) = " + std::to_string(s) + " > 2(l - a_0) = " + std::to_string(2 * (l - a[0])));
      break;
    case Family::D1:
      geq(x(1), a[0], "x_1");
      geq(xb(1), a[1], "xbar_1");
      pair_range(2, n - 2);
      if (a[n - 1] >= a[n]) {
        geq(x(n - 1), a[n], "x_{n-1}");
        geq(xb(n - 1), a[n], "xbar_{n-1}");
        geq(x(n - 1) + x(n), a[n - 1], "x_{n-1}+x_n");
        geq(xb(n - 1) + x(n), a[n - 1], "xbar_{n-1}+x_n");
      } else {
        geq(x(n - 1), a[n - 1], "x_{n-1}");
        geq(xb(n - 1), a[n - 1], "xbar_{n-1}");
        geq(x(n - 1) + xb(n), a[n], "x_{n-1}+xbar_n");
        geq(xb(n - 1) + xb(n), a[n], "xbar_{n-1}+xbar_n");
      }
      break;
  }
  return fail;
}

bool head_set_contains(const AffineType& t, int l, const Weight& lambda, const Coord& coords) {
  return !head_set_failure(t, l, lambda, coords).has_value();
}

std::vector<Coord> enumerate_head_set(const AffineType& t, int l, const Weight& lambda) {
  std::vector<Coord> out;
  for (auto& b : enumerate_bl(t, l))
    if (head_set_contains(t, l, lambda, b)) out.push_back(b);
  return out;
}

Coord psi_map(const AffineType& t, int l, const Weight& a, const Coord& c) {
  if (auto why = head_set_failure(t, l, a, c))
    throw std::invalid_argument("psi precondition: " + format_coord(c) + " not in B_l^(lambda): " + *why);
  CoordLayout lay(t);
  const int n = t.n;
  Coord y(c);
  auto sub = [&](std::size_t pos, int v) { y[pos] -= v; };
  auto pos_part = [](int v) { return std::max(v, 0); };

  switch (t.family) {
    case Family::A1:
      for (int j = 1; j <= n + 1; ++j) sub(lay.x(j), a[j - 1]);
      break;
    case Family::A2dual_odd:
      sub(lay.x(1), a[0]);
      sub(lay.xbar(1), a[1]);
      for (int i = 2; i <= n; ++i) sub(lay.x(i), a[i]), sub(lay.xbar(i), a[i]);
      break;
    case Family::B1:
    case Family::D2dual: {
      sub(lay.x(1), t.family == Family::B1 ? a[0] : a[1]);
      sub(lay.xbar(1), a[1]);
      for (int i = 2; i <= n - 1; ++i) sub(lay.x(i), a[i]), sub(lay.xbar(i), a[i]);
      const int an = a[n];
      if (an % 2 == 0) {
        sub(lay.x(n), an / 2);
        sub(lay.xbar(n), an / 2);
      } else if (c[lay.x0()] == 0) {
        sub(lay.x(n), half_up(an));
        sub(lay.xbar(n), half_up(an));
        y[lay.x0()] = 1;
      } else {
        sub(lay.x(n), (an - 1) / 2);
        sub(lay.xbar(n), (an - 1) / 2);
        y[lay.x0()] = 0;
      }
      break;
    }
    case Family::A2dual_even:
    case Family::C1:
      for (int i = 1; i <= n; ++i) sub(lay.x(i), a[i]), sub(lay.xbar(i), a[i]);
      break;
    case Family::D1: {
      sub(lay.x(1), a[0]);
      sub(lay.xbar(1), a[1]);
      for (int i = 2; i <= n - 2; ++i) sub(lay.x(i), a[i]), sub(lay.xbar(i), a[i]);
      const int xn1 = c[lay.x(n - 1)], xn = c[lay.x(n)], xbn = c[lay.xbar(n)], xbn1 = c[lay.xbar(n - 1)];
      if (a[n - 1] >= a[n]) {
        const int tp = pos_part(a[n - 1] - a[n] - xn);
        y[lay.x(n - 1)] = xn1 - a[n] - tp;
        y[lay.x(n)] = pos_part(xn - a[n - 1] + a[n]);
        y[lay.xbar(n)] = xbn + tp;
        y[lay.xbar(n - 1)] = xbn1 - a[n] - tp;
      } else {
        const int tp = pos_part(a[n] - a[n - 1] - xbn);
        y[lay.x(n - 1)] = xn1 - a[n - 1] - tp;
        y[lay.x(n)] = xn + tp;
        y[lay.xbar(n)] = pos_part(xbn - a[n] + a[n - 1]);
        y[lay.xbar(n - 1)] = xbn1 - a[n - 1] - tp;
      }
      break;
    }
  }
  for (int v : y)
    if (v < 0)
      throw TheoremViolation("psi produced a negative coordinate",
                             json{{"type", t.str()}, {"lambda", a.values()}, {"b", c}, {"image", y}});
  const int k = level_of_weight(t, a);
  if (!bl_contains(t, l - k, y))
    throw TheoremViolation("psi image is not in B_{l-k}",
                           json{{"type", t.str()}, {"lambda", a.values()}, {"b", c}, {"image", y}});
  return y;
}

Coord psi_inverse(const AffineType& t, int l, const Weight& a, const Coord& y) {
  check_weight(t, a);
  const int k = level_of_weight(t, a);
  if (k >= l) throw LevelViolation("psi_inverse needs level(lambda) < l");
  if (!bl_contains(t, l - k, y))
    throw std::invalid_argument("psi_inverse precondition: " + format_coord(y) + " not in B_" + std::to_string(l - k));
  CoordLayout lay(t);
  const int n = t.n;
  Coord c(y);
  auto add = [&](std::size_t pos, int v) { c[pos] += v; };

  switch (t.family) {
    case Family::A1:
      for (int j = 1; j <= n + 1; ++j) add(lay.x(j), a[j - 1]);
      break;
    case Family::A2dual_odd:
      add(lay.x(1), a[0]);
      add(lay.xbar(1), a[1]);
      for (int i = 2; i <= n; ++i) add(lay.x(i), a[i]), add(lay.xbar(i), a[i]);
      break;
    case Family::B1:
    case Family::D2dual: {
      add(lay.x(1), t.family == Family::B1 ? a[0] : a[1]);
      add(lay.xbar(1), a[1]);
      for (int i = 2; i <= n - 1; ++i) add(lay.x(i), a[i]), add(lay.xbar(i), a[i]);
      const int an = a[n];
      if (an % 2 == 0) {
        add(lay.x(n), an / 2);
        add(lay.xbar(n), an / 2);
      } else if (y[lay.x0()] == 1) {
        add(lay.x(n), half_up(an));
        add(lay.xbar(n), half_up(an));
        c[lay.x0()] = 0;
      } else {
        add(lay.x(n), (an - 1) / 2);
        add(lay.xbar(n), (an - 1) / 2);
        c[lay.x0()] = 1;
      }
      break;
    }
    case Family::A2dual_even:
    case Family::C1:
      for (int i = 1; i <= n; ++i) add(lay.x(i), a[i]), add(lay.xbar(i), a[i]);
      break;
    case Family::D1: {
      add(lay.x(1), a[0]);
      add(lay.xbar(1), a[1]);
      for (int i = 2; i <= n - 2; ++i) add(lay.x(i), a[i]), add(lay.xbar(i), a[i]);
      const int yn1 = y[lay.x(n - 1)], yn = y[lay.x(n)], ybn = y[lay.xbar(n)], ybn1 = y[lay.xbar(n - 1)];
      if (a[n - 1] >= a[n]) {
        const int gap = a[n - 1] - a[n];
        const int tp = std::min(ybn, gap);
        c[lay.x(n - 1)] = yn1 + a[n] + tp;
        c[lay.x(n)] = yn + gap - tp;
        c[lay.xbar(n)] = ybn - tp;
        c[lay.xbar(n - 1)] = ybn1 + a[n] + tp;
      } else {
        const int gap = a[n] - a[n - 1];
        const int tp = std::min(yn, gap);
        c[lay.x(n - 1)] = yn1 + a[n - 1] + tp;
        c[lay.x(n)] = yn - tp;
        c[lay.xbar(n)] = ybn + gap - tp;
        c[lay.xbar(n - 1)] = ybn1 + a[n - 1] + tp;
      }
      break;
    }
  }
  json witness{{"type", t.str()}, {"lambda", a.values()}, {"l", l}, {"target", y}, {"candidate", c}};
  if (!bl_contains(t, l, c) || !head_set_contains(t, l, a, c))
    throw TheoremViolation("psi has no preimage in B_l^(lambda)", witness);
  if (psi_map(t, l, a, c) != y) throw TheoremViolation("psi_inverse candidate does not map back", witness);
  return c;
}

// ---------------------------------------------------------------------------
// Family A1 operators

PerfectCrystalA::PerfectCrystalA(std::shared_ptr<const RootData> rd, int l) : Crystal(std::move(rd)), l_(l) {
  if (root_data().type().family != Family::A1)
    throw InvalidType("crystal operators are implemented for family A1 only");
  if (l < 0) throw std::invalid_argument("level must be nonnegative");
}

std::vector<Elem> PerfectCrystalA::elements() const { return enumerate_bl(root_data().type(), l_); }

Weight PerfectCrystalA::wt(ElemView b) const {
  Weight w(static_cast<std::size_t>(rank()));
  for (int i = 0; i < rank(); ++i) w[i] = b[phi_pos(i)] - b[eps_pos(i)];
  return w;
}

ExtInt PerfectCrystalA::eps(ElemView b, int i) const { return b[eps_pos(i)]; }
ExtInt PerfectCrystalA::phi(ElemView b, int i) const { return b[phi_pos(i)]; }

std::optional<Elem> PerfectCrystalA::e(ElemView b, int i) const {
  if (b[eps_pos(i)] == 0) return std::nullopt;
  Elem out(b.begin(), b.end());
  --out[eps_pos(i)];
  ++out[phi_pos(i)];
  return out;
}

std::optional<Elem> PerfectCrystalA::f(ElemView b, int i) const {
  if (b[phi_pos(i)] == 0) return std::nullopt;
  Elem out(b.begin(), b.end());
  --out[phi_pos(i)];
  ++out[eps_pos(i)];
  return out;
}

json PerfectCrystalA::to_json(ElemView b) const { return json(std::vector<int>(b.begin(), b.end())); }

Elem PerfectCrystalA::from_json(const json& j) const {
  Elem c = j.get<std::vector<int>>();
  if (!bl_contains(root_data().type(), l_, c))
    throw std::invalid_argument(j.dump() + " is not an element of " + describe());
  return c;
}

std::string PerfectCrystalA::describe() const { return "B_" + std::to_string(l_); }

std::vector<Coord> minimal_elements(const AffineType& t, int l) {
  if (t.family != Family::A1) throw InvalidType("minimal elements need operator rules (family A1 only)");
  auto rd = std::make_shared<const RootData>(t);
  PerfectCrystalA bl(rd, l);
  std::vector<Coord> out;
  for (auto& b : bl.elements())
    if (rd->level(bl.eps_weight(b)) == l) out.push_back(b);
  return out;
}

Coord minimal_for(const AffineType& t, int l, const Weight& mu) {
  if (t.family != Family::A1) throw InvalidType("minimal elements need operator rules (family A1 only)");
  check_weight(t, mu);
  if (!is_dominant(mu)) throw std::invalid_argument("mu must be dominant");
  RootData rd(t);
  if (rd.level(mu) != l)
    throw LevelViolation("mu has level " + std::to_string(rd.level(mu)) + ", expected " + std::to_string(l));
  // ε(b) = x_1 Λ_0 + x_2 Λ_1 + ... + x_{n+1} Λ_n
  return Coord(mu.values());
}

// ---------------------------------------------------------------------------
// ψ embedding

json MorphismTable::to_json() const {
  json j{{"source", source}, {"target", target}, {"injective", injective}, {"total", total}};
  j["pairs"] = json::array();
  for (auto& [s, d] : pairs) j["pairs"].push_back({s, d});
  if (lambda) j["lambda"] = lambda->values();
  if (lambda_prime) j["lambda_prime"] = lambda_prime->values();
  j["commutes"] = commutes;
  return j;
}

MorphismTable build_psi_embedding(const AffineType& t, int k, int l, const Weight& lambda) {
  if (t.family != Family::A1) throw InvalidType("psi embedding needs operator rules (family A1 only)");
  auto rd = std::make_shared<const RootData>(t);
  if (!(0 < k && k < l)) throw std::invalid_argument("psi embedding needs 0 < k < l");
  if (!is_dominant(lambda) || rd->level(lambda) != k)
    throw std::invalid_argument("lambda must be dominant of level k");
  const Weight lambda_p = sigma_inv(t, lambda);

  auto source = std::make_shared<const PerfectCrystalA>(rd, l - k);
  auto middle = std::make_shared<const PerfectCrystalA>(rd, l);
  auto target = tensor({std::make_shared<const TCrystal>(rd, lambda), middle,
                        std::make_shared<const TCrystal>(rd, -lambda_p)});

  MorphismTable table;
  table.source = source->describe();
  table.target = target->describe();
  table.lambda = lambda;
  table.lambda_prime = lambda_p;
  table.commutes.assign(rd->rank(), true);

  const Weight xi = (l - k) * rd->fundamental(0);
  std::map<Elem, Elem> image;
  std::set<Elem> used;
  Elem seed_src = minimal_for(t, l - k, xi);
  Elem seed_tgt = minimal_for(t, l, xi + lambda);

  auto labels_match = [&](const Elem& s, const Elem& d) {
    if (source->wt(s) != target->wt(d)) return false;
    for (int i = 0; i < rd->rank(); ++i)
      if (source->eps(s, i) != target->eps(d, i) || source->phi(s, i) != target->phi(d, i)) return false;
    return true;
  };
  auto witness = [&](const Elem& s, const Elem& d) {
    return json{{"source", source->to_json(s)}, {"target", target->to_json(d)}};
  };
  auto assign = [&](const Elem& s, const Elem& d) {
    if (!labels_match(s, d)) throw TheoremViolation("psi does not preserve wt/eps/phi", witness(s, d));
    if (!used.insert(d).second) throw TheoremViolation("psi is not injective", witness(s, d));
    image.emplace(s, d);
  };
  assign(seed_src, seed_tgt);

  std::deque<Elem> queue{seed_src};
  while (!queue.empty()) {
    Elem s = queue.front();
    queue.pop_front();
    const Elem d = image.at(s);
    for (int i = 0; i < rd->rank(); ++i) {
      for (bool up : {true, false}) {
        auto s2 = up ? source->e(s, i) : source->f(s, i);
        auto d2 = up ? target->e(d, i) : target->f(d, i);
        // only required where the source operator is defined: the T factors
        // make the target non-seminormal
        if (s2 && !d2) {
          table.commutes[i] = false;
          throw TheoremViolation("psi does not commute with an operator", witness(s, d));
        }
        if (!s2) continue;
        auto it = image.find(*s2);
        if (it != image.end()) {
          if (it->second != *d2) {
            table.commutes[i] = false;
            throw TheoremViolation("psi propagation is path-dependent", witness(*s2, *d2));
          }
          continue;
        }
        assign(*s2, *d2);
        queue.push_back(*s2);
      }
    }
  }

  table.injective = true;
  table.total = image.size() == source->elements().size();
  if (!table.total) throw TheoremViolation("psi propagation did not reach all of B_{l-k}");
  for (auto& [s, d] : image) table.pairs.emplace_back(s, d);  // d is the B_l middle (T factors encode nothing)
  return table;
}

}  // namespace crystal
