#include "crystal/root_data.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <utility>

namespace crystal {

namespace {

struct FamilyInfo {
  Family family;
  std::string_view tag;
  int floor;
};

constexpr FamilyInfo kFamilies[] = {
    {Family::A1, "A1", 2},          {Family::A2dual_odd, "A2dual_odd", 3},
    {Family::B1, "B1", 3},          {Family::A2dual_even, "A2dual_even", 2},
    {Family::D2dual, "D2dual", 2},  {Family::C1, "C1", 2},
    {Family::D1, "D1", 4},
};

const FamilyInfo& info(Family f) {
  for (const auto& fi : kFamilies)
    if (fi.family == f) return fi;
  throw InvalidType("unknown family");
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument("malformed " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

void link(std::vector<std::vector<int>>& a, int i, int j, int aij, int aji) {
  a[i][j] = aij;
  a[j][i] = aji;
}

}  // namespace

std::string_view family_tag(Family f) { return info(f).tag; }

Family parse_family_tag(std::string_view tag) {
  for (const auto& fi : kFamilies)
    if (fi.tag == tag) return fi.family;
  throw InvalidType("unknown family tag '" + std::string(tag) + "'");
}

int family_floor(Family f) { return info(f).floor; }

void AffineType::validate() const {
  if (n < family_floor(family))
    throw InvalidType(std::string(family_tag(family)) + " requires n >= " +
                      std::to_string(family_floor(family)) + ", got n = " + std::to_string(n));
}

std::string AffineType::str() const {
  return std::string(family_tag(family)) + ":" + std::to_string(n);
}

AffineType AffineType::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw InvalidType("affine type must look like TAG:n, got '" + std::string(text) + "'");
  AffineType t{parse_family_tag(text.substr(0, colon)), 0};
  try {
    t.n = parse_int(text.substr(colon + 1), "rank");
  } catch (const std::invalid_argument& e) {
    throw InvalidType(e.what());
  }
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Weight

Weight Weight::fundamental(std::size_t size, std::size_t i) {
  Weight w(size);
  w.v_.at(i) = 1;
  return w;
}

Weight& Weight::operator+=(const Weight& o) {
  if (o.size() != size()) throw DimensionMismatch("weight sizes differ");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Weight& Weight::operator-=(const Weight& o) {
  if (o.size() != size()) throw DimensionMismatch("weight sizes differ");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

std::string Weight::token() const {
  std::string out;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    int c = v_[i];
    if (c == 0) continue;
    if (c < 0)
      out += "-";
    else if (!out.empty())
      out += "+";
    if (c != 1 && c != -1) out += std::to_string(c < 0 ? -c : c);
    out += "L" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

Weight Weight::parse(std::string_view text, std::size_t size) {
  Weight w(size);
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s == "0") return w;
  if (s.empty()) throw std::invalid_argument("empty weight");
  std::size_t pos = 0;
  while (pos < s.size()) {
    int sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (pos != 0) {
      throw std::invalid_argument("malformed weight '" + std::string(text) + "'");
    }
    std::size_t l = s.find('L', pos);
    if (l == std::string::npos) throw std::invalid_argument("malformed weight '" + std::string(text) + "'");
    int coeff = l == pos ? 1 : parse_int(std::string_view(s).substr(pos, l - pos), "coefficient");
    std::size_t end = l + 1;
    while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
    int idx = parse_int(std::string_view(s).substr(l + 1, end - l - 1), "node index");
    if (idx < 0 || static_cast<std::size_t>(idx) >= size)
      throw std::invalid_argument("node L" + std::to_string(idx) + " not in index set 0.." +
                                  std::to_string(size - 1));
    w.v_[idx] += sign * coeff;
    pos = end;
  }
  return w;
}

std::ostream& operator<<(std::ostream& os, const Weight& w) {
  os << '(';
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  return os << ')';
}

bool is_dominant(const Weight& lambda) {
  for (int x : lambda.values())
    if (x < 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// RootData

RootData::RootData(AffineType t) : type_(t) {
  t.validate();
  const int n = t.n;
  const int r = n + 1;
  cartan_.assign(r, std::vector<int>(r, 0));
  for (int i = 0; i < r; ++i) cartan_[i][i] = 2;
  marks_.assign(r, 1);
  comarks_.assign(r, 1);
  auto& a = cartan_;

  switch (t.family) {
    case Family::A1:
      for (int i = 0; i < n; ++i) link(a, i, i + 1, -1, -1);
      link(a, n, 0, -1, -1);
      break;

    case Family::B1:
    case Family::A2dual_odd: {
      // 0 and 1 both attach to 2; chain 2 - ... - n with a double bond n-1 = n.
      link(a, 0, 2, -1, -1);
      link(a, 1, 2, -1, -1);
      for (int i = 2; i + 1 < n; ++i) link(a, i, i + 1, -1, -1);
      if (t.family == Family::B1) {
        link(a, n - 1, n, -1, -2);
        for (int i = 2; i <= n; ++i) marks_[i] = 2;
        for (int i = 2; i < n; ++i) comarks_[i] = 2;
      } else {
        link(a, n - 1, n, -2, -1);
        for (int i = 2; i < n; ++i) marks_[i] = 2;
        for (int i = 2; i <= n; ++i) comarks_[i] = 2;
      }
      break;
    }

    case Family::C1:
      link(a, 0, 1, -1, -2);
      for (int i = 1; i + 1 < n; ++i) link(a, i, i + 1, -1, -1);
      link(a, n - 1, n, -2, -1);
      for (int i = 1; i < n; ++i) marks_[i] = 2;
      break;

    case Family::A2dual_even:
      link(a, 0, 1, -2, -1);
      for (int i = 1; i + 1 < n; ++i) link(a, i, i + 1, -1, -1);
      link(a, n - 1, n, -2, -1);
      for (int i = 0; i < n; ++i) marks_[i] = 2;
      for (int i = 1; i <= n; ++i) comarks_[i] = 2;
      break;

    case Family::D2dual:
      link(a, 0, 1, -2, -1);
      for (int i = 1; i + 1 < n; ++i) link(a, i, i + 1, -1, -1);
      link(a, n - 1, n, -1, -2);
      for (int i = 1; i < n; ++i) comarks_[i] = 2;
      break;

    case Family::D1:
      link(a, 0, 2, -1, -1);
      link(a, 1, 2, -1, -1);
      for (int i = 2; i + 2 < n; ++i) link(a, i, i + 1, -1, -1);
      link(a, n - 2, n - 1, -1, -1);
      link(a, n - 2, n, -1, -1);
      for (int i = 2; i <= n - 2; ++i) marks_[i] = comarks_[i] = 2;
      break;
  }
}

Weight RootData::alpha(int j) const {
  Weight w(static_cast<std::size_t>(rank()));
  for (int i = 0; i < rank(); ++i) w[i] = cartan_[i][j];
  return w;
}

int RootData::level(const Weight& lambda) const {
  if (lambda.size() != static_cast<std::size_t>(rank()))
    throw DimensionMismatch("weight has " + std::to_string(lambda.size()) + " components, index set has " +
                            std::to_string(rank()));
  int s = 0;
  for (int i = 0; i < rank(); ++i) s += comarks_[i] * lambda[i];
  return s;
}

std::vector<Weight> RootData::dominant_weights(int lvl) const {
  std::vector<Weight> out;
  if (lvl < 0) return out;
  Weight w(static_cast<std::size_t>(rank()));
  auto rec = [&](auto&& self, int i, int remaining) -> void {
    if (i == rank()) {
      if (remaining == 0) out.push_back(w);
      return;
    }
    for (int c = 0; c * comarks_[i] <= remaining; ++c) {
      w[i] = c;
      self(self, i + 1, remaining - c * comarks_[i]);
    }
    w[i] = 0;
  };
  rec(rec, 0, lvl);
  return out;
}

RootData build_root_data(AffineType t) { return RootData(t); }

int level(const RootData& rd, const Weight& lambda) { return rd.level(lambda); }

// ---------------------------------------------------------------------------
// σ

Weight sigma_inv(const AffineType& t, const Weight& lambda) {
  const int r = t.rank();
  if (lambda.size() != static_cast<std::size_t>(r)) throw DimensionMismatch("weight size does not match type");
  Weight out = lambda;
  switch (t.family) {
    case Family::A1:
      // coefficient of Λ_{i+1} in λ' is the coefficient of Λ_i in λ
      for (int i = 0; i < r; ++i) out[(i + 1) % r] = lambda[i];
      break;
    case Family::A2dual_odd:
    case Family::B1:
      std::swap(out[0], out[1]);
      break;
    case Family::A2dual_even:
    case Family::D2dual:
    case Family::C1:
      break;
    case Family::D1:
      std::swap(out[0], out[1]);
      std::swap(out[t.n - 1], out[t.n]);
      break;
  }
  return out;
}

Weight sigma(const AffineType& t, const Weight& lambda) {
  if (t.family != Family::A1) return sigma_inv(t, lambda);  // involutions
  const int r = t.rank();
  if (lambda.size() != static_cast<std::size_t>(r)) throw DimensionMismatch("weight size does not match type");
  Weight out(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) out[i] = lambda[(i + 1) % r];
  return out;
}

}  // namespace crystal
