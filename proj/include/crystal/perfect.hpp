#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crystal/crystal.hpp"
#include "crystal/root_data.hpp"

namespace crystal {

/// Coordinate tuple of a perfect-crystal element, in the family's layout:
///   A1:                      (x_1, ..., x_{n+1})
///   A2dual_odd, A2dual_even,
///   C1, D1:                  (x_1, ..., x_n, x̄_n, ..., x̄_1)
///   B1, D2dual:              (x_1, ..., x_n, x_0, x̄_n, ..., x̄_1), x_0 ∈ {0, 1}
using Coord = std::vector<int>;

class LevelViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Indexing into the coordinate layout of a family.
class CoordLayout {
 public:
  explicit CoordLayout(AffineType t);

  std::size_t arity() const { return arity_; }
  bool has_x0() const { return has_x0_; }
  /// Position of x_i, 1 <= i <= n (or n+1 for A1).
  std::size_t x(int i) const { return static_cast<std::size_t>(i - 1); }
  /// Position of x̄_i, 1 <= i <= n.
  std::size_t xbar(int i) const;
  std::size_t x0() const { return static_cast<std::size_t>(n_); }

 private:
  int n_;
  bool has_x0_;
  std::size_t arity_;
};

std::size_t coord_arity(const AffineType& t);
std::string format_coord(const Coord& c);
Coord parse_coord(const std::string& text);

/// Membership in B_l. Throws std::invalid_argument on arity mismatch.
bool bl_contains(const AffineType& t, int l, const Coord& coords);
/// Every element of B_l in lexicographic order.
std::vector<Coord> enumerate_bl(const AffineType& t, int l);

/// The family's level formula k(λ), coded independently of the comark table.
int level_of_weight(const AffineType& t, const Weight& lambda);

/// Membership in B_l^(λ). Throws LevelViolation unless level(λ) < l.
bool head_set_contains(const AffineType& t, int l, const Weight& lambda, const Coord& coords);
/// The first inequality of the B_l^(λ) predicate that fails, if any.
std::optional<std::string> head_set_failure(const AffineType& t, int l, const Weight& lambda, const Coord& coords);
std::vector<Coord> enumerate_head_set(const AffineType& t, int l, const Weight& lambda);

/// Ψ: u_λ ⊗ B_l^(λ) → B_{l-k} on coordinates. (·)_+ is max(·, 0).
Coord psi_map(const AffineType& t, int l, const Weight& lambda, const Coord& coords);
/// The unique preimage of coords ∈ B_{l-k} in B_l^(λ).
Coord psi_inverse(const AffineType& t, int l, const Weight& lambda, const Coord& coords);

/// Family A_n^(1) perfect crystal B_l with its operators:
///   ε_i = x_{i+1}, φ_i = x_i (1 <= i <= n); ε_0 = x_1, φ_0 = x_{n+1};
///   f̃_i moves one unit from the φ_i-coordinate to the ε_i-coordinate.
class PerfectCrystalA final : public Crystal {
 public:
  PerfectCrystalA(std::shared_ptr<const RootData> rd, int l);

  int level() const { return l_; }
  std::vector<Elem> elements() const;

  std::size_t arity() const override { return static_cast<std::size_t>(rank()); }
  Weight wt(ElemView b) const override;
  ExtInt eps(ElemView b, int i) const override;
  ExtInt phi(ElemView b, int i) const override;
  std::optional<Elem> e(ElemView b, int i) const override;
  std::optional<Elem> f(ElemView b, int i) const override;
  json to_json(ElemView b) const override;
  Elem from_json(const json& j) const override;
  std::string describe() const override;

 private:
  // coordinate positions carrying φ_i and ε_i
  std::size_t phi_pos(int i) const { return i == 0 ? static_cast<std::size_t>(rank() - 1) : i - 1; }
  std::size_t eps_pos(int i) const { return static_cast<std::size_t>(i); }
  int l_;
};

/// B_l^min for family A1 (equal to B_l there).
std::vector<Coord> minimal_elements(const AffineType& t, int l);
/// The unique minimal b ∈ B_l with ε(b) = μ.
Coord minimal_for(const AffineType& t, int l, const Weight& mu);

/// Finite crystal morphism stored as an explicit table.
struct MorphismTable {
  std::string source;
  std::string target;
  std::vector<std::pair<Elem, Elem>> pairs;
  std::optional<Weight> lambda;        // target shaped as T_λ ⊗ · ⊗ T_{-λ'}
  std::optional<Weight> lambda_prime;
  std::vector<bool> commutes;          // per color, ẽ_i and f̃_i commute with the map
  bool injective = false;
  bool total = false;

  std::map<Elem, Elem> as_map() const { return {pairs.begin(), pairs.end()}; }
  json to_json() const;
};

/// The embedding ψ: B_{l-k} → T_λ ⊗ B_l ⊗ T_{-λ'} (family A1), built by
/// seeding one minimal pair and propagating along ẽ/f̃ edges. Pairs store the
/// middle B_l coordinates of the image. Throws TheoremViolation on any
/// inconsistency.
MorphismTable build_psi_embedding(const AffineType& t, int k, int l, const Weight& lambda);

}  // namespace crystal
