#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crystal {

class InvalidType : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The seven affine families that carry coherent families of perfect crystals.
enum class Family {
  A1,           // A_n^(1)
  A2dual_odd,   // A_{2n-1}^(2)
  B1,           // B_n^(1)
  A2dual_even,  // A_{2n}^(2)
  D2dual,       // D_{n+1}^(2)
  C1,           // C_n^(1)
  D1,           // D_n^(1)
};

std::string_view family_tag(Family f);
Family parse_family_tag(std::string_view tag);
/// Smallest admissible rank parameter n for the family.
int family_floor(Family f);

struct AffineType {
  Family family = Family::A1;
  int n = 2;

  /// Throws InvalidType when n is below the family floor.
  void validate() const;
  /// Number of nodes |I| = n + 1.
  int rank() const { return n + 1; }
  std::string str() const;  // "A1:2"
  static AffineType parse(std::string_view text);

  friend bool operator==(const AffineType&, const AffineType&) = default;
};

/// Classical weight: the vector of pairings ⟨h_i, λ⟩ over I = {0..n}.
class Weight {
 public:
  Weight() = default;
  explicit Weight(std::size_t size) : v_(size, 0) {}
  explicit Weight(std::vector<int> values) : v_(std::move(values)) {}
  Weight(std::initializer_list<int> values) : v_(values) {}

  static Weight fundamental(std::size_t size, std::size_t i);

  std::size_t size() const { return v_.size(); }
  int operator[](std::size_t i) const { return v_[i]; }
  int& operator[](std::size_t i) { return v_[i]; }
  const std::vector<int>& values() const { return v_; }

  Weight& operator+=(const Weight& o);
  Weight& operator-=(const Weight& o);
  friend Weight operator+(Weight a, const Weight& b) { return a += b; }
  friend Weight operator-(Weight a, const Weight& b) { return a -= b; }
  friend Weight operator-(Weight a) {
    for (auto& x : a.v_) x = -x;
    return a;
  }
  friend Weight operator*(int k, Weight a) {
    for (auto& x : a.v_) x *= k;
    return a;
  }
  friend auto operator<=>(const Weight&, const Weight&) = default;

  /// Compact token form, e.g. "L0+2L1"; zero weight prints as "0".
  std::string token() const;
  /// Strict parse of the token form for an index set of the given size.
  static Weight parse(std::string_view text, std::size_t size);

 private:
  std::vector<int> v_;
};

std::ostream& operator<<(std::ostream& os, const Weight& w);

bool is_dominant(const Weight& lambda);

/// Cartan matrix a_ij = ⟨h_i, α_j⟩, marks (δ coefficients) and comarks
/// (c coefficients) for one affine type.
class RootData {
 public:
  explicit RootData(AffineType t);

  const AffineType& type() const { return type_; }
  int rank() const { return type_.rank(); }
  int cartan(int i, int j) const { return cartan_[i][j]; }
  const std::vector<std::vector<int>>& cartan_matrix() const { return cartan_; }
  const std::vector<int>& marks() const { return marks_; }
  const std::vector<int>& comarks() const { return comarks_; }

  /// α_j as a classical weight: component i is a_ij.
  Weight alpha(int j) const;
  Weight zero() const { return Weight(static_cast<std::size_t>(rank())); }
  Weight fundamental(int i) const { return Weight::fundamental(rank(), i); }

  /// ⟨c, λ⟩.
  int level(const Weight& lambda) const;

  /// All dominant weights of the given level.
  std::vector<Weight> dominant_weights(int level) const;

 private:
  AffineType type_;
  std::vector<std::vector<int>> cartan_;
  std::vector<int> marks_;
  std::vector<int> comarks_;
};

RootData build_root_data(AffineType t);
int level(const RootData& rd, const Weight& lambda);

/// λ' = σ^{-1}λ per family.
Weight sigma_inv(const AffineType& t, const Weight& lambda);
/// σλ, the inverse of sigma_inv.
Weight sigma(const AffineType& t, const Weight& lambda);

}  // namespace crystal
