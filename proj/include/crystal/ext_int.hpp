#pragma once

#include <algorithm>
#include <compare>
#include <limits>
#include <ostream>
#include <string>

namespace crystal {

/// Integer extended by a bottom element −∞.
///
/// Arithmetic is total: (−∞) + k = −∞ and max(−∞, k) = k. Comparisons treat
/// −∞ as smaller than every integer; two −∞ compare equal.
class ExtInt {
 public:
  constexpr ExtInt() = default;
  constexpr ExtInt(int v) : value_(v), finite_(true) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtInt neg_inf() { return ExtInt{}; }

  constexpr bool is_finite() const { return finite_; }
  constexpr bool is_neg_inf() const { return !finite_; }

  /// Finite value; undefined for −∞ (callers check is_finite first).
  constexpr int value() const { return value_; }

  constexpr ExtInt operator+(ExtInt o) const {
    if (!finite_ || !o.finite_) return neg_inf();
    return ExtInt(value_ + o.value_);
  }
  constexpr ExtInt operator-(int k) const { return finite_ ? ExtInt(value_ - k) : neg_inf(); }
  constexpr ExtInt operator+(int k) const { return finite_ ? ExtInt(value_ + k) : neg_inf(); }

  friend constexpr bool operator==(ExtInt a, ExtInt b) {
    if (!a.finite_ || !b.finite_) return a.finite_ == b.finite_;
    return a.value_ == b.value_;
  }
  friend constexpr std::strong_ordering operator<=>(ExtInt a, ExtInt b) {
    if (!a.finite_ && !b.finite_) return std::strong_ordering::equal;
    if (!a.finite_) return std::strong_ordering::less;
    if (!b.finite_) return std::strong_ordering::greater;
    return a.value_ <=> b.value_;
  }

  std::string str() const { return finite_ ? std::to_string(value_) : std::string("-inf"); }

 private:
  int value_ = 0;
  bool finite_ = false;
};

constexpr ExtInt max(ExtInt a, ExtInt b) { return a < b ? b : a; }

inline std::ostream& operator<<(std::ostream& os, ExtInt x) { return os << x.str(); }

}  // namespace crystal
