#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crystal/ext_int.hpp"
#include "crystal/root_data.hpp"

namespace crystal {

using json = nlohmann::json;

/// Flat integer encoding of a crystal element. Each crystal fixes the
/// encoding length (its arity); a tensor product concatenates the encodings
/// of its factors, so re-bracketing leaves the encoding unchanged.
using Elem = std::vector<int>;
using ElemView = std::span<const int>;

class SoundnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computation contradicts a result that the theory guarantees.
class TheoremViolation : public std::runtime_error {
 public:
  TheoremViolation(const std::string& what, json witness = {})
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const json& witness() const { return witness_; }

 private:
  json witness_;
};

/// The abstract crystal contract: wt, ε_i, φ_i and the partial maps ẽ_i, f̃_i.
/// A disengaged optional from e()/f() is 0 (nil), not an error.
class Crystal {
 public:
  explicit Crystal(std::shared_ptr<const RootData> rd) : rd_(std::move(rd)) {}
  virtual ~Crystal() = default;

  const RootData& root_data() const { return *rd_; }
  const std::shared_ptr<const RootData>& root_data_ptr() const { return rd_; }
  int rank() const { return rd_->rank(); }

  virtual std::size_t arity() const = 0;
  virtual Weight wt(ElemView b) const = 0;
  virtual ExtInt eps(ElemView b, int i) const = 0;
  virtual ExtInt phi(ElemView b, int i) const = 0;
  virtual std::optional<Elem> e(ElemView b, int i) const = 0;
  virtual std::optional<Elem> f(ElemView b, int i) const = 0;

  /// Canonical nested-JSON form of an element.
  virtual json to_json(ElemView b) const = 0;
  virtual Elem from_json(const json& j) const = 0;
  /// Short human-readable description of the crystal itself.
  virtual std::string describe() const = 0;

  std::string key(ElemView b) const { return to_json(b).dump(); }

  /// ẽ_i applied until the next application is nil.
  Elem e_max(ElemView b, int i) const;
  /// ε(b) = Σ ε_i(b) Λ_i; throws when some ε_i is −∞.
  Weight eps_weight(ElemView b) const;
  Weight phi_weight(ElemView b) const;

 private:
  std::shared_ptr<const RootData> rd_;
};

using CrystalPtr = std::shared_ptr<const Crystal>;

/// The one-element crystal T_λ. Its encoding is empty.
class TCrystal final : public Crystal {
 public:
  TCrystal(std::shared_ptr<const RootData> rd, Weight lambda);

  const Weight& lambda() const { return lambda_; }
  Elem element() const { return {}; }

  std::size_t arity() const override { return 0; }
  Weight wt(ElemView) const override { return lambda_; }
  ExtInt eps(ElemView, int) const override { return ExtInt::neg_inf(); }
  ExtInt phi(ElemView, int) const override { return ExtInt::neg_inf(); }
  std::optional<Elem> e(ElemView, int) const override { return std::nullopt; }
  std::optional<Elem> f(ElemView, int) const override { return std::nullopt; }
  json to_json(ElemView) const override;
  Elem from_json(const json& j) const override;
  std::string describe() const override;

 private:
  Weight lambda_;
};

/// B_1 ⊗ B_2 under the max-comparison tensor rule.
class TensorCrystal final : public Crystal {
 public:
  TensorCrystal(CrystalPtr left, CrystalPtr right);

  const Crystal& left() const { return *left_; }
  const Crystal& right() const { return *right_; }
  ElemView left_part(ElemView b) const { return b.first(left_->arity()); }
  ElemView right_part(ElemView b) const { return b.subspan(left_->arity()); }
  static Elem pair(ElemView b1, ElemView b2);

  std::size_t arity() const override { return left_->arity() + right_->arity(); }
  Weight wt(ElemView b) const override;
  ExtInt eps(ElemView b, int i) const override;
  ExtInt phi(ElemView b, int i) const override;
  std::optional<Elem> e(ElemView b, int i) const override;
  std::optional<Elem> f(ElemView b, int i) const override;
  json to_json(ElemView b) const override;
  Elem from_json(const json& j) const override;
  std::string describe() const override;

 private:
  CrystalPtr left_;
  CrystalPtr right_;
};

/// Left-nested tensor product of several crystals: ((c0 ⊗ c1) ⊗ c2) ⊗ ...
CrystalPtr tensor(const std::vector<CrystalPtr>& factors);

struct SeminormalResult {
  bool ok = false;
  std::string reason;
};

/// Checks that ε_i(b) and φ_i(b) equal the lengths of the ẽ_i- and f̃_i-strings
/// through b. Throws BoundExceeded when a string runs past `bound` steps.
SeminormalResult seminormal_check(const Crystal& c, ElemView b, int i, int bound = 10000);

/// Checks the crystal axioms at b for color i. Returns an empty string on
/// success, otherwise a description of the first violated axiom.
std::string axiom_violation(const Crystal& c, ElemView b, int i);

}  // namespace crystal
