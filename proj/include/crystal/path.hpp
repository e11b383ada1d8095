#pragma once

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "crystal/graph.hpp"
#include "crystal/perfect.hpp"

namespace crystal {

/// Raised when f̃ would act on the frozen boundary of a truncated path.
class TruncationFault : public std::runtime_error {
 public:
  TruncationFault(const std::string& what, int suggested_increase)
      : std::runtime_error(what), suggested_increase_(suggested_increase) {}
  /// Smallest number of extra slots after which the same step stays inside.
  int suggested_increase() const { return suggested_increase_; }

 private:
  int suggested_increase_;
};

/// Truncated realization of B(λ) (family A1):
///   u_{μ_N} ⊗ b_N ⊗ ... ⊗ b_1,  μ_N = σ^N λ,  b_j ∈ B_k,  k = level(λ).
/// The encoding lists the slots left to right (b_N first). The head has the
/// statistics of u_{μ_N}: ε = 0 and φ_i = ⟨h_i, μ_N⟩.
class PathCrystal final : public Crystal {
 public:
  PathCrystal(std::shared_ptr<const RootData> rd, Weight lambda, int slots);

  const Weight& lambda() const { return lambda_; }
  const Weight& frozen_weight() const { return mu_; }
  int slots() const { return n_slots_; }
  int slot_level() const { return k_; }

  /// Slot j = 1..N holds the minimal element with ε = σ^j λ.
  Elem ground_state() const;
  /// Coordinates of slot j (1 = rightmost).
  Coord slot(ElemView b, int j) const;
  /// The same element in the crystal with `extra` more slots.
  Elem deepen(ElemView b, int extra) const;

  std::size_t arity() const override { return static_cast<std::size_t>(n_slots_ * width_); }
  Weight wt(ElemView b) const override;
  ExtInt eps(ElemView b, int i) const override;
  ExtInt phi(ElemView b, int i) const override;
  std::optional<Elem> e(ElemView b, int i) const override;
  /// Throws TruncationFault when the tensor rule selects the frozen head.
  std::optional<Elem> f(ElemView b, int i) const override;
  json to_json(ElemView b) const override;
  Elem from_json(const json& j) const override;
  std::string describe() const override;

 private:
  // slot position p = 0..N-1 from the left
  ElemView at(ElemView b, int p) const { return b.subspan(static_cast<std::size_t>(p * width_), width_); }
  // index of the slot an operator acts on, -1 for the head
  int select(ElemView b, int i, bool raising) const;
  int fault_distance(ElemView b, int i) const;

  Weight lambda_;
  int n_slots_;
  int k_;
  int width_;
  Weight mu_;
  std::shared_ptr<PerfectCrystalA> slot_crystal_;
  std::vector<Coord> ground_;  // ground_[j] for j = 1..N (index 0 unused)
};

/// Default truncation for a depth-d computation.
inline int default_slots(int depth) { return depth + 2; }

/// Calls build(N), retrying with N = max(2N, N + suggestion) on TruncationFault
/// until N exceeds `cap`. Returns build's result; `used` receives the final N.
template <class F>
auto with_truncation_retry(int N, int cap, F&& build, int* used = nullptr) {
  while (true) {
    try {
      auto out = build(N);
      if (used) *used = N;
      return out;
    } catch (const TruncationFault& tf) {
      int next = std::max(2 * N, N + tf.suggested_increase());
      if (next > cap)
        throw TruncationFault(std::string("truncation fault persists up to N = ") + std::to_string(N) + ": " + tf.what(),
                              tf.suggested_increase());
      N = next;
    }
  }
}

struct PathGraph {
  CrystalGraph graph;
  int slots = 0;
};

/// Weight-depth ≤ d part of B(λ) by f̃-closure from the ground state. Nodes at
/// depth d are frontier; everything above is fully evaluated.
PathGraph generate_bl_lambda_crystal(std::shared_ptr<const RootData> rd, const Weight& lambda, int depth, int slots = 0,
                                     const Budget& budget = {}, int slot_cap = 512);

}  // namespace crystal
