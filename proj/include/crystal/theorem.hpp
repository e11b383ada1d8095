#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crystal/graph.hpp"
#include "crystal/path.hpp"
#include "crystal/perfect.hpp"

namespace crystal {

/// Outcome of one verification run: named conditions, the first
/// counterexample, sizes and timing.
struct VerificationReport {
  std::string theorem;
  json parameters = json::object();
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::vector<std::pair<std::string, bool>> conditions;
  std::optional<json> counterexample;
  json details = json::object();
  double seconds = 0;

  /// Records a condition; the first failing one supplies the counterexample.
  void check(const std::string& name, bool ok, json witness = {});
  bool pass() const;
  json to_json() const;
  std::string to_text() const;
};

struct NormalForm {
  int node = -1;
  int applications = 0;  // productive ẽ^max steps
  int sweeps = 0;
  json trace = json::array();  // [{"i": color, "eps": ε_i before the step}]
};

/// Round-robin sweeps of ẽ_i^max (i = 0, 1, ..., r-1) until `target` holds.
/// Throws TheoremViolation when a sweep makes no progress or `cap` sweeps pass.
NormalForm emax_normal_form(const CrystalGraph& g, int b, const std::function<bool(int)>& target, int cap = 1000);

struct Extension {
  std::vector<int> map;  // source node → target node, -1 when unmapped
  std::size_t mapped = 0;
  std::size_t choices_checked = 0;
  std::size_t choice_conflicts = 0;
  std::size_t commutation_checked = 0;
  std::size_t commutation_failures = 0;
  std::size_t label_failures = 0;
  std::size_t head_failures = 0;
  std::size_t region_size = 0;
  std::size_t region_unmapped = 0;
  std::size_t unchecked_edges = 0;  // edges whose far end lies outside the mapped part
  bool injective = true;
  std::optional<json> witness;
  json to_json() const;
};

/// Extends a head bijection D⊗u_λ → B to a source region by the rule
/// Ψ̃(b) = f̃_{i0}^{ε_{i0}(b)} Ψ̃(ẽ_{i0}^max b), iterated to a fixpoint. Every
/// admissible i0 is tried at every node; commutation with ẽ_i, f̃_i and
/// equality of wt, ε, φ are checked on the region. Requires more than two
/// colors.
Extension extend_morphism(const CrystalGraph& src, const CrystalGraph& tgt, const std::vector<std::pair<int, int>>& head_table,
                          const std::vector<char>& region);

struct Rank1Params {
  AffineType type;
  int l = 2;
  Weight lambda;
  int depth = 6;
  int slots = 0;  // 0 picks the default
  Budget budget;
};

/// Head of B(λ)⊗B_l is u_λ⊗B_l^(λ), it is ẽ-closed, and every u_λ⊗b
/// reaches it by ẽ^max sweeps.
VerificationReport verify_head_location(const Rank1Params& p);

/// B(λ)⊗B_l ≅ B_{l-k}⊗B(λ') on f̃-depth balls of radius `depth`, checked at
/// N, N+1 and N+2 slots.
VerificationReport verify_iso_theorem(const Rank1Params& p, int stability_runs = 3);

/// Decomposition of a truncated crystal into D⊗B(λ_D) over head components.
/// `rd` supplies the algebra; the graph must be evaluated to f̃-depth `depth`
/// around its head.
VerificationReport verify_decomposition(std::shared_ptr<const RootData> rd, const CrystalGraph& g, int depth,
                                        const Budget& budget = {});

/// Axioms, seminormality, connectivity and the minimal-element bijections of
/// B_l (family A1).
VerificationReport verify_perfectness(const AffineType& t, int l);

/// Ψ is a bijection B_l^(λ) → B_{l-k} for every dominant λ of level k (or the
/// one given), with psi_inverse agreeing; for family A1 also the embedding ψ.
VerificationReport verify_psi_bijection(const AffineType& t, int k, int l, std::optional<Weight> lambda = std::nullopt);

}  // namespace crystal
