#pragma once

#include <map>
#include <vector>

namespace crystal {

/// Generalized Cartan matrix a[i][j] = ⟨h_i, α_j⟩.
using CartanMatrix = std::vector<std::vector<int>>;
/// Root-lattice coordinates: Σ c_j α_j.
using RootCoord = std::vector<int>;

/// Positive roots of a finite-type Cartan matrix, built by root strings.
/// Throws std::invalid_argument when more than `cap` roots appear.
std::vector<RootCoord> finite_positive_roots(const CartanMatrix& a, std::size_t cap = 4096);

/// Character of the irreducible highest-weight module of a finite-type
/// algebra, as a map γ ↦ mult(λ - γ) over nonzero multiplicities. `highest`
/// holds ⟨h_i, λ⟩.
std::map<RootCoord, long long> finite_character(const CartanMatrix& a, const std::vector<int>& highest);

}  // namespace crystal
