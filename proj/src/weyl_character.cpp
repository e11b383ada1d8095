#include "crystal/weyl_character.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace crystal {

namespace {

int height(const RootCoord& c) { return std::accumulate(c.begin(), c.end(), 0); }

// ⟨h_j, Σ c_k α_k⟩
int pair_with(const CartanMatrix& a, std::size_t j, const RootCoord& c) {
  int s = 0;
  for (std::size_t k = 0; k < c.size(); ++k) s += a[j][k] * c[k];
  return s;
}

}  // namespace

std::vector<RootCoord> finite_positive_roots(const CartanMatrix& a, std::size_t cap) {
  const std::size_t r = a.size();
  std::set<RootCoord> seen;
  std::vector<RootCoord> roots;
  for (std::size_t i = 0; i < r; ++i) {
    RootCoord c(r, 0);
    c[i] = 1;
    seen.insert(c);
    roots.push_back(c);
  }
  // roots is kept in nondecreasing height, so each root is final once reached
  for (std::size_t idx = 0; idx < roots.size(); ++idx) {
    const RootCoord beta = roots[idx];
    for (std::size_t j = 0; j < r; ++j) {
      int p = 0;
      RootCoord down = beta;
      while (true) {
        --down[j];
        if (down[j] < 0 || !seen.count(down)) break;
        ++p;
      }
      int q = p - pair_with(a, j, beta);
      if (q <= 0) continue;
      RootCoord up = beta;
      ++up[j];
      if (seen.insert(up).second) {
        roots.push_back(up);
        if (roots.size() > cap) throw std::invalid_argument("root system is not of finite type");
      }
    }
  }
  std::stable_sort(roots.begin(), roots.end(), [](const RootCoord& x, const RootCoord& y) { return height(x) < height(y); });
  return roots;
}

std::map<RootCoord, long long> finite_character(const CartanMatrix& a, const std::vector<int>& highest) {
  const std::size_t r = a.size();
  if (highest.size() != r) throw std::invalid_argument("highest weight size mismatch");
  for (int x : highest)
    if (x < 0) throw std::invalid_argument("highest weight is not dominant");
  auto roots = finite_positive_roots(a);

  // Weyl orbit of λ + ρ, tracked as (pairings, c-vector of (λ+ρ) - w(λ+ρ), sign)
  struct Orbit {
    std::vector<int> mu;
    RootCoord c;
    int sign;
  };
  std::vector<int> start(highest);
  for (auto& x : start) x += 1;
  std::map<std::vector<int>, std::size_t> where;
  std::vector<Orbit> orbit{{start, RootCoord(r, 0), 1}};
  where[start] = 0;
  for (std::size_t idx = 0; idx < orbit.size(); ++idx) {
    for (std::size_t i = 0; i < r; ++i) {
      Orbit cur = orbit[idx];
      int m = cur.mu[i];
      for (std::size_t j = 0; j < r; ++j) cur.mu[j] -= m * a[j][i];
      cur.c[i] += m;
      cur.sign = -cur.sign;
      if (!where.count(cur.mu)) {
        where[cur.mu] = orbit.size();
        orbit.push_back(cur);
        if (orbit.size() > 100000) throw std::invalid_argument("Weyl group is not finite");
      }
    }
  }

  int h_max = 0;
  for (const auto& o : orbit) h_max = std::max(h_max, height(o.c));

  // Kostant partition function on the box of heights ≤ h_max
  std::vector<RootCoord> cells;
  {
    RootCoord c(r, 0);
    auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
      if (pos == r) {
        cells.push_back(c);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        c[pos] = v;
        self(self, pos + 1, left - v);
      }
      c[pos] = 0;
    };
    rec(rec, 0, h_max);
  }
  std::stable_sort(cells.begin(), cells.end(), [](const RootCoord& x, const RootCoord& y) { return height(x) < height(y); });
  std::map<RootCoord, std::size_t> cell_index;
  for (std::size_t k = 0; k < cells.size(); ++k) cell_index[cells[k]] = k;
  std::vector<long long> part(cells.size(), 0);
  part[cell_index[RootCoord(r, 0)]] = 1;
  for (const auto& beta : roots) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      RootCoord prev = cells[k];
      bool ok = true;
      for (std::size_t j = 0; j < r; ++j) {
        prev[j] -= beta[j];
        if (prev[j] < 0) ok = false;
      }
      if (ok) part[k] += part[cell_index.at(prev)];
    }
  }

  std::map<RootCoord, long long> out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    long long m = 0;
    for (const auto& o : orbit) {
      RootCoord rest = cells[k];
      bool ok = true;
      for (std::size_t j = 0; j < r; ++j) {
        rest[j] -= o.c[j];
        if (rest[j] < 0) ok = false;
      }
      if (ok) m += o.sign * part[cell_index.at(rest)];
    }
    if (m != 0) out[cells[k]] = m;
  }
  return out;
}

}  // namespace crystal
