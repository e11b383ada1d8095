#include <doctest.h>

#include <random>

#include "crystal/path.hpp"
#include "oracles.hpp"

using namespace crystal;

namespace {

std::shared_ptr<const RootData> rd_a(int n) { return std::make_shared<const RootData>(AffineType{Family::A1, n}); }

}  // namespace

TEST_SUITE("path_model") {
  TEST_CASE("ground state of B(L0) with three slots") {
    auto rd = rd_a(2);
    PathCrystal p(rd, rd->fundamental(0), 3);
    auto g = p.ground_state();
    CHECK(p.slot(g, 3) == Coord{1, 0, 0});
    CHECK(p.slot(g, 2) == Coord{0, 1, 0});
    CHECK(p.slot(g, 1) == Coord{0, 0, 1});
    for (int i = 0; i < 3; ++i) {
      CHECK(p.eps(g, i) == ExtInt(0));
      CHECK_FALSE(p.e(g, i).has_value());
    }
  }

  TEST_CASE("ground state weight is lambda") {
    for (int n : {2, 3})
      for (int k = 1; k <= 2; ++k)
        for (const auto& lam : rd_a(n)->dominant_weights(k))
          for (int N = 1; N <= 6; ++N) {
            PathCrystal p(rd_a(n), lam, N);
            CHECK(p.wt(p.ground_state()) == lam);
            CHECK(p.to_json(p.ground_state())["mu_N"].get<std::vector<int>>().size() == static_cast<std::size_t>(n + 1));
          }
  }

  TEST_CASE("f on the ground state follows the tensor rule") {
    auto rd = rd_a(2);
    PathCrystal p(rd, rd->fundamental(0), 3);
    auto g = p.ground_state();
    auto y = p.f(g, 0);
    REQUIRE(y.has_value());
    // only slot 1 = (0,0,1) has φ_0 > 0; the rule picks it
    CHECK(p.slot(*y, 1) == Coord{1, 0, 0});
    CHECK(p.slot(*y, 2) == Coord{0, 1, 0});
    CHECK_FALSE(p.f(g, 1).has_value());
  }

  TEST_CASE("truncation fault") {
    auto rd = rd_a(2);
    PathCrystal p(rd, rd->fundamental(0), 1);
    auto g = p.ground_state();
    auto y = p.f(g, 0);
    REQUIRE(y.has_value());
    bool faulted = false;
    Elem cur = *y;
    for (int step = 0; step < 6 && !faulted; ++step) {
      try {
        for (int i = 0; i < 3; ++i) {
          auto z = p.f(cur, i);
          if (z) {
            cur = *z;
            break;
          }
        }
      } catch (const TruncationFault& tf) {
        faulted = true;
        CHECK(tf.suggested_increase() >= 1);
      }
    }
    CHECK(faulted);
  }

  TEST_CASE("deepening commutes with operators") {
    std::mt19937 rng(11);
    auto rd = rd_a(2);
    Weight lam{1, 1, 0};
    PathCrystal small(rd, lam, 4), big(rd, lam, 7);
    for (int walk = 0; walk < 50; ++walk) {
      Elem x = small.ground_state();
      for (int step = 0; step < 12; ++step) {
        int i = static_cast<int>(rng() % 3);
        bool raise = rng() % 3 == 0;
        std::optional<Elem> y;
        try {
          y = raise ? small.e(x, i) : small.f(x, i);
        } catch (const TruncationFault&) {
          break;
        }
        auto yb = raise ? big.e(small.deepen(x, 3), i) : big.f(small.deepen(x, 3), i);
        REQUIRE(y.has_value() == yb.has_value());
        if (!y) continue;
        CHECK(small.deepen(*y, 3) == *yb);
        CHECK(small.wt(*y) == big.wt(*yb));
        x = *y;
      }
    }
  }

  TEST_CASE("characters against the affine Weyl-Kac formula") {
    struct Case {
      int n;
      std::vector<int> lam;
      int depth;
    };
    for (const auto& c : std::vector<Case>{{2, {1, 0, 0}, 8}, {2, {0, 1, 1}, 6}, {2, {2, 0, 0}, 6}, {3, {1, 0, 0, 0}, 6},
                                           {3, {1, 0, 1, 0}, 5}, {4, {0, 0, 1, 0, 0}, 5}}) {
      CAPTURE(c.n);
      CAPTURE(c.depth);
      auto pg = generate_bl_lambda_crystal(rd_a(c.n), Weight(c.lam), c.depth);
      auto expect = oracle::affine_character_a(c.n, c.lam, c.depth);
      CHECK(oracle::graph_character(pg.graph, c.depth) == expect);
    }
  }

  TEST_CASE("generated truncation") {
    auto rd = rd_a(2);
    auto g0 = generate_bl_lambda_crystal(rd, rd->fundamental(0), 0);
    CHECK(g0.graph.size() == 1);
    auto g2 = generate_bl_lambda_crystal(rd, rd->fundamental(0), 2, 6);
    auto g3 = generate_bl_lambda_crystal(rd, rd->fundamental(0), 3, 6);
    for (std::size_t v = 0; v < g2.graph.size(); ++v) {
      const auto& nd = g2.graph.node(static_cast<int>(v));
      int w = g3.graph.find(nd.key);
      REQUIRE(w >= 0);
      CHECK(g3.graph.node(w).wt == nd.wt);
      if (nd.frontier) continue;
      for (int i = 0; i < 3; ++i) {
        int a = g2.graph.f_raw(static_cast<int>(v), i), b = g3.graph.f_raw(w, i);
        if (a >= 0) CHECK(g3.graph.node(b).key == g2.graph.node(a).key);
        if (a == CrystalGraph::kNil) CHECK(b == CrystalGraph::kNil);
      }
    }
    int highest = 0;
    for (const auto& nd : g3.graph.nodes()) {
      bool top = true;
      for (const auto& e : nd.eps) top = top && e == ExtInt(0);
      highest += top;
    }
    CHECK(highest == 1);
  }

  TEST_CASE("truncation retry grows the slot count") {
    int used = 0;
    int calls = 0;
    auto out = with_truncation_retry(
        2, 64,
        [&](int N) {
          ++calls;
          if (N < 9) throw TruncationFault("short", 3);
          return N;
        },
        &used);
    CHECK(out == 10);  // 2 -> 5 -> 10
    CHECK(used == 10);
    CHECK(calls == 3);
    CHECK_THROWS_AS(with_truncation_retry(2, 8, [](int) -> int { throw TruncationFault("never", 1); }), TruncationFault);
  }

  TEST_CASE("path JSON") {
    auto rd = rd_a(2);
    PathCrystal p(rd, rd->fundamental(0), 2);
    auto j = p.to_json(p.ground_state());
    CHECK(j == json::parse(R"({"mu_N":[0,1,0],"slots":[[0,1,0],[0,0,1]]})"));
    CHECK(p.from_json(j) == p.ground_state());
    CHECK_THROWS(p.from_json(json::parse(R"({"mu_N":[1,0,0],"slots":[[0,1,0],[0,0,1]]})")));
    CHECK_THROWS(PathCrystal(rd, Weight{1, -1, 0}, 2));
    CHECK_THROWS(PathCrystal(std::make_shared<const RootData>(AffineType{Family::C1, 2}), Weight{1, 0, 0}, 2));
  }
}
