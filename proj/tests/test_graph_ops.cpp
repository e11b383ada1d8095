#include <doctest.h>

#include <random>
#include <set>

#include "crystal/graph.hpp"
#include "crystal/path.hpp"
#include "crystal/perfect.hpp"
#include "oracles.hpp"

using namespace crystal;

namespace {

std::shared_ptr<const RootData> rd_a(int n) { return std::make_shared<const RootData>(AffineType{Family::A1, n}); }

CrystalGraph full_bl(const std::shared_ptr<const RootData>& rd, int l) {
  PerfectCrystalA b(rd, l);
  return generate(b, b.elements(), 1000, Direction::both);
}

int key_of(const CrystalGraph& g, const std::string& key) {
  int v = g.find(key);
  REQUIRE(v >= 0);
  return v;
}

// B(Λ_0) ⊗ B_2 for A1:2, f-generated from u ⊗ B_2.
struct HwTensor {
  std::shared_ptr<const PathCrystal> path;
  CrystalPtr crystal;
  CrystalGraph graph;
};

HwTensor hw_tensor(int n, const Weight& lam, int l, int depth, int slots) {
  auto rd = rd_a(n);
  auto path = std::make_shared<const PathCrystal>(rd, lam, slots);
  auto bl = std::make_shared<const PerfectCrystalA>(rd, l);
  auto c = tensor({path, bl});
  std::vector<Elem> seeds;
  for (const auto& b : bl->elements()) seeds.push_back(TensorCrystal::pair(path->ground_state(), b));
  return {path, c, generate(*c, seeds, depth, Direction::f_only)};
}

std::set<std::string> keys(const CrystalGraph& g, const std::vector<int>& nodes) {
  std::set<std::string> out;
  for (int v : nodes) out.insert(g.node(v).key);
  return out;
}

}  // namespace

TEST_SUITE("graph_ops") {
  TEST_CASE("generate B_1 from one element") {
    auto rd = rd_a(2);
    PerfectCrystalA b1(rd, 1);
    auto g = generate(b1, {Elem{1, 0, 0}}, 10, Direction::both);
    CHECK(g.size() == 3);
    for (const auto& nd : g.nodes()) CHECK_FALSE(nd.frontier);
    CHECK(g.validate().empty());
  }

  TEST_CASE("generate from T_lambda") {
    auto rd = rd_a(2);
    TCrystal t(rd, Weight{1, 0, 0});
    CHECK(generate(t, {Elem{}}, 5).size() == 1);
  }

  TEST_CASE("truncated B(L0) matches the character to depth 2") {
    auto rd = rd_a(2);
    PathCrystal p(rd, rd->fundamental(0), 4);
    auto g = generate(p, {p.ground_state()}, 2, Direction::f_only);
    auto expect = oracle::affine_character_a(2, {1, 0, 0}, 2);
    long long total = 0;
    for (const auto& [k, c] : expect) total += c;
    CHECK(g.size() == static_cast<std::size_t>(total));
    CHECK(oracle::graph_character(g, 2) == expect);
  }

  TEST_CASE("budget") {
    auto rd = rd_a(2);
    PathCrystal p(rd, rd->fundamental(0), 12);
    Budget b;
    b.max_nodes = 5;
    CHECK_THROWS_AS(generate(p, {p.ground_state()}, 10, Direction::f_only, b), BudgetExceeded);
  }

  TEST_CASE("closures on B_1") {
    auto g = full_bl(rd_a(2), 1);
    int e3 = key_of(g, "[0,0,1]");
    CHECK(e_closure(g, e3).size() == 3);
    for (std::size_t v = 0; v < g.size(); ++v) {
      auto e = e_closure(g, static_cast<int>(v));
      auto m = emax_closure(g, static_cast<int>(v));
      std::set<int> es(e.begin(), e.end());
      for (int x : m) CHECK(es.count(x));
    }
  }

  TEST_CASE("closure of a node without raisings is itself") {
    CrystalGraph g(2);
    for (int v = 0; v < 2; ++v) {
      GraphNode nd;
      nd.key = std::to_string(v);
      nd.wt = Weight{0, 0};
      nd.eps = {0, 0};
      nd.phi = {0, 0};
      g.add_node(nd);
    }
    g.link(0, 0, 1);
    for (int v = 0; v < 2; ++v)
      for (int i = 0; i < 2; ++i) {
        if (g.f_raw(v, i) == CrystalGraph::kUnknown) g.set_f_nil(v, i);
        if (g.e_raw(v, i) == CrystalGraph::kUnknown) g.set_e_nil(v, i);
      }
    CHECK(e_closure(g, 0) == std::vector<int>{0});
    CHECK(head(g) == std::vector<int>{0});
  }

  TEST_CASE("closure through an unevaluated node fails loudly") {
    auto rd = rd_a(2);
    PathCrystal p(rd, rd->fundamental(0), 6);
    auto g = generate(p, {p.ground_state()}, 2, Direction::e_only);
    CHECK(std::count_if(g.nodes().begin(), g.nodes().end(), [](const GraphNode& nd) { return !nd.frontier; }) == 1);
    auto t = hw_tensor(2, rd->fundamental(0), 2, 1, 4);
    bool threw = false;
    for (std::size_t v = 0; v < t.graph.size(); ++v) {
      if (!t.graph.node(static_cast<int>(v)).frontier) continue;
      try {
        e_closure(t.graph, static_cast<int>(v));
      } catch (const SoundnessError&) {
        threw = true;
      }
    }
    CHECK(threw);
  }

  TEST_CASE("head of B_1 is everything") {
    auto g = full_bl(rd_a(2), 1);
    CHECK(head(g).size() == 3);
    auto hc = head_crystal(g);
    CHECK(same_graph(hc, g));
  }

  TEST_CASE("head of B(L0) x B_2") {
    auto t = hw_tensor(2, Weight{1, 0, 0}, 2, 5, 7);
    auto hp = head_partial(t.graph);
    std::string u = t.path->to_json(t.path->ground_state()).dump();
    std::set<std::string> expect;
    for (auto b : {"[2,0,0]", "[1,1,0]", "[1,0,1]"}) expect.insert("[" + u + "," + b + "]");
    CHECK(keys(t.graph, hp.head) == expect);
    auto lit = oracle::literal_head(t.graph);
    std::vector<int> lit_clean;
    for (int v : lit)
      if (!hp.tainted[static_cast<std::size_t>(v)]) lit_clean.push_back(v);
    CHECK(lit_clean == hp.head);
  }

  TEST_CASE("head crystal of B(L0) x B_2 is B_1") {
    auto t = hw_tensor(2, Weight{1, 0, 0}, 2, 5, 7);
    auto hp = head_partial(t.graph);
    auto hc = head_crystal(t.graph, hp.head);
    CHECK(hc.size() == 3);
    auto b1 = full_bl(rd_a(2), 1);
    std::string u = t.path->to_json(t.path->ground_state()).dump();
    int s1 = key_of(hc, "[" + u + ",[2,0,0]]");
    int s2 = key_of(b1, "[1,0,0]");
    CHECK(is_isomorphic(hc, b1, {{s1, s2}}).ok);
    AffineType ty{Family::A1, 2};
    for (std::size_t v = 0; v < hc.size(); ++v) {
      auto elem = json::parse(hc.node(static_cast<int>(v)).key)[1].get<std::vector<int>>();
      auto image = psi_map(ty, 2, Weight{1, 0, 0}, elem);
      PerfectCrystalA b1c(rd_a(2), 1);
      CHECK(hc.node(static_cast<int>(v)).wt == b1c.wt(image));
    }
  }

  TEST_CASE("Weyl action") {
    auto g = full_bl(rd_a(2), 1);
    int e1 = key_of(g, "[1,0,0]");
    CHECK(g.node(weyl_action(g, e1, 1)).key == "[0,1,0]");
    CHECK(weyl_action(g, e1, 2) == e1);  // ⟨h_2, wt e1⟩ = 0
    for (int l = 1; l <= 3; ++l) {
      auto gl = full_bl(rd_a(3), l);
      for (std::size_t v = 0; v < gl.size(); ++v)
        for (int i = 0; i < gl.colors(); ++i) {
          int b = static_cast<int>(v);
          int s = weyl_action(gl, b, i);
          CHECK(weyl_action(gl, s, i) == b);
          CHECK(gl.node(s).wt[static_cast<std::size_t>(i)] == -gl.node(b).wt[static_cast<std::size_t>(i)]);
          auto e1s = e_closure(gl, b), e2s = e_closure(gl, s);
          CHECK(std::set<int>(e1s.begin(), e1s.end()) == std::set<int>(e2s.begin(), e2s.end()));
        }
      // S_w with the rightmost letter first
      int b = 0;
      CHECK(weyl_word(gl, b, {1, 2}) == weyl_action(gl, weyl_action(gl, b, 2), 1));
    }
  }

  TEST_CASE("is_isomorphic examples") {
    auto g = full_bl(rd_a(2), 1);
    int e1 = key_of(g, "[1,0,0]"), e2 = key_of(g, "[0,1,0]");
    CHECK(is_isomorphic(g, g, {{e1, e1}}).ok);
    auto r = is_isomorphic(g, g, {{e1, e2}});
    CHECK_FALSE(r.ok);
    CHECK(r.reason.find("wt") != std::string::npos);
    CHECK(r.node1 == e1);
  }

  TEST_CASE("rank-2 probe examples") {
    auto g1 = full_bl(rd_a(2), 1);
    auto r = rank2_regularity_probe(g1, {1, 2});
    CHECK(r.pass);
    CHECK(r.components == 1);
    auto g2 = full_bl(rd_a(2), 2);
    for (std::vector<int> J : {std::vector<int>{0, 1}, {0, 2}, {1, 2}}) CHECK(rank2_regularity_probe(g2, J).pass);
    auto rd = rd_a(2);
    TCrystal t(rd, Weight{1, 0, 0});
    auto gt = generate(t, {Elem{}}, 1);
    CHECK_FALSE(rank2_regularity_probe(gt, {1}).pass);
    CHECK_THROWS(rank2_regularity_probe(g2, {0, 1, 2}));
  }

  TEST_CASE("rank-2 probe rejects a broken crystal") {
    // two disjoint B_1 copies glued by an extra color-1 edge break the strings
    auto g = full_bl(rd_a(2), 1);
    auto j = g.to_json();
    for (auto& nd : j["nodes"]) nd["eps"][1] = 5;
    auto broken = CrystalGraph::from_json(j);
    CHECK_FALSE(rank2_regularity_probe(broken, {1, 2}).pass);
  }

  TEST_CASE("lemmas on finite perfect crystals") {
    for (int n : {2, 3})
      for (int l = 1; l <= 3; ++l) {
        auto g = full_bl(rd_a(n), l);
        auto h = head(g);
        CHECK(h.size() == g.size());
        for (std::size_t v = 0; v < g.size(); ++v) CHECK(e_closure(g, static_cast<int>(v)).size() == g.size());
      }
  }

  TEST_CASE("head properties on a tensor truncation") {
    auto t = hw_tensor(2, Weight{0, 1, 1}, 3, 5, 7);
    auto hp = head_partial(t.graph);
    std::set<int> hs(hp.head.begin(), hp.head.end());
    for (int b : hp.head)
      for (int i = 0; i < t.graph.colors(); ++i) {
        int u = t.graph.e_raw(b, i);
        CHECK((u == CrystalGraph::kNil || hs.count(u)));
      }
    std::string u = t.path->to_json(t.path->ground_state()).dump();
    for (std::size_t v = 0; v < t.graph.size(); ++v) {
      if (hp.tainted[v]) continue;
      auto e = e_closure(t.graph, static_cast<int>(v));
      CHECK(std::any_of(e.begin(), e.end(), [&](int x) { return hs.count(x); }));
    }
  }

  TEST_CASE("E^max meets D x u_lambda") {
    auto rd = rd_a(2);
    auto path = std::make_shared<const PathCrystal>(rd, Weight{1, 0, 0}, 8);
    auto bl = std::make_shared<const PerfectCrystalA>(rd, 2);
    auto c = tensor({bl, path});
    std::vector<Elem> seeds;
    for (const auto& b : bl->elements()) seeds.push_back(TensorCrystal::pair(b, path->ground_state()));
    auto g = generate(*c, seeds, 5, Direction::f_only);
    std::set<int> top;
    for (const auto& s : seeds) top.insert(find_elem(g, *c, s));
    auto hp = head_partial(g);
    CHECK(std::set<int>(hp.head.begin(), hp.head.end()) == top);
    std::size_t checked = 0;
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (hp.tainted[v]) continue;
      auto m = emax_closure(g, static_cast<int>(v));
      CHECK(std::any_of(m.begin(), m.end(), [&](int x) { return top.count(x); }));
      ++checked;
    }
    CHECK(checked > 20);
  }

  TEST_CASE("sink-SCC head equals the literal head on random graphs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
      int nodes = 5 + static_cast<int>(rng() % 300);
      auto g = oracle::random_graph(rng, nodes, 3, 0.4);
      CHECK(head(g) == oracle::literal_head(g));
    }
  }

  TEST_CASE("JSON and DOT round trips") {
    auto t = hw_tensor(2, Weight{1, 0, 0}, 2, 3, 5);
    t.graph.set_type_tag("A1:2");
    auto j = t.graph.to_json(true);
    auto back = CrystalGraph::from_json(j);
    CHECK(same_graph(back, t.graph));
    CHECK(back.to_json(true).dump() == j.dump());
    auto dot = t.graph.to_dot();
    auto from_dot = CrystalGraph::from_dot(dot);
    CHECK(same_graph(from_dot, t.graph));
    CHECK(from_dot.type_tag() == "A1:2");
    CHECK(from_dot.edge_count() == t.graph.edge_count());
    CHECK(dot.find("style=dashed") != std::string::npos);
  }

  TEST_CASE("external graphs") {
    auto j = json::parse(R"({"colors":2,"nodes":[{"key":"a","wt":[1,0]},{"key":"b","wt":[-1,0]}],
                             "edges":[{"i":0,"from":"a","to":"b"}]})");
    auto g = CrystalGraph::from_json(j);
    CHECK(g.size() == 2);
    CHECK(g.validate().empty());
    CHECK(head(g) == std::vector<int>{g.find("a")});
    auto bad = json::parse(R"({"colors":1,"nodes":[{"key":"a","wt":[0]}],"edges":[{"i":0,"from":"a","to":"zz"}]})");
    CHECK_THROWS(CrystalGraph::from_json(bad));
    auto contradict = json::parse(R"({"colors":1,"nodes":[{"key":"a","wt":[0]},{"key":"b","wt":[0]},{"key":"c","wt":[0]}],
        "edges":[{"i":0,"from":"a","to":"b"},{"i":0,"from":"a","to":"c"}]})");
    CHECK_THROWS_AS(CrystalGraph::from_json(contradict), SoundnessError);
  }

  TEST_CASE("head of a graph that is not e-closed") {
    auto t = hw_tensor(2, Weight{1, 0, 0}, 2, 2, 4);
    CHECK_THROWS_AS(head(t.graph), SoundnessError);
  }
}
