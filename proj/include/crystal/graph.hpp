#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crystal/crystal.hpp"

namespace crystal {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Desk-scale guardrails for graph construction.
struct Budget {
  std::size_t max_nodes = 200000;
  std::chrono::milliseconds max_time{10000};

  /// Defaults, with CRYSTAL_BUDGET (node count) applied when set.
  static Budget from_env();
};

enum class Direction { e_only, f_only, both };

struct GraphNode {
  std::string key;
  Weight wt;
  std::vector<ExtInt> eps;
  std::vector<ExtInt> phi;
  bool frontier = false;
  int depth = 0;
};

/// Explicit edge-colored digraph of a finite piece of a crystal. For each
/// color the f̃-map is stored together with its reverse ẽ-map. An entry is a
/// node index, kNil (operator gives 0) or kUnknown (not evaluated).
class CrystalGraph {
 public:
  static constexpr int kNil = -1;
  static constexpr int kUnknown = -2;

  CrystalGraph() = default;
  explicit CrystalGraph(int colors);

  int colors() const { return colors_; }
  std::size_t size() const { return nodes_.size(); }
  const GraphNode& node(int v) const { return nodes_[static_cast<std::size_t>(v)]; }
  GraphNode& node(int v) { return nodes_[static_cast<std::size_t>(v)]; }
  const std::vector<GraphNode>& nodes() const { return nodes_; }

  /// Node index of a key, or -1.
  int find(const std::string& key) const;
  int add_node(GraphNode n);

  int f_raw(int v, int i) const { return f_[i][v]; }
  int e_raw(int v, int i) const { return e_[i][v]; }
  /// Records f̃_i(u) = v together with ẽ_i(v) = u. Throws SoundnessError when
  /// that contradicts an edge already stored.
  void link(int u, int i, int v);
  void set_f_nil(int u, int i);
  void set_e_nil(int v, int i);

  /// Checked accessors: nullopt for nil, SoundnessError when not evaluated.
  std::optional<int> f(int v, int i) const;
  std::optional<int> e(int v, int i) const;

  std::size_t edge_count() const;
  /// ⟨h_i, wt⟩ at a node.
  int pairing(int v, int i) const { return node(v).wt[static_cast<std::size_t>(i)]; }

  /// Type tag carried through serialization, e.g. "A1:2". May be empty.
  const std::string& type_tag() const { return type_tag_; }
  void set_type_tag(std::string t) { type_tag_ = std::move(t); }

  /// Invariant violations (edge reversal, completeness of non-frontier nodes,
  /// label identity). Empty when the graph is well formed.
  std::vector<std::string> validate() const;

  json to_json(bool canonical = false) const;
  static CrystalGraph from_json(const json& j);
  std::string to_dot() const;
  static CrystalGraph from_dot(const std::string& text);

 private:
  int colors_ = 0;
  std::vector<GraphNode> nodes_;
  std::vector<std::vector<int>> f_;
  std::vector<std::vector<int>> e_;
  std::unordered_map<std::string, int> index_;
  std::string type_tag_;
};

/// True when both graphs have the same keys, labels, frontier flags and edges.
bool same_graph(const CrystalGraph& a, const CrystalGraph& b);

/// BFS closure from the seeds. Nodes at the depth bound, and nodes reached only
/// through a non-traversed direction, are left unevaluated and marked frontier.
CrystalGraph generate(const Crystal& c, const std::vector<Elem>& seeds, int depth, Direction dir = Direction::both,
                      const Budget& budget = {});

/// Node index of an element in a graph generated from `c`, or -1.
int find_elem(const CrystalGraph& g, const Crystal& c, ElemView b);

/// E(b): every node reachable by ẽ's (including b).
std::vector<int> e_closure(const CrystalGraph& g, int b);
/// E^max(b): closure under the maps ẽ_i^max.
std::vector<int> emax_closure(const CrystalGraph& g, int b);
/// ẽ_i^max on a graph node.
int e_max(const CrystalGraph& g, int b, int i);

struct HeadResult {
  std::vector<int> head;       // sorted node indices
  std::vector<char> tainted;   // per node: ẽ-closure reaches an unevaluated node
  std::size_t tainted_count = 0;
};

/// Head as the union of sink strongly connected components of the ẽ-digraph,
/// restricted to nodes whose ẽ-closure is fully evaluated.
HeadResult head_partial(const CrystalGraph& g);
/// Head of an ẽ-closed graph; throws SoundnessError when any node is tainted.
std::vector<int> head(const CrystalGraph& g);

/// Strongly connected components (Tarjan) of the ẽ-digraph on untainted nodes.
/// `sink` marks components with no ẽ-edge leaving them.
struct SccResult {
  std::vector<int> component;            // per node, -1 for tainted
  std::vector<std::vector<int>> members;
  std::vector<char> sink;
};
SccResult e_sccs(const CrystalGraph& g, const std::vector<char>& tainted);

/// Induced crystal on the head: ẽ inherited, f̃ kept inside H, ε inherited,
/// φ_i = max{k : f̃_i^k b ∈ H}, wt = Σ (φ_i - ε_i) Λ_i. Keys are preserved.
CrystalGraph head_crystal(const CrystalGraph& g, const std::vector<int>& head_nodes);
CrystalGraph head_crystal(const CrystalGraph& g);

/// S_i(b) = f̃_i^{⟨h_i,wt b⟩} b or ẽ_i^{-⟨h_i,wt b⟩} b.
int weyl_action(const CrystalGraph& g, int b, int i);
/// S_w for the written word w = s_{word[0]} s_{word[1]} ... (rightmost acts first).
int weyl_word(const CrystalGraph& g, int b, const std::vector<int>& word);

struct IsoResult {
  bool ok = false;
  std::string reason;
  int node1 = -1;
  int node2 = -1;
  int color = -1;
  std::vector<int> pairing;  // g1 node → g2 node, -1 outside the compared region
  std::size_t compared_nodes = 0;
  std::size_t compared_edges = 0;
};

/// Simultaneous BFS from paired seeds. Within `radius` (BFS distance from the
/// seeds, -1 for unbounded) the pairing must be a bijection preserving wt, ε,
/// φ and every colored edge. Nodes at the radius are compared by labels and by
/// the edges that lead back into the region.
IsoResult is_isomorphic(const CrystalGraph& g1, const CrystalGraph& g2, const std::vector<std::pair<int, int>>& seeds,
                        int radius = -1);

/// Region form: the pairing spreads from the seeds through edges of region
/// nodes. Region nodes must be evaluated and must map onto region nodes; nodes
/// just outside are paired by labels only. The pairing has to cover both
/// regions exactly.
IsoResult is_isomorphic_within(const CrystalGraph& g1, const std::vector<char>& region1, const CrystalGraph& g2,
                               const std::vector<char>& region2, const std::vector<std::pair<int, int>>& seeds);

/// Multi-source BFS distance along f̃-edges (-1 when unreachable).
std::vector<int> f_depth_from(const CrystalGraph& g, const std::vector<int>& sources);

/// Nodes within f̃-distance d of the sources, all of which must be evaluated;
/// throws SoundnessError naming the first unevaluated one.
std::vector<char> f_ball(const CrystalGraph& g, const std::vector<int>& sources, int d);

struct Rank2Report {
  bool pass = true;
  std::vector<int> colors;
  std::size_t components = 0;
  std::vector<std::string> violations;
  json to_json() const;
};

/// Necessary conditions for B_J to be the crystal of an integrable g_J-module,
/// |J| <= 2: seminormal strings, one J-highest node per component, and the
/// component character equal to the Weyl character of its highest weight.
Rank2Report rank2_regularity_probe(const CrystalGraph& g, const std::vector<int>& J);

/// Connected components of the undirected graph on the given node set.
std::vector<std::vector<int>> components_within(const CrystalGraph& g, const std::vector<int>& nodes);

/// Undirected BFS distance from a node set (-1 when unreachable).
std::vector<int> distances_from(const CrystalGraph& g, const std::vector<int>& sources);

/// A crystal whose elements are the nodes of a graph (encoding: {index}).
class GraphCrystal final : public Crystal {
 public:
  GraphCrystal(std::shared_ptr<const RootData> rd, CrystalGraph g);

  const CrystalGraph& graph() const { return g_; }
  Elem element(int v) const { return {v}; }

  std::size_t arity() const override { return 1; }
  Weight wt(ElemView b) const override { return g_.node(b[0]).wt; }
  ExtInt eps(ElemView b, int i) const override { return g_.node(b[0]).eps[i]; }
  ExtInt phi(ElemView b, int i) const override { return g_.node(b[0]).phi[i]; }
  std::optional<Elem> e(ElemView b, int i) const override;
  std::optional<Elem> f(ElemView b, int i) const override;
  json to_json(ElemView b) const override;
  Elem from_json(const json& j) const override;
  std::string describe() const override { return "graph[" + std::to_string(g_.size()) + "]"; }

 private:
  CrystalGraph g_;
};

}  // namespace crystal
