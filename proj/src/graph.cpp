#include "crystal/graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "crystal/weyl_character.hpp"

namespace crystal {

namespace {

json ext_to_json(ExtInt x) { return x.is_finite() ? json(x.value()) : json("-inf"); }

ExtInt ext_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "-inf") throw std::invalid_argument("bad extended integer: " + j.dump());
    return ExtInt::neg_inf();
  }
  return ExtInt(j.get<int>());
}

std::string join_ext(const std::vector<ExtInt>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += v[k].str();
  }
  return s;
}

std::string join_int(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(v[k]);
  }
  return s;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

ExtInt parse_ext(const std::string& s) {
  if (s == "-inf") return ExtInt::neg_inf();
  std::size_t used = 0;
  int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad integer: " + s);
  return ExtInt(v);
}

}  // namespace

Budget Budget::from_env() {
  Budget b;
  if (const char* env = std::getenv("CRYSTAL_BUDGET")) {
    std::string s(env);
    try {
      std::size_t used = 0;
      long long v = std::stoll(s, &used);
      if (used != s.size() || v <= 0) throw std::invalid_argument(s);
      b.max_nodes = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("CRYSTAL_BUDGET must be a positive node count, got '" + s + "'");
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// CrystalGraph

CrystalGraph::CrystalGraph(int colors) : colors_(colors), f_(static_cast<std::size_t>(colors)), e_(f_) {}

int CrystalGraph::find(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

int CrystalGraph::add_node(GraphNode n) {
  if (index_.count(n.key)) throw std::invalid_argument("duplicate node key " + n.key);
  int v = static_cast<int>(nodes_.size());
  index_.emplace(n.key, v);
  nodes_.push_back(std::move(n));
  for (auto& row : f_) row.push_back(kUnknown);
  for (auto& row : e_) row.push_back(kUnknown);
  return v;
}

void CrystalGraph::link(int u, int i, int v) {
  int& fu = f_[i][u];
  int& ev = e_[i][v];
  if ((fu != kUnknown && fu != v) || (ev != kUnknown && ev != u))
    throw SoundnessError("inconsistent " + std::to_string(i) + "-edge between " + node(u).key + " and " + node(v).key);
  fu = v;
  ev = u;
}

void CrystalGraph::set_f_nil(int u, int i) {
  int& fu = f_[i][u];
  if (fu != kUnknown && fu != kNil) throw SoundnessError("f_" + std::to_string(i) + " both nil and defined at " + node(u).key);
  fu = kNil;
}

void CrystalGraph::set_e_nil(int v, int i) {
  int& ev = e_[i][v];
  if (ev != kUnknown && ev != kNil) throw SoundnessError("e_" + std::to_string(i) + " both nil and defined at " + node(v).key);
  ev = kNil;
}

std::optional<int> CrystalGraph::f(int v, int i) const {
  int t = f_[i][v];
  if (t == kUnknown) throw SoundnessError("f_" + std::to_string(i) + " not evaluated at " + node(v).key);
  if (t == kNil) return std::nullopt;
  return t;
}

std::optional<int> CrystalGraph::e(int v, int i) const {
  int t = e_[i][v];
  if (t == kUnknown) throw SoundnessError("e_" + std::to_string(i) + " not evaluated at " + node(v).key);
  if (t == kNil) return std::nullopt;
  return t;
}

std::size_t CrystalGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& row : f_)
    for (int t : row)
      if (t >= 0) ++n;
  return n;
}

std::vector<std::string> CrystalGraph::validate() const {
  std::vector<std::string> out;
  for (int v = 0; v < static_cast<int>(size()); ++v) {
    const auto& n = node(v);
    if (n.wt.size() != static_cast<std::size_t>(colors_) || n.eps.size() != n.wt.size() || n.phi.size() != n.wt.size()) {
      out.push_back("label size mismatch at " + n.key);
      continue;
    }
    for (int i = 0; i < colors_; ++i) {
      int fv = f_[i][v];
      int ev = e_[i][v];
      if (fv >= 0 && e_[i][fv] != v) out.push_back("f_" + std::to_string(i) + " not reversed at " + n.key);
      if (ev >= 0 && f_[i][ev] != v) out.push_back("e_" + std::to_string(i) + " not reversed at " + n.key);
      if (!n.frontier && (fv == kUnknown || ev == kUnknown))
        out.push_back("unevaluated edge at non-frontier node " + n.key);
      if (n.eps[i].is_finite() && n.phi[i].is_finite() && n.wt[i] != n.phi[i].value() - n.eps[i].value())
        out.push_back("wt != phi - eps at " + n.key);
    }
  }
  return out;
}

json CrystalGraph::to_json(bool canonical) const {
  std::vector<int> order(size());
  std::iota(order.begin(), order.end(), 0);
  if (canonical)
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return node(a).key < node(b).key; });
  std::vector<int> pos(size());
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);

  json nodes = json::array();
  for (int v : order) {
    const auto& n = node(v);
    json eps = json::array(), phi = json::array();
    for (auto x : n.eps) eps.push_back(ext_to_json(x));
    for (auto x : n.phi) phi.push_back(ext_to_json(x));
    nodes.push_back({{"key", n.key}, {"wt", n.wt.values()}, {"eps", eps}, {"phi", phi}, {"frontier", n.frontier},
                     {"depth", n.depth}});
  }
  std::vector<std::array<int, 3>> edges;
  for (int i = 0; i < colors_; ++i)
    for (int v = 0; v < static_cast<int>(size()); ++v)
      if (f_[i][v] >= 0) edges.push_back({i, pos[v], pos[f_[i][v]]});
  std::sort(edges.begin(), edges.end());
  json ej = json::array();
  for (auto& [i, a, b] : edges) ej.push_back({{"i", i}, {"from", a}, {"to", b}});
  json out{{"colors", colors_}, {"nodes", nodes}, {"edges", ej}};
  if (!type_tag_.empty()) out["type"] = type_tag_;
  return out;
}

CrystalGraph CrystalGraph::from_json(const json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
    throw std::invalid_argument("graph JSON needs \"nodes\" and \"edges\"");
  const auto& nodes = j.at("nodes");
  int colors = -1;
  if (j.contains("colors")) colors = j.at("colors").get<int>();
  for (const auto& n : nodes) {
    int sz = static_cast<int>(n.at("wt").size());
    if (colors < 0) colors = sz;
    if (sz != colors) throw DimensionMismatch("node weight length differs from color count");
  }
  if (colors < 0) colors = 0;
  CrystalGraph g(colors);
  if (j.contains("type")) g.set_type_tag(j.at("type").get<std::string>());
  bool labels_given = true;
  for (const auto& n : nodes) {
    GraphNode gn;
    gn.key = n.contains("key") ? (n.at("key").is_string() ? n.at("key").get<std::string>() : n.at("key").dump())
                               : std::to_string(g.size());
    gn.wt = Weight(n.at("wt").get<std::vector<int>>());
    if (n.contains("eps") && n.contains("phi")) {
      for (const auto& x : n.at("eps")) gn.eps.push_back(ext_from_json(x));
      for (const auto& x : n.at("phi")) gn.phi.push_back(ext_from_json(x));
      if (gn.eps.size() != gn.wt.size() || gn.phi.size() != gn.wt.size())
        throw DimensionMismatch("eps/phi length differs from weight length at " + gn.key);
    } else {
      labels_given = false;
      gn.eps.assign(gn.wt.size(), ExtInt(0));
      gn.phi.assign(gn.wt.size(), ExtInt(0));
    }
    gn.frontier = n.value("frontier", false);
    gn.depth = n.value("depth", 0);
    g.add_node(std::move(gn));
  }
  const int count = static_cast<int>(g.size());
  for (const auto& e : j.at("edges")) {
    int i = e.at("i").get<int>();
    // endpoints are node indices or node keys
    auto end = [&](const json& x) { return x.is_string() ? g.find(x.get<std::string>()) : x.get<int>(); };
    int a = end(e.at("from"));
    int b = end(e.at("to"));
    if (i < 0 || i >= colors || a < 0 || a >= count || b < 0 || b >= count)
      throw std::invalid_argument("edge out of range: " + e.dump());
    g.link(a, i, b);
  }
  for (int v = 0; v < count; ++v) {
    if (g.node(v).frontier) continue;
    for (int i = 0; i < colors; ++i) {
      if (g.f_raw(v, i) == kUnknown) g.set_f_nil(v, i);
      if (g.e_raw(v, i) == kUnknown) g.set_e_nil(v, i);
    }
  }
  if (!labels_given) {
    // string lengths stand in for missing ε/φ
    for (int v = 0; v < count; ++v) {
      auto& n = g.node(v);
      for (int i = 0; i < colors; ++i) {
        int up = 0, down = 0;
        for (int c = v; (c = g.e(c, i).value_or(-1)) >= 0;)
          if (++up > count) throw SoundnessError("cyclic string at " + n.key);
        for (int c = v; (c = g.f(c, i).value_or(-1)) >= 0;)
          if (++down > count) throw SoundnessError("cyclic string at " + n.key);
        n.eps[i] = up;
        n.phi[i] = down;
      }
    }
  }
  return g;
}

// DOT: attribute-carrying subset, readable by from_dot.

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out += ch;
  }
  return out + "\"";
}

struct DotToken {
  enum Kind { ident, string, symbol, arrow, end } kind;
  std::string text;
};

class DotLexer {
 public:
  explicit DotLexer(const std::string& s) : s_(s) {}

  DotToken next() {
    skip();
    if (p_ >= s_.size()) return {DotToken::end, {}};
    char ch = s_[p_];
    if (ch == '"') {
      ++p_;
      std::string out;
      while (p_ < s_.size() && s_[p_] != '"') {
        if (s_[p_] == '\\' && p_ + 1 < s_.size()) {
          ++p_;
          out += s_[p_] == 'n' ? '\n' : s_[p_];
        } else {
          out += s_[p_];
        }
        ++p_;
      }
      if (p_ >= s_.size()) throw std::invalid_argument("DOT: unterminated string");
      ++p_;
      return {DotToken::string, out};
    }
    if (ch == '-' && p_ + 1 < s_.size() && s_[p_ + 1] == '>') {
      p_ += 2;
      return {DotToken::arrow, "->"};
    }
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.') {
      std::string out;
      while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_' || s_[p_] == '.' ||
                                (s_[p_] == '-' && !(p_ + 1 < s_.size() && s_[p_ + 1] == '>'))))
        out += s_[p_++];
      return {DotToken::ident, out};
    }
    ++p_;
    return {DotToken::symbol, std::string(1, ch)};
  }

 private:
  void skip() {
    while (p_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[p_]))) {
        ++p_;
      } else if (s_.compare(p_, 2, "//") == 0) {
        while (p_ < s_.size() && s_[p_] != '\n') ++p_;
      } else if (s_.compare(p_, 2, "/*") == 0) {
        auto q = s_.find("*/", p_ + 2);
        p_ = q == std::string::npos ? s_.size() : q + 2;
      } else {
        break;
      }
    }
  }
  const std::string& s_;
  std::size_t p_ = 0;
};

}  // namespace

std::string CrystalGraph::to_dot() const {
  std::ostringstream os;
  os << "digraph crystal {\n";
  os << "  graph [colors=" << colors_;
  if (!type_tag_.empty()) os << ", crystal_type=" << dot_quote(type_tag_);
  os << "];\n";
  for (int v = 0; v < static_cast<int>(size()); ++v) {
    const auto& n = node(v);
    os << "  n" << v << " [label=" << dot_quote(n.key + "\nwt=(" + join_int(n.wt.values()) + ")")
       << ", key=" << dot_quote(n.key) << ", wt=" << dot_quote(join_int(n.wt.values()))
       << ", eps=" << dot_quote(join_ext(n.eps)) << ", phi=" << dot_quote(join_ext(n.phi)) << ", depth=" << n.depth;
    if (n.frontier) os << ", frontier=1, style=dashed";
    os << "];\n";
  }
  for (int i = 0; i < colors_; ++i)
    for (int v = 0; v < static_cast<int>(size()); ++v)
      if (f_[i][v] >= 0) os << "  n" << v << " -> n" << f_[i][v] << " [label=\"" << i << "\", color_index=" << i << "];\n";
  os << "}\n";
  return os.str();
}

CrystalGraph CrystalGraph::from_dot(const std::string& text) {
  DotLexer lx(text);
  auto expect = [&](DotToken::Kind k, const std::string& t = {}) {
    auto tok = lx.next();
    if (tok.kind != k || (!t.empty() && tok.text != t)) throw std::invalid_argument("DOT: unexpected token '" + tok.text + "'");
    return tok;
  };
  auto tok = lx.next();
  if (tok.kind == DotToken::ident && tok.text == "strict") tok = lx.next();
  if (tok.kind != DotToken::ident || tok.text != "digraph") throw std::invalid_argument("DOT: expected digraph");
  tok = lx.next();
  if (tok.kind == DotToken::ident || tok.kind == DotToken::string) tok = lx.next();
  if (tok.kind != DotToken::symbol || tok.text != "{") throw std::invalid_argument("DOT: expected '{'");

  using Attrs = std::map<std::string, std::string>;
  auto read_attrs = [&](DotToken& t) {
    Attrs a;
    if (!(t.kind == DotToken::symbol && t.text == "[")) return a;
    while (true) {
      t = lx.next();
      if (t.kind == DotToken::symbol && t.text == "]") break;
      if (t.kind == DotToken::symbol && (t.text == "," || t.text == ";")) continue;
      if (t.kind != DotToken::ident && t.kind != DotToken::string) throw std::invalid_argument("DOT: bad attribute");
      std::string name = t.text;
      expect(DotToken::symbol, "=");
      auto val = lx.next();
      if (val.kind != DotToken::ident && val.kind != DotToken::string) throw std::invalid_argument("DOT: bad attribute value");
      a[name] = val.text;
    }
    t = lx.next();
    return a;
  };

  std::vector<std::pair<std::string, Attrs>> node_stmts;
  std::vector<std::tuple<std::string, std::string, Attrs>> edge_stmts;
  Attrs graph_attrs;
  tok = lx.next();
  while (!(tok.kind == DotToken::symbol && tok.text == "}")) {
    if (tok.kind == DotToken::end) throw std::invalid_argument("DOT: missing '}'");
    if (tok.kind == DotToken::symbol && tok.text == ";") {
      tok = lx.next();
      continue;
    }
    if (tok.kind != DotToken::ident && tok.kind != DotToken::string) throw std::invalid_argument("DOT: bad statement");
    std::string id = tok.text;
    tok = lx.next();
    if (tok.kind == DotToken::arrow) {
      auto dst = lx.next();
      if (dst.kind != DotToken::ident && dst.kind != DotToken::string) throw std::invalid_argument("DOT: bad edge target");
      tok = lx.next();
      edge_stmts.emplace_back(id, dst.text, read_attrs(tok));
    } else if (id == "graph" || id == "node" || id == "edge") {
      auto a = read_attrs(tok);
      if (id == "graph") graph_attrs.insert(a.begin(), a.end());
    } else if (tok.kind == DotToken::symbol && tok.text == "=") {
      lx.next();
      tok = lx.next();
    } else {
      node_stmts.emplace_back(id, read_attrs(tok));
    }
  }

  int colors = graph_attrs.count("colors") ? std::stoi(graph_attrs["colors"]) : -1;
  std::vector<GraphNode> parsed;
  std::map<std::string, int> ids;
  for (auto& [id, a] : node_stmts) {
    if (!a.count("wt")) throw std::invalid_argument("DOT: node " + id + " lacks wt");
    GraphNode n;
    n.key = a.count("key") ? a["key"] : id;
    std::vector<int> w;
    for (auto& s : split_commas(a["wt"])) w.push_back(std::stoi(s));
    n.wt = Weight(w);
    if (a.count("eps"))
      for (auto& s : split_commas(a["eps"])) n.eps.push_back(parse_ext(s));
    if (a.count("phi"))
      for (auto& s : split_commas(a["phi"])) n.phi.push_back(parse_ext(s));
    n.frontier = a.count("frontier") && a["frontier"] != "0";
    n.depth = a.count("depth") ? std::stoi(a["depth"]) : 0;
    if (colors < 0) colors = static_cast<int>(w.size());
    ids[id] = static_cast<int>(parsed.size());
    parsed.push_back(std::move(n));
  }
  json j{{"colors", std::max(colors, 0)}, {"nodes", json::array()}, {"edges", json::array()}};
  if (graph_attrs.count("crystal_type")) j["type"] = graph_attrs["crystal_type"];
  for (auto& n : parsed) {
    json nj{{"key", n.key}, {"wt", n.wt.values()}, {"frontier", n.frontier}, {"depth", n.depth}};
    if (!n.eps.empty() || !n.phi.empty()) {
      json eps = json::array(), phi = json::array();
      for (auto x : n.eps) eps.push_back(ext_to_json(x));
      for (auto x : n.phi) phi.push_back(ext_to_json(x));
      nj["eps"] = eps;
      nj["phi"] = phi;
    }
    j["nodes"].push_back(nj);
  }
  for (auto& [a, b, attrs] : edge_stmts) {
    if (!ids.count(a) || !ids.count(b)) throw std::invalid_argument("DOT: edge references unknown node");
    std::string c = attrs.count("color_index") ? attrs["color_index"] : attrs["label"];
    j["edges"].push_back({{"i", std::stoi(c)}, {"from", ids[a]}, {"to", ids[b]}});
  }
  return from_json(j);
}

bool same_graph(const CrystalGraph& a, const CrystalGraph& b) {
  if (a.colors() != b.colors() || a.size() != b.size()) return false;
  for (int v = 0; v < static_cast<int>(a.size()); ++v) {
    const auto& x = a.node(v);
    int w = b.find(x.key);
    if (w < 0) return false;
    const auto& y = b.node(w);
    if (x.wt != y.wt || x.eps != y.eps || x.phi != y.phi || x.frontier != y.frontier) return false;
    for (int i = 0; i < a.colors(); ++i) {
      auto map_edge = [&](int t) { return t >= 0 ? b.find(a.node(t).key) : t; };
      if (map_edge(a.f_raw(v, i)) != b.f_raw(w, i) || map_edge(a.e_raw(v, i)) != b.e_raw(w, i)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Generation

CrystalGraph generate(const Crystal& c, const std::vector<Elem>& seeds, int depth, Direction dir, const Budget& budget) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  const int r = c.rank();
  CrystalGraph g(r);
  g.set_type_tag(c.root_data().type().str());
  std::vector<Elem> elems;
  std::vector<char> queued;
  std::deque<int> queue;
  const auto t0 = std::chrono::steady_clock::now();

  auto intern = [&](const Elem& b, int d) {
    std::string key = c.key(b);
    int v = g.find(key);
    if (v >= 0) return v;
    if (g.size() >= budget.max_nodes)
      throw BudgetExceeded("node budget of " + std::to_string(budget.max_nodes) + " exceeded");
    if ((g.size() & 255) == 0 && std::chrono::steady_clock::now() - t0 > budget.max_time)
      throw BudgetExceeded("time budget of " + std::to_string(budget.max_time.count()) + " ms exceeded");
    GraphNode n;
    n.key = std::move(key);
    n.wt = c.wt(b);
    n.eps.resize(static_cast<std::size_t>(r));
    n.phi.resize(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
      n.eps[i] = c.eps(b, i);
      n.phi[i] = c.phi(b, i);
    }
    n.frontier = true;
    n.depth = d;
    v = g.add_node(std::move(n));
    elems.push_back(b);
    queued.push_back(0);
    return v;
  };
  auto enqueue = [&](int v, int d) {
    if (queued[v]) return;
    queued[v] = 1;
    g.node(v).depth = d;
    queue.push_back(v);
  };

  for (const auto& s : seeds) {
    if (s.size() != c.arity()) throw std::invalid_argument("seed has wrong arity for " + c.describe());
    enqueue(intern(s, 0), 0);
  }
  const bool follow_f = dir != Direction::e_only;
  const bool follow_e = dir != Direction::f_only;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    int d = g.node(u).depth;
    if (d >= depth) continue;
    const Elem b = elems[u];
    for (int i = 0; i < r; ++i) {
      if (auto fb = c.f(b, i)) {
        int v = intern(*fb, d + 1);
        g.link(u, i, v);
        if (follow_f) enqueue(v, d + 1);
      } else {
        g.set_f_nil(u, i);
      }
      if (auto eb = c.e(b, i)) {
        int v = intern(*eb, d + 1);
        g.link(v, i, u);
        if (follow_e) enqueue(v, d + 1);
      } else {
        g.set_e_nil(u, i);
      }
    }
    g.node(u).frontier = false;
  }
  return g;
}

int find_elem(const CrystalGraph& g, const Crystal& c, ElemView b) { return g.find(c.key(b)); }

// ---------------------------------------------------------------------------
// Closures and the head

std::vector<int> e_closure(const CrystalGraph& g, int b) {
  std::vector<char> seen(g.size(), 0);
  std::vector<int> stack{b}, out;
  seen[b] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    out.push_back(v);
    for (int i = 0; i < g.colors(); ++i)
      if (auto w = g.e(v, i); w && !seen[*w]) {
        seen[*w] = 1;
        stack.push_back(*w);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int e_max(const CrystalGraph& g, int b, int i) {
  int cur = b;
  std::size_t steps = 0;
  while (auto w = g.e(cur, i)) {
    cur = *w;
    if (++steps > g.size()) throw SoundnessError("cyclic e_" + std::to_string(i) + "-string at " + g.node(b).key);
  }
  return cur;
}

std::vector<int> emax_closure(const CrystalGraph& g, int b) {
  std::vector<char> seen(g.size(), 0);
  std::vector<int> stack{b}, out;
  seen[b] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    out.push_back(v);
    for (int i = 0; i < g.colors(); ++i) {
      if (!g.e(v, i)) continue;
      int w = e_max(g, v, i);
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<char> taint(const CrystalGraph& g) {
  const int n = static_cast<int>(g.size());
  std::vector<char> t(g.size(), 0);
  std::vector<int> stack;
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < g.colors(); ++i)
      if (g.e_raw(v, i) == CrystalGraph::kUnknown) {
        t[v] = 1;
        stack.push_back(v);
        break;
      }
  // b is tainted when some ẽ-path from b reaches an open node; walk backwards
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int i = 0; i < g.colors(); ++i) {
      int p = g.f_raw(v, i);
      if (p >= 0 && !t[p]) {
        t[p] = 1;
        stack.push_back(p);
      }
    }
  }
  return t;
}

}  // namespace

SccResult e_sccs(const CrystalGraph& g, const std::vector<char>& tainted) {
  const int n = static_cast<int>(g.size());
  SccResult res;
  res.component.assign(g.size(), -1);
  std::vector<int> index(g.size(), -1), low(g.size(), 0);
  std::vector<char> on_stack(g.size(), 0);
  std::vector<int> stack;
  int counter = 0;
  struct Frame {
    int v;
    int next_color;
  };
  for (int root = 0; root < n; ++root) {
    if (tainted[root] || index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      int v = fr.v;
      if (fr.next_color < g.colors()) {
        int i = fr.next_color++;
        int w = g.e_raw(v, i);
        if (w < 0) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int id = static_cast<int>(res.members.size());
        res.members.emplace_back();
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          res.component[w] = id;
          res.members.back().push_back(w);
          if (w == v) break;
        }
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  res.sink.assign(res.members.size(), 1);
  for (std::size_t id = 0; id < res.members.size(); ++id)
    for (int v : res.members[id])
      for (int i = 0; i < g.colors(); ++i) {
        int w = g.e_raw(v, i);
        if (w >= 0 && res.component[w] != static_cast<int>(id)) res.sink[id] = 0;
      }
  return res;
}

HeadResult head_partial(const CrystalGraph& g) {
  HeadResult r;
  r.tainted = taint(g);
  r.tainted_count = static_cast<std::size_t>(std::count(r.tainted.begin(), r.tainted.end(), 1));
  auto scc = e_sccs(g, r.tainted);
  for (std::size_t id = 0; id < scc.members.size(); ++id)
    if (scc.sink[id]) r.head.insert(r.head.end(), scc.members[id].begin(), scc.members[id].end());
  std::sort(r.head.begin(), r.head.end());
  return r;
}

std::vector<int> head(const CrystalGraph& g) {
  auto r = head_partial(g);
  if (r.tainted_count > 0)
    throw SoundnessError(std::to_string(r.tainted_count) + " nodes have e-closures reaching unevaluated nodes");
  return r.head;
}

CrystalGraph head_crystal(const CrystalGraph& g, const std::vector<int>& head_nodes) {
  std::vector<int> local(g.size(), -1);
  CrystalGraph h(g.colors());
  h.set_type_tag(g.type_tag());
  for (int v : head_nodes) {
    if (g.node(v).frontier) throw SoundnessError("head node " + g.node(v).key + " is not evaluated");
    GraphNode n = g.node(v);
    n.frontier = false;
    local[v] = h.add_node(std::move(n));
  }
  for (int v : head_nodes) {
    int hv = local[v];
    for (int i = 0; i < g.colors(); ++i) {
      auto w = g.e(v, i);
      if (w && local[*w] < 0)
        throw TheoremViolation("head is not closed under e_" + std::to_string(i),
                               json{{"node", g.node(v).key}, {"image", g.node(*w).key}, {"color", i}});
      if (w) h.link(local[*w], i, hv);
      else h.set_e_nil(hv, i);
      auto fw = g.f(v, i);
      if (fw && local[*fw] >= 0) h.link(hv, i, local[*fw]);
      else h.set_f_nil(hv, i);
    }
  }
  for (int v : head_nodes) {
    auto& n = h.node(local[v]);
    for (int i = 0; i < g.colors(); ++i) {
      // ẽ-closedness means an f̃-string that leaves H never returns
      int k = 0;
      for (int c = local[v]; (c = h.f(c, i).value_or(-1)) >= 0;) ++k;
      n.phi[i] = k;
      if (n.eps[i].is_finite()) n.wt[i] = k - n.eps[i].value();
    }
  }
  return h;
}

CrystalGraph head_crystal(const CrystalGraph& g) { return head_crystal(g, head(g)); }

// ---------------------------------------------------------------------------
// Weyl group action

int weyl_action(const CrystalGraph& g, int b, int i) {
  int m = g.pairing(b, i);
  int cur = b;
  for (int s = 0; s < std::abs(m); ++s) {
    auto nxt = m > 0 ? g.f(cur, i) : g.e(cur, i);
    if (!nxt)
      throw TheoremViolation("i-string too short for the reflection", json{{"node", g.node(b).key}, {"color", i}});
    cur = *nxt;
  }
  return cur;
}

int weyl_word(const CrystalGraph& g, int b, const std::vector<int>& word) {
  int cur = b;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it < 0 || *it >= g.colors()) throw std::invalid_argument("color out of range in word");
    cur = weyl_action(g, cur, *it);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Seeded isomorphism

IsoResult is_isomorphic_within(const CrystalGraph& g1, const std::vector<char>& region1, const CrystalGraph& g2,
                               const std::vector<char>& region2, const std::vector<std::pair<int, int>>& seeds) {
  IsoResult r;
  if (g1.colors() != g2.colors()) {
    r.reason = "different color sets";
    return r;
  }
  const int colors = g1.colors();
  r.pairing.assign(g1.size(), -1);
  std::vector<int> back(g2.size(), -1);
  std::deque<int> queue;
  auto fail = [&](std::string why, int a, int b, int i) {
    r.ok = false;
    r.reason = std::move(why);
    r.node1 = a;
    r.node2 = b;
    r.color = i;
    return r;
  };
  auto try_pair = [&](int a, int b) -> std::optional<std::string> {
    if (r.pairing[a] == b) return std::nullopt;
    if (r.pairing[a] >= 0 || back[b] >= 0) return std::string("pairing is not a bijection");
    if (region1[a] != region2[b]) return std::string("region membership differs");
    if (g1.node(a).wt != g2.node(b).wt) return std::string("wt differs");
    if (g1.node(a).eps != g2.node(b).eps) return std::string("eps differs");
    if (g1.node(a).phi != g2.node(b).phi) return std::string("phi differs");
    r.pairing[a] = b;
    back[b] = a;
    ++r.compared_nodes;
    if (region1[a]) queue.push_back(a);
    return std::nullopt;
  };
  for (auto [a, b] : seeds)
    if (auto why = try_pair(a, b)) return fail(*why, a, b, -1);

  std::size_t inside = 0;
  while (!queue.empty()) {
    int a = queue.front();
    queue.pop_front();
    int b = r.pairing[a];
    ++inside;
    if (g1.node(a).frontier || g2.node(b).frontier) return fail("unevaluated node inside the region", a, b, -1);
    for (int i = 0; i < colors; ++i) {
      for (int dirn = 0; dirn < 2; ++dirn) {
        int x = dirn == 0 ? g1.f_raw(a, i) : g1.e_raw(a, i);
        int y = dirn == 0 ? g2.f_raw(b, i) : g2.e_raw(b, i);
        ++r.compared_edges;
        if ((x == CrystalGraph::kNil) != (y == CrystalGraph::kNil))
          return fail(std::string(dirn == 0 ? "f" : "e") + "-edge defined on one side only", a, b, i);
        if (x == CrystalGraph::kNil) continue;
        if (auto why = try_pair(x, y)) return fail(*why, x, y, i);
      }
    }
  }
  auto count = [](const std::vector<char>& v) { return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1)); };
  if (inside != count(region1) || inside != count(region2)) {
    r.reason = "pairing covers " + std::to_string(inside) + " region nodes of " + std::to_string(count(region1)) +
               " and " + std::to_string(count(region2));
    return r;
  }
  r.ok = true;
  return r;
}

IsoResult is_isomorphic(const CrystalGraph& g1, const CrystalGraph& g2, const std::vector<std::pair<int, int>>& seeds,
                        int radius) {
  std::vector<int> s1, s2;
  for (auto [a, b] : seeds) {
    s1.push_back(a);
    s2.push_back(b);
  }
  auto region = [&](const CrystalGraph& g, const std::vector<int>& s) {
    std::vector<char> in(g.size(), 0);
    auto dist = distances_from(g, s);
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (dist[v] < 0) continue;
      in[v] = radius < 0 ? !g.node(static_cast<int>(v)).frontier : dist[v] < radius;
    }
    return in;
  };
  return is_isomorphic_within(g1, region(g1, s1), g2, region(g2, s2), seeds);
}

std::vector<int> f_depth_from(const CrystalGraph& g, const std::vector<int>& sources) {
  std::vector<int> dist(g.size(), -1);
  std::deque<int> q;
  for (int s : sources)
    if (dist[s] < 0) {
      dist[s] = 0;
      q.push_back(s);
    }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int i = 0; i < g.colors(); ++i) {
      int w = g.f_raw(v, i);
      if (w >= 0 && dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
    }
  }
  return dist;
}

std::vector<char> f_ball(const CrystalGraph& g, const std::vector<int>& sources, int d) {
  auto dist = f_depth_from(g, sources);
  std::vector<char> in(g.size(), 0);
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (dist[v] < 0 || dist[v] > d) continue;
    const auto& n = g.node(static_cast<int>(v));
    if (n.frontier) throw SoundnessError("node " + n.key + " at f-depth " + std::to_string(dist[v]) + " is not evaluated");
    in[v] = 1;
  }
  return in;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> components_within(const CrystalGraph& g, const std::vector<int>& nodes) {
  std::vector<char> in(g.size(), 0), seen(g.size(), 0);
  for (int v : nodes) in[v] = 1;
  std::vector<std::vector<int>> out;
  for (int s : nodes) {
    if (seen[s]) continue;
    std::vector<int> comp, stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (int i = 0; i < g.colors(); ++i)
        for (int w : {g.f_raw(v, i), g.e_raw(v, i)})
          if (w >= 0 && in[w] && !seen[w]) {
            seen[w] = 1;
            stack.push_back(w);
          }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<int> distances_from(const CrystalGraph& g, const std::vector<int>& sources) {
  std::vector<int> dist(g.size(), -1);
  std::deque<int> q;
  for (int s : sources)
    if (dist[s] < 0) {
      dist[s] = 0;
      q.push_back(s);
    }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int i = 0; i < g.colors(); ++i)
      for (int w : {g.f_raw(v, i), g.e_raw(v, i)})
        if (w >= 0 && dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push_back(w);
        }
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Rank-2 probe

json Rank2Report::to_json() const {
  return {{"pass", pass}, {"colors", colors}, {"components", components}, {"violations", violations}};
}

Rank2Report rank2_regularity_probe(const CrystalGraph& g, const std::vector<int>& J) {
  Rank2Report rep;
  rep.colors = J;
  std::set<int> js(J.begin(), J.end());
  if (J.empty() || J.size() > 2 || js.size() != J.size())
    throw std::invalid_argument("J must hold one or two distinct colors");
  for (int j : J)
    if (j < 0 || j >= g.colors()) throw std::invalid_argument("color out of range in J");
  if (static_cast<int>(J.size()) >= g.colors()) throw std::invalid_argument("J must be a proper subset of I");
  auto violate = [&](std::string s) {
    rep.pass = false;
    if (rep.violations.size() < 50) rep.violations.push_back(std::move(s));
  };

  // sub-Cartan of J, from the type tag or from the edges themselves
  const std::size_t m = J.size();
  CartanMatrix a(m, std::vector<int>(m, 0));
  bool have_cartan = false;
  if (!g.type_tag().empty()) {
    RootData rd(AffineType::parse(g.type_tag()));
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = 0; y < m; ++y) a[x][y] = rd.cartan(J[x], J[y]);
    have_cartan = true;
  } else {
    std::vector<char> got(m, 0);
    for (int v = 0; v < static_cast<int>(g.size()); ++v)
      for (std::size_t y = 0; y < m; ++y) {
        int w = g.f_raw(v, J[y]);
        if (got[y] || w < 0) continue;
        for (std::size_t x = 0; x < m; ++x) a[x][y] = g.pairing(v, J[x]) - g.pairing(w, J[x]);
        got[y] = 1;
      }
    have_cartan = std::all_of(got.begin(), got.end(), [](char c) { return c; });
    for (std::size_t y = 0; y < m; ++y)
      if (!got[y]) a[y][y] = 2;
  }
  if (m == 2 && a[0][1] * a[1][0] >= 4) throw std::invalid_argument("J is not of finite type");
  (void)have_cartan;

  std::vector<int> all(g.size());
  std::iota(all.begin(), all.end(), 0);
  // J-components via J-colored edges only
  std::vector<int> comp_of(g.size(), -1);
  std::vector<std::vector<int>> comps;
  for (int s : all) {
    if (comp_of[s] >= 0) continue;
    int id = static_cast<int>(comps.size());
    comps.emplace_back();
    std::vector<int> stack{s};
    comp_of[s] = id;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comps.back().push_back(v);
      for (int j : J)
        for (int w : {g.f_raw(v, j), g.e_raw(v, j)})
          if (w >= 0 && comp_of[w] < 0) {
            comp_of[w] = id;
            stack.push_back(w);
          }
    }
  }
  rep.components = comps.size();

  for (const auto& comp : comps) {
    bool open = false;
    for (int v : comp)
      for (int j : J)
        if (g.f_raw(v, j) == CrystalGraph::kUnknown || g.e_raw(v, j) == CrystalGraph::kUnknown) open = true;
    if (open) {
      violate("component of " + g.node(comp.front()).key + " reaches unevaluated nodes");
      continue;
    }
    bool labels_ok = true;
    for (int v : comp)
      for (int j : J) {
        const auto& n = g.node(v);
        if (!n.eps[j].is_finite() || !n.phi[j].is_finite()) {
          violate("minus-infinity labels at " + n.key + " for color " + std::to_string(j));
          labels_ok = false;
          continue;
        }
        int up = 0, down = 0;
        for (int c = v; (c = g.e(c, j).value_or(-1)) >= 0;)
          if (++up > static_cast<int>(comp.size())) break;
        for (int c = v; (c = g.f(c, j).value_or(-1)) >= 0;)
          if (++down > static_cast<int>(comp.size())) break;
        if (up != n.eps[j].value() || down != n.phi[j].value()) {
          violate("string lengths at " + n.key + " for color " + std::to_string(j) + " do not match eps/phi");
          labels_ok = false;
        }
      }
    if (!labels_ok) continue;
    std::vector<int> tops;
    for (int v : comp)
      if (std::all_of(J.begin(), J.end(), [&](int j) { return g.node(v).eps[j] == ExtInt(0); })) tops.push_back(v);
    if (tops.size() != 1) {
      violate("component of " + g.node(comp.front()).key + " has " + std::to_string(tops.size()) +
              " J-highest nodes");
      continue;
    }
    int top = tops.front();
    std::vector<int> highest;
    for (int j : J) highest.push_back(g.pairing(top, j));
    // depth vectors by f̃-closure from the top
    std::map<int, RootCoord> cvec;
    cvec[top] = RootCoord(m, 0);
    std::vector<int> stack{top};
    bool consistent = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (std::size_t y = 0; y < m; ++y) {
        auto w = g.f(v, J[y]);
        if (!w) continue;
        RootCoord c = cvec[v];
        ++c[y];
        auto it = cvec.find(*w);
        if (it == cvec.end()) {
          cvec.emplace(*w, c);
          stack.push_back(*w);
        } else if (it->second != c) {
          consistent = false;
        }
      }
    }
    if (!consistent || cvec.size() != comp.size()) {
      violate("component of " + g.node(top).key + " is not generated consistently from its highest node");
      continue;
    }
    std::map<RootCoord, long long> seen;
    for (auto& [v, c] : cvec) ++seen[c];
    auto expect = finite_character(a, highest);
    if (seen != expect)
      violate("character of the component of " + g.node(top).key + " differs from the Weyl character");
  }
  return rep;
}

// ---------------------------------------------------------------------------

GraphCrystal::GraphCrystal(std::shared_ptr<const RootData> rd, CrystalGraph g) : Crystal(std::move(rd)), g_(std::move(g)) {
  if (g_.colors() != rank()) throw DimensionMismatch("graph colors differ from rank");
}

std::optional<Elem> GraphCrystal::e(ElemView b, int i) const {
  auto w = g_.e(b[0], i);
  if (!w) return std::nullopt;
  return Elem{*w};
}

std::optional<Elem> GraphCrystal::f(ElemView b, int i) const {
  auto w = g_.f(b[0], i);
  if (!w) return std::nullopt;
  return Elem{*w};
}

json GraphCrystal::to_json(ElemView b) const {
  const std::string& key = g_.node(b[0]).key;
  auto parsed = json::parse(key, nullptr, false);
  return parsed.is_discarded() ? json(key) : parsed;
}

Elem GraphCrystal::from_json(const json& j) const {
  int v = g_.find(j.is_string() && g_.find(j.get<std::string>()) >= 0 ? j.get<std::string>() : j.dump());
  if (v < 0) throw std::invalid_argument("no such node: " + j.dump());
  return {v};
}

}  // namespace crystal

