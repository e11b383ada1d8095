#include "crystal/theorem.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>

namespace crystal {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool same_labels(const GraphNode& a, const GraphNode& b) { return a.wt == b.wt && a.eps == b.eps && a.phi == b.phi; }

json node_json(const CrystalGraph& g, int v) {
  if (v < 0) return nullptr;
  auto parsed = json::parse(g.node(v).key, nullptr, false);
  return parsed.is_discarded() ? json(g.node(v).key) : parsed;
}

json params_json(const Rank1Params& p) {
  return {{"type", p.type.str()}, {"l", p.l}, {"lambda", p.lambda.token()}, {"depth", p.depth}};
}

void require_rank1_params(const Rank1Params& p, const RootData& rd) {
  if (p.type.family != Family::A1) throw InvalidType("family A1 only: other families lack operator rules");
  if (rd.rank() <= 2) throw std::invalid_argument("the theorem needs rank > 2");
  if (p.lambda.size() != static_cast<std::size_t>(rd.rank())) throw DimensionMismatch("weight size differs from rank");
  if (!is_dominant(p.lambda)) throw std::invalid_argument("lambda must be dominant");
  int k = rd.level(p.lambda);
  if (k >= p.l) throw LevelViolation("level of lambda must be below l");
  if (p.depth < 0) throw std::invalid_argument("depth must be nonnegative");
}

}  // namespace

// ---------------------------------------------------------------------------

void VerificationReport::check(const std::string& name, bool ok, json witness) {
  conditions.emplace_back(name, ok);
  if (!ok && !counterexample) counterexample = json{{"condition", name}, {"witness", std::move(witness)}};
}

bool VerificationReport::pass() const {
  return !conditions.empty() && std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.second; });
}

json VerificationReport::to_json() const {
  json conds = json::array();
  for (const auto& [name, ok] : conditions) conds.push_back({{"name", name}, {"pass", ok}});
  json out{{"theorem", theorem}, {"parameters", parameters}, {"pass", pass()}, {"nodes", nodes}, {"edges", edges},
           {"conditions", conds}, {"details", details}, {"seconds", seconds}};
  out["counterexample"] = counterexample ? *counterexample : json(nullptr);
  return out;
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << theorem << ": " << (pass() ? "PASS" : "FAIL") << "  (" << parameters.dump() << ")\n";
  os << "  nodes " << nodes << ", edges " << edges << ", " << seconds << " s\n";
  for (const auto& [name, ok] : conditions) os << "  [" << (ok ? "ok" : "FAIL") << "] " << name << "\n";
  if (counterexample) os << "  counterexample: " << counterexample->dump() << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------

NormalForm emax_normal_form(const CrystalGraph& g, int b, const std::function<bool(int)>& target, int cap) {
  NormalForm nf;
  int cur = b;
  while (!target(cur)) {
    if (nf.sweeps >= cap)
      throw TheoremViolation("no normal form within " + std::to_string(cap) + " sweeps", json{{"start", node_json(g, b)}});
    bool moved = false;
    for (int i = 0; i < g.colors() && !target(cur); ++i) {
      if (!g.e(cur, i)) continue;
      nf.trace.push_back({{"i", i}, {"eps", g.node(cur).eps[i].str()}});
      cur = e_max(g, cur, i);
      ++nf.applications;
      moved = true;
    }
    ++nf.sweeps;
    if (!moved && !target(cur))
      throw TheoremViolation("e^max sweeps stalled outside the target set",
                             json{{"start", node_json(g, b)}, {"stalled_at", node_json(g, cur)}});
  }
  nf.node = cur;
  return nf;
}

// ---------------------------------------------------------------------------

json Extension::to_json() const {
  json out{{"mapped", mapped},
           {"choices_checked", choices_checked},
           {"choice_conflicts", choice_conflicts},
           {"commutation_checked", commutation_checked},
           {"commutation_failures", commutation_failures},
           {"label_failures", label_failures},
           {"head_failures", head_failures},
           {"region_size", region_size},
           {"region_unmapped", region_unmapped},
           {"unchecked_edges", unchecked_edges},
           {"injective", injective}};
  if (witness) out["witness"] = *witness;
  return out;
}

Extension extend_morphism(const CrystalGraph& src, const CrystalGraph& tgt, const std::vector<std::pair<int, int>>& head_table,
                          const std::vector<char>& region) {
  if (src.colors() <= 2) throw std::invalid_argument("morphism extension needs rank > 2");
  if (src.colors() != tgt.colors()) throw DimensionMismatch("source and target have different color sets");
  const int colors = src.colors();
  constexpr int kNotAdmissible = -3;
  constexpr int kOpen = -2;
  constexpr int kShort = -1;

  Extension ex;
  ex.map.assign(src.size(), -1);
  std::vector<int> head_map(src.size(), -1);
  auto note = [&](const std::string& what, json w) {
    if (!ex.witness) ex.witness = json{{"failure", what}, {"detail", std::move(w)}};
  };
  auto pair_json = [&](int s, int t) { return json{{"source", node_json(src, s)}, {"target", node_json(tgt, t)}}; };

  for (auto [s, t] : head_table) {
    head_map[s] = t;
    ex.map[s] = t;
    if (!same_labels(src.node(s), tgt.node(t))) {
      ++ex.label_failures;
      note("head table changes wt/eps/phi", pair_json(s, t));
    }
  }
  for (auto [s, t] : head_table)
    for (int i = 0; i < colors; ++i) {
      auto es = src.e(s, i);
      auto et = tgt.e(t, i);
      bool ok = es ? (et && head_map[*es] == *et) : !et;
      if (!ok) {
        ++ex.head_failures;
        note("head table does not commute with e_" + std::to_string(i), pair_json(s, t));
      }
    }

  auto emax_src = [&](int b, int i) {
    int cur = b;
    for (std::size_t steps = 0;; ++steps) {
      int w = src.e_raw(cur, i);
      if (w == CrystalGraph::kUnknown) return kOpen;
      if (w == CrystalGraph::kNil) return cur;
      if (steps > src.size()) throw SoundnessError("cyclic e-string in source");
      cur = w;
    }
  };
  auto f_power = [&](int t, int i, int m) {
    for (int s = 0; s < m; ++s) {
      int w = tgt.f_raw(t, i);
      if (w == CrystalGraph::kUnknown) return kOpen;
      if (w == CrystalGraph::kNil) return kShort;
      t = w;
    }
    return t;
  };
  // Ψ̃(b) via color i, or one of the sentinels above
  auto candidate = [&](int b, int i) {
    ExtInt ep = src.node(b).eps[i];
    if (!ep.is_finite() || ep.value() <= 0) return kNotAdmissible;
    int top = emax_src(b, i);
    if (top < 0 || ex.map[top] < 0) return kOpen;
    return f_power(ex.map[top], i, ep.value());
  };

  std::vector<int> heads;
  for (auto [s, t] : head_table) heads.push_back(s);
  auto depth = f_depth_from(src, heads);
  std::vector<int> order;
  for (int v = 0; v < static_cast<int>(src.size()); ++v)
    if (depth[v] >= 0) order.push_back(v);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return depth[a] < depth[b]; });
  std::vector<char> short_noted(src.size(), 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (int b : order) {
      if (ex.map[b] >= 0) continue;
      for (int i = 0; i < colors; ++i) {
        int c = candidate(b, i);
        if (c >= 0) {
          ex.map[b] = c;
          changed = true;
          break;
        }
        if (c == kShort && !short_noted[b]) {
          short_noted[b] = 1;
          ++ex.commutation_failures;
          note("f-string in the target is shorter than eps_" + std::to_string(i), json{{"source", node_json(src, b)}});
        }
      }
    }
  }

  // every admissible i0 must give the same image
  for (int b = 0; b < static_cast<int>(src.size()); ++b) {
    if (ex.map[b] < 0) continue;
    ++ex.mapped;
    for (int i = 0; i < colors; ++i) {
      int c = candidate(b, i);
      if (c == kNotAdmissible || c == kOpen) continue;
      ++ex.choices_checked;
      if (c != ex.map[b]) {
        ++ex.choice_conflicts;
        note("image depends on the choice of i0", json{{"source", node_json(src, b)}, {"color", i},
                                                        {"image", node_json(tgt, ex.map[b])},
                                                        {"other", node_json(tgt, c)}});
      }
    }
  }

  for (int b = 0; b < static_cast<int>(src.size()); ++b) {
    if (!region[b]) continue;
    ++ex.region_size;
    int t = ex.map[b];
    if (t < 0) {
      ++ex.region_unmapped;
      continue;
    }
    if (!same_labels(src.node(b), tgt.node(t))) {
      ++ex.label_failures;
      note("wt/eps/phi differ", pair_json(b, t));
    }
    for (int i = 0; i < colors; ++i)
      for (int dirn = 0; dirn < 2; ++dirn) {
        int x = dirn == 0 ? src.f_raw(b, i) : src.e_raw(b, i);
        int y = dirn == 0 ? tgt.f_raw(t, i) : tgt.e_raw(t, i);
        if (x == CrystalGraph::kUnknown || y == CrystalGraph::kUnknown || (x >= 0 && ex.map[x] < 0)) {
          ++ex.unchecked_edges;
          continue;
        }
        ++ex.commutation_checked;
        bool ok = x == CrystalGraph::kNil ? y == CrystalGraph::kNil : y == ex.map[x];
        if (!ok) {
          ++ex.commutation_failures;
          note(std::string(dirn == 0 ? "f_" : "e_") + std::to_string(i) + " does not commute", pair_json(b, t));
        }
      }
  }

  std::vector<int> seen(tgt.size(), -1);
  for (int b = 0; b < static_cast<int>(src.size()); ++b) {
    int t = ex.map[b];
    if (t < 0) continue;
    if (seen[t] >= 0) {
      ex.injective = false;
      note("two nodes share an image", json{{"first", node_json(src, seen[t])}, {"second", node_json(src, b)}});
    }
    seen[t] = b;
  }
  return ex;
}

// ---------------------------------------------------------------------------

VerificationReport verify_head_location(const Rank1Params& p) {
  auto t0 = Clock::now();
  VerificationReport rep;
  rep.theorem = "head-location";
  rep.parameters = params_json(p);
  auto rd = std::make_shared<const RootData>(p.type);
  require_rank1_params(p, *rd);
  const int k = rd->level(p.lambda);

  auto bl = std::make_shared<const PerfectCrystalA>(rd, p.l);
  const auto all_b = bl->elements();
  const auto head_set = enumerate_head_set(p.type, p.l, p.lambda);
  int used_slots = 0;
  struct Built {
    CrystalGraph g;
    std::vector<int> layer;  // u_λ ⊗ b for b ∈ B_l, in enumeration order
  };
  Built built = with_truncation_retry(
      p.slots > 0 ? p.slots : default_slots(p.depth), 512,
      [&](int N) {
        auto path = std::make_shared<const PathCrystal>(rd, p.lambda, N);
        auto c = tensor({path, bl});
        std::vector<Elem> seeds;
        for (const auto& b : all_b) seeds.push_back(TensorCrystal::pair(path->ground_state(), b));
        Built out{generate(*c, seeds, p.depth, Direction::f_only, p.budget), {}};
        for (const auto& s : seeds) out.layer.push_back(find_elem(out.g, *c, s));
        return out;
      },
      &used_slots);
  const CrystalGraph& g = built.g;
  rep.nodes = g.size();
  rep.edges = g.edge_count();

  std::set<int> expected;
  std::vector<char> in_layer(g.size(), 0), in_expected(g.size(), 0);
  for (std::size_t a = 0; a < all_b.size(); ++a) {
    in_layer[built.layer[a]] = 1;
    if (std::binary_search(head_set.begin(), head_set.end(), all_b[a])) {
      expected.insert(built.layer[a]);
      in_expected[built.layer[a]] = 1;
    }
  }
  auto hp = head_partial(g);
  bool layer_clean = true;
  for (int v : built.layer)
    if (hp.tainted[v]) layer_clean = false;
  rep.check("u_lambda x B_l fully evaluated", layer_clean);

  std::set<int> found(hp.head.begin(), hp.head.end());
  json diff = json::array();
  for (int v : found)
    if (!expected.count(v)) diff.push_back({{"unexpected", node_json(g, v)}});
  for (int v : expected)
    if (!found.count(v)) diff.push_back({{"missing", node_json(g, v)}});
  rep.check("head equals u_lambda x B_l^(lambda)", diff.empty(), diff);
  rep.check("|head| equals |B_{l-k}|", expected.size() == enumerate_bl(p.type, p.l - k).size(),
            json{{"head", expected.size()}});

  json open = nullptr;
  for (int v : expected)
    for (int i = 0; i < g.colors() && open.is_null(); ++i) {
      auto w = g.e(v, i);
      if (w && !in_expected[*w]) open = json{{"node", node_json(g, v)}, {"color", i}, {"image", node_json(g, *w)}};
    }
  rep.check("head set closed under e_i", open.is_null(), open);

  int max_sweeps = 0, max_apps = 0;
  json stuck = nullptr;
  for (int v : built.layer) {
    try {
      auto nf = emax_normal_form(g, v, [&](int x) { return in_expected[x] != 0; });
      max_sweeps = std::max(max_sweeps, nf.sweeps);
      max_apps = std::max(max_apps, nf.applications);
    } catch (const TheoremViolation& tv) {
      if (stuck.is_null()) stuck = json{{"error", tv.what()}, {"witness", tv.witness()}};
    }
  }
  rep.check("e^max sweeps from every u_lambda x b reach the head", stuck.is_null(), stuck);

  rep.details = {{"slots", used_slots},
                 {"head_size", found.size()},
                 {"decided_nodes", g.size() - hp.tainted_count},
                 {"tainted_nodes", hp.tainted_count},
                 {"max_sweeps", max_sweeps},
                 {"max_emax_steps", max_apps},
                 {"sweep_order", "round-robin 0..n"}};
  rep.seconds = since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct IsoRun {
  CrystalGraph left, right;  // B(λ)⊗B_l and B_{l-k}⊗B(λ')
  std::vector<int> head_left, head_right;  // paired by index through Ψ
  std::vector<char> ball_left, ball_right;
  int margin = 0;
  VerificationReport checks;
  Extension ext;
};

IsoRun run_iso(const Rank1Params& p, std::shared_ptr<const RootData> rd, int N) {
  const int k = rd->level(p.lambda);
  const Weight lambda_p = sigma_inv(p.type, p.lambda);
  auto path_l = std::make_shared<const PathCrystal>(rd, p.lambda, N);
  auto path_r = std::make_shared<const PathCrystal>(rd, lambda_p, N);
  auto bl = std::make_shared<const PerfectCrystalA>(rd, p.l);
  auto blk = std::make_shared<const PerfectCrystalA>(rd, p.l - k);
  auto lc = tensor({path_l, bl});
  auto rc = tensor({blk, path_r});

  const auto head_set = enumerate_head_set(p.type, p.l, p.lambda);
  std::vector<Elem> seeds_l, seeds_r;
  std::set<Coord> images;
  for (const auto& b : head_set) {
    Coord y = psi_map(p.type, p.l, p.lambda, b);
    images.insert(y);
    seeds_l.push_back(TensorCrystal::pair(path_l->ground_state(), b));
    seeds_r.push_back(TensorCrystal::pair(y, path_r->ground_state()));
  }
  const auto target = enumerate_bl(p.type, p.l - k);

  IsoRun run;
  constexpr int kMarginCap = 12;
  for (int margin = 2;; margin += 2) {
    run = IsoRun{};
    run.margin = margin;
    run.checks.check("Psi is a bijection onto B_{l-k}",
                     images.size() == head_set.size() && std::set<Coord>(target.begin(), target.end()) == images);
    const int D = p.depth + margin;
    run.left = generate(*lc, seeds_l, D, Direction::f_only, p.budget);
    run.right = generate(*rc, seeds_r, D, Direction::f_only, p.budget);
    for (const auto& s : seeds_l) run.head_left.push_back(find_elem(run.left, *lc, s));
    for (const auto& s : seeds_r) run.head_right.push_back(find_elem(run.right, *rc, s));

    auto head_matches = [&](const CrystalGraph& g, const std::vector<int>& seeds) {
      auto hp = head_partial(g);
      std::set<int> want(seeds.begin(), seeds.end());
      bool seeds_clean = std::none_of(seeds.begin(), seeds.end(), [&](int v) { return hp.tainted[v] != 0; });
      return seeds_clean && std::set<int>(hp.head.begin(), hp.head.end()) == want;
    };
    run.checks.check("head of B(lambda) x B_l is u_lambda x B_l^(lambda)", head_matches(run.left, run.head_left));
    run.checks.check("head of B_{l-k} x B(lambda') is B_{l-k} x u_lambda'", head_matches(run.right, run.head_right));

    // Ψ on the heads: labels and ẽ-commutation
    std::map<int, std::size_t> pos_l, pos_r;
    for (std::size_t a = 0; a < run.head_left.size(); ++a) {
      pos_l[run.head_left[a]] = a;
      pos_r[run.head_right[a]] = a;
    }
    json bad = nullptr;
    for (std::size_t a = 0; a < run.head_left.size() && bad.is_null(); ++a) {
      int u = run.head_left[a], v = run.head_right[a];
      if (!same_labels(run.left.node(u), run.right.node(v))) {
        bad = json{{"left", node_json(run.left, u)}, {"right", node_json(run.right, v)}, {"issue", "labels"}};
        break;
      }
      for (int i = 0; i < rd->rank(); ++i) {
        auto eu = run.left.e(u, i);
        auto ev = run.right.e(v, i);
        bool ok = eu ? (ev && pos_l.count(*eu) && pos_r.count(*ev) && pos_l[*eu] == pos_r[*ev]) : !ev;
        if (!ok) {
          bad = json{{"left", node_json(run.left, u)}, {"right", node_json(run.right, v)}, {"color", i}};
          break;
        }
      }
    }
    run.checks.check("Psi commutes with e_i on the heads", bad.is_null(), bad);

    run.ball_left = f_ball(run.left, run.head_left, p.depth);
    run.ball_right = f_ball(run.right, run.head_right, p.depth);
    std::vector<std::pair<int, int>> table;
    for (std::size_t a = 0; a < run.head_left.size(); ++a) table.emplace_back(run.head_right[a], run.head_left[a]);
    run.ext = extend_morphism(run.right, run.left, table, run.ball_right);
    if (run.ext.region_unmapped > 0 && margin < kMarginCap) continue;
    break;
  }

  const Extension& ex = run.ext;
  run.checks.check("extension covers the ball", ex.region_unmapped == 0, json{{"unmapped", ex.region_unmapped}});
  run.checks.check("extension independent of i0", ex.choice_conflicts == 0, ex.witness ? *ex.witness : json());
  run.checks.check("extension commutes with e_i and f_i", ex.commutation_failures == 0 && ex.head_failures == 0,
                   ex.witness ? *ex.witness : json());
  run.checks.check("extension preserves wt, eps, phi", ex.label_failures == 0, ex.witness ? *ex.witness : json());
  run.checks.check("extension injective", ex.injective);
  bool image_ok = true;
  std::size_t image_in_ball = 0;
  for (int b = 0; b < static_cast<int>(run.right.size()); ++b) {
    if (!run.ball_right[b] || ex.map[b] < 0) continue;
    if (!run.ball_left[ex.map[b]]) image_ok = false;
    ++image_in_ball;
  }
  std::size_t ball_left_size = static_cast<std::size_t>(std::count(run.ball_left.begin(), run.ball_left.end(), 1));
  run.checks.check("extension maps the ball onto the ball", image_ok && image_in_ball == ball_left_size,
                   json{{"image", image_in_ball}, {"ball", ball_left_size}});
  std::vector<std::pair<int, int>> seeds;
  for (std::size_t a = 0; a < run.head_left.size(); ++a) seeds.emplace_back(run.head_right[a], run.head_left[a]);
  auto iso = is_isomorphic_within(run.right, run.ball_right, run.left, run.ball_left, seeds);
  run.checks.check("balls isomorphic", iso.ok,
                   json{{"reason", iso.reason}, {"right", node_json(run.right, iso.node1)},
                        {"left", node_json(run.left, iso.node2)}, {"color", iso.color}});
  return run;
}

}  // namespace

VerificationReport verify_iso_theorem(const Rank1Params& p, int stability_runs) {
  auto t0 = Clock::now();
  VerificationReport rep;
  rep.theorem = "iso";
  rep.parameters = params_json(p);
  auto rd = std::make_shared<const RootData>(p.type);
  require_rank1_params(p, *rd);
  rep.parameters["k"] = rd->level(p.lambda);
  rep.parameters["lambda_prime"] = sigma_inv(p.type, p.lambda).token();

  int N0 = 0;
  std::vector<IsoRun> runs;
  runs.push_back(with_truncation_retry(
      p.slots > 0 ? p.slots : default_slots(p.depth + 4), 512, [&](int N) { return run_iso(p, rd, N); }, &N0));
  json per_n = json::array();
  auto summarize = [&](const IsoRun& r, int N) {
    json conds = json::array();
    for (auto& [name, ok] : r.checks.conditions) conds.push_back({{"name", name}, {"pass", ok}});
    return json{{"slots", N},
                {"margin", r.margin},
                {"left_nodes", r.left.size()},
                {"right_nodes", r.right.size()},
                {"ball", std::count(r.ball_left.begin(), r.ball_left.end(), 1)},
                {"extension", r.ext.to_json()},
                {"conditions", conds}};
  };
  per_n.push_back(summarize(runs[0], N0));
  for (const auto& [name, ok] : runs[0].checks.conditions) {
    json w = nullptr;
    if (!ok && runs[0].checks.counterexample) w = runs[0].checks.counterexample->at("witness");
    rep.check(name, ok, w);
  }
  rep.nodes = runs[0].left.size() + runs[0].right.size();
  rep.edges = runs[0].left.edge_count() + runs[0].right.edge_count();

  bool stable = true;
  json drift = nullptr;
  for (int extra = 1; extra < stability_runs; ++extra) {
    IsoRun r;
    try {
      r = run_iso(p, rd, N0 + extra);
    } catch (const TruncationFault& tf) {
      stable = false;
      drift = json{{"slots", N0 + extra}, {"fault", tf.what()}};
      break;
    }
    per_n.push_back(summarize(r, N0 + extra));
    if (!r.checks.pass()) {
      stable = false;
      if (drift.is_null()) drift = json{{"slots", N0 + extra}, {"failed", r.checks.counterexample.value_or(json())}};
      continue;
    }
    auto same_ball = [&](const CrystalGraph& a, const std::vector<char>& ra, const std::vector<int>& ha,
                         const CrystalGraph& b, const std::vector<char>& rb, const std::vector<int>& hb) {
      std::vector<std::pair<int, int>> s;
      for (std::size_t x = 0; x < ha.size(); ++x) s.emplace_back(ha[x], hb[x]);
      return is_isomorphic_within(a, ra, b, rb, s);
    };
    auto il = same_ball(runs[0].left, runs[0].ball_left, runs[0].head_left, r.left, r.ball_left, r.head_left);
    auto ir = same_ball(runs[0].right, runs[0].ball_right, runs[0].head_right, r.right, r.ball_right, r.head_right);
    if (!il.ok || !ir.ok) {
      stable = false;
      if (drift.is_null()) drift = json{{"slots", N0 + extra}, {"left", il.reason}, {"right", ir.reason}};
    }
  }
  if (stability_runs > 1) rep.check("N-stable", stable, drift);
  rep.details = {{"runs", per_n}};
  rep.seconds = since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

VerificationReport verify_decomposition(std::shared_ptr<const RootData> rd, const CrystalGraph& g, int depth,
                                        const Budget& budget) {
  auto t0 = Clock::now();
  VerificationReport rep;
  rep.theorem = "decomposition";
  rep.parameters = {{"type", rd->type().str()}, {"depth", depth}};
  rep.nodes = g.size();
  rep.edges = g.edge_count();
  if (g.colors() != rd->rank()) throw DimensionMismatch("graph colors differ from rank");
  if (g.colors() <= 2) throw std::invalid_argument("the decomposition needs rank > 2");

  auto hp = head_partial(g);
  rep.check("head is nonempty", !hp.head.empty());
  if (hp.head.empty()) {
    rep.seconds = since(t0);
    return rep;
  }
  CrystalGraph hc;
  try {
    hc = head_crystal(g, hp.head);
  } catch (const std::exception& ex) {
    rep.check("head crystal is well defined", false, json{{"error", ex.what()}});
    rep.seconds = since(t0);
    return rep;
  }
  rep.check("head crystal is well defined", true);
  // the induced head must itself be regular; the rank-2 probe checks its necessary conditions
  json probe_fail = nullptr;
  for (int a = 0; a < g.colors() && probe_fail.is_null(); ++a)
    for (int b = a; b < g.colors() && probe_fail.is_null(); ++b) {
      std::vector<int> J = a == b ? std::vector<int>{a} : std::vector<int>{a, b};
      auto pr = rank2_regularity_probe(hc, J);
      if (!pr.pass) probe_fail = pr.to_json();
    }
  rep.check("head passes the rank-2 probe", probe_fail.is_null(), probe_fail);

  json comps = json::array();
  auto components = components_within(g, hp.head);
  for (const auto& comp : components) {
    json entry{{"size", comp.size()}};
    Weight shift = g.node(comp.front()).wt - hc.node(hc.find(g.node(comp.front()).key)).wt;
    bool constant = true;
    for (int v : comp)
      if (g.node(v).wt - hc.node(hc.find(g.node(v).key)).wt != shift) constant = false;
    entry["shift"] = shift.token();
    rep.check("shift constant on component", constant, json{{"component_of", node_json(g, comp.front())}});
    rep.check("shift dominant", is_dominant(shift), json{{"shift", shift.token()}});
    if (!constant || !is_dominant(shift)) {
      comps.push_back(entry);
      continue;
    }
    try {
      auto ball_g = f_ball(g, comp, depth);
      auto dcrystal = std::make_shared<const GraphCrystal>(rd, head_crystal(g, comp));
      const CrystalGraph& dg = dcrystal->graph();
      int used = 0;
      struct Side {
        CrystalGraph graph;
        std::vector<int> seeds;
      };
      Side side = with_truncation_retry(
          default_slots(depth + 2), 512,
          [&](int N) {
            auto path = std::make_shared<const PathCrystal>(rd, shift, N);
            auto c = tensor({dcrystal, path});
            std::vector<Elem> seeds;
            for (int v : comp) seeds.push_back(TensorCrystal::pair(Elem{dg.find(g.node(v).key)}, path->ground_state()));
            Side s{generate(*c, seeds, depth + 1, Direction::f_only, budget), {}};
            for (const auto& e : seeds) s.seeds.push_back(find_elem(s.graph, *c, e));
            return s;
          },
          &used);
      auto ball_p = f_ball(side.graph, side.seeds, depth);
      std::vector<std::pair<int, int>> pairs;
      for (std::size_t a = 0; a < comp.size(); ++a) pairs.emplace_back(comp[a], side.seeds[a]);
      auto iso = is_isomorphic_within(g, ball_g, side.graph, ball_p, pairs);
      entry["ball"] = std::count(ball_g.begin(), ball_g.end(), 1);
      entry["slots"] = used;
      rep.check("component ball isomorphic to D x B(lambda_D)", iso.ok,
                json{{"reason", iso.reason}, {"node", node_json(g, iso.node1)}, {"color", iso.color}});
    } catch (const SoundnessError& ex) {
      rep.check("component evaluated to the requested depth", false, json{{"error", ex.what()}});
    }
    comps.push_back(entry);
  }
  rep.details = {{"components", comps}, {"head_size", hp.head.size()}, {"tainted_nodes", hp.tainted_count}};
  rep.seconds = since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

VerificationReport verify_perfectness(const AffineType& t, int l) {
  auto t0 = Clock::now();
  VerificationReport rep;
  rep.theorem = "perfectness";
  rep.parameters = {{"type", t.str()}, {"l", l}};
  if (t.family != Family::A1) throw InvalidType("operator rules exist for family A1 only");
  if (l < 1) throw std::invalid_argument("l must be positive");
  auto rd = std::make_shared<const RootData>(t);
  PerfectCrystalA B(rd, l);
  const auto elems = B.elements();
  rep.nodes = elems.size();

  json ax = nullptr, sn = nullptr;
  for (const auto& b : elems)
    for (int i = 0; i < rd->rank(); ++i) {
      if (ax.is_null()) {
        auto v = axiom_violation(B, b, i);
        if (!v.empty()) ax = json{{"element", b}, {"color", i}, {"axiom", v}};
      }
      if (sn.is_null()) {
        auto r = seminormal_check(B, b, i);
        if (!r.ok) sn = json{{"element", b}, {"color", i}, {"reason", r.reason}};
      }
    }
  rep.check("crystal axioms", ax.is_null(), ax);
  rep.check("seminormal", sn.is_null(), sn);

  auto g = generate(B, {elems.front()}, static_cast<int>(elems.size()) + 1, Direction::both);
  rep.edges = g.edge_count();
  rep.check("connected", g.size() == elems.size(), json{{"reached", g.size()}, {"size", elems.size()}});

  std::set<Weight> eps_set, phi_set;
  std::size_t minimal = 0;
  json low = nullptr, sig = nullptr;
  for (const auto& b : elems) {
    Weight e = B.eps_weight(b);
    int c = rd->level(e);
    if (c < l && low.is_null()) low = json{{"element", b}, {"level", c}};
    if (c != l) continue;
    ++minimal;
    Weight ph = B.phi_weight(b);
    eps_set.insert(e);
    phi_set.insert(ph);
    if (sigma(t, ph) != e && sig.is_null()) sig = json{{"element", b}};
  }
  auto dom = rd->dominant_weights(l);
  std::set<Weight> dom_set(dom.begin(), dom.end());
  rep.check("<c, eps(b)> >= l on B_l", low.is_null(), low);
  rep.check("eps: B_l^min -> dominant level-l weights bijective", eps_set.size() == minimal && eps_set == dom_set);
  rep.check("phi: B_l^min -> dominant level-l weights bijective", phi_set.size() == minimal && phi_set == dom_set);
  rep.check("sigma phi = eps on B_l^min", sig.is_null(), sig);
  rep.details = {{"minimal", minimal}, {"dominant_weights", dom.size()}};
  rep.seconds = since(t0);
  return rep;
}

VerificationReport verify_psi_bijection(const AffineType& t, int k, int l, std::optional<Weight> lambda) {
  auto t0 = Clock::now();
  VerificationReport rep;
  rep.theorem = "psi-bijection";
  rep.parameters = {{"type", t.str()}, {"k", k}, {"l", l}};
  if (!(0 < k && k < l)) throw LevelViolation("need 0 < k < l");
  RootData rd(t);
  std::vector<Weight> lambdas;
  if (lambda) {
    if (!is_dominant(*lambda) || level_of_weight(t, *lambda) != k)
      throw std::invalid_argument("lambda must be dominant of level k");
    lambdas.push_back(*lambda);
    rep.parameters["lambda"] = lambda->token();
  } else {
    lambdas = rd.dominant_weights(k);
  }
  const auto target = enumerate_bl(t, l - k);
  const std::set<Coord> target_set(target.begin(), target.end());
  std::set<std::string> branches;
  json bij = nullptr, inv = nullptr, emb = nullptr;
  std::size_t checked = 0;
  for (const auto& lam : lambdas) {
    const int n = t.n;
    if (t.family == Family::B1 || t.family == Family::D2dual) branches.insert(lam[n] % 2 ? "a_n odd" : "a_n even");
    if (t.family == Family::D1 && lam[n - 1] >= lam[n]) branches.insert("a_{n-1} >= a_n");
    if (t.family == Family::D1 && lam[n - 1] <= lam[n]) branches.insert("a_{n-1} <= a_n");
    const auto head = enumerate_head_set(t, l, lam);
    std::set<Coord> image;
    for (const auto& b : head) {
      ++checked;
      try {
        Coord y = psi_map(t, l, lam, b);
        if (!target_set.count(y) && bij.is_null()) bij = json{{"lambda", lam.token()}, {"b", b}, {"image", y}};
        image.insert(y);
        if (psi_inverse(t, l, lam, y) != b && inv.is_null()) inv = json{{"lambda", lam.token()}, {"b", b}};
      } catch (const std::exception& ex) {
        if (bij.is_null()) bij = json{{"lambda", lam.token()}, {"b", b}, {"error", ex.what()}};
      }
    }
    if ((image.size() != head.size() || image != target_set) && bij.is_null())
      bij = json{{"lambda", lam.token()}, {"head", head.size()}, {"image", image.size()}, {"target", target.size()}};
    if (t.family == Family::A1) {
      try {
        auto table = build_psi_embedding(t, k, l, lam);
        std::set<Coord> img;
        for (const auto& [s, d] : table.pairs) {
          img.insert(d);
          if (psi_inverse(t, l, lam, s) != d && emb.is_null())
            emb = json{{"lambda", lam.token()}, {"b", s}, {"psi", d}};
        }
        if (img != std::set<Coord>(head.begin(), head.end()) && emb.is_null())
          emb = json{{"lambda", lam.token()}, {"issue", "image differs from B_l^(lambda)"}};
      } catch (const std::exception& ex) {
        if (emb.is_null()) emb = json{{"lambda", lam.token()}, {"error", ex.what()}};
      }
    }
  }
  rep.check("Psi bijective B_l^(lambda) -> B_{l-k}", bij.is_null(), bij);
  rep.check("psi_inverse agrees", inv.is_null(), inv);
  if (t.family == Family::A1) rep.check("embedding psi consistent, image B_l^(lambda), equal to psi_inverse", emb.is_null(), emb);
  rep.nodes = checked;
  rep.details = {{"weights", lambdas.size()}, {"elements", checked}, {"branches", branches}};
  rep.seconds = since(t0);
  return rep;
}

}  // namespace crystal
