// crystal: command-line front end for the crystal engine.
//
// Exit codes: 0 success / verification passed, 1 verification failed or a
// runtime limit was hit, 2 invalid usage or parameters.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "crystal/graph.hpp"
#include "crystal/path.hpp"
#include "crystal/perfect.hpp"
#include "crystal/theorem.hpp"

using namespace crystal;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file so readers never see partial output.
void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::string tmp = out + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw UsageError("cannot write " + out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
  }
  std::filesystem::rename(tmp, out);
}

CrystalGraph load_graph(const std::string& path) {
  std::string text = read_file(path);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '['))
    return CrystalGraph::from_json(json::parse(text));
  return CrystalGraph::from_dot(text);
}

std::string render_graph(const CrystalGraph& g, const std::string& format, bool canonical) {
  if (format == "dot") return g.to_dot();
  if (format == "json") return g.to_json(canonical).dump(2);
  throw UsageError("graph format must be json or dot");
}

struct Factor {
  enum Kind { highest, perfect, one_point } kind;
  Weight lambda;
  int l = 0;
};

std::vector<Factor> parse_factors(const std::string& text, const RootData& rd) {
  std::vector<Factor> out;
  std::istringstream in(text);
  std::string tok;
  bool expect_factor = true;
  while (in >> tok) {
    if (!expect_factor) {
      if (tok != "x") throw UsageError("tensor factors are separated by ' x ', got '" + tok + "'");
      expect_factor = true;
      continue;
    }
    auto colon = tok.find(':');
    if (colon == std::string::npos) throw UsageError("factor must look like hw:L0, bl:2 or t:L1, got '" + tok + "'");
    std::string kind = tok.substr(0, colon), arg = tok.substr(colon + 1);
    Factor f{};
    if (kind == "hw") {
      f.kind = Factor::highest;
      f.lambda = Weight::parse(arg, rd.rank());
      if (!is_dominant(f.lambda)) throw UsageError("hw weight must be dominant");
    } else if (kind == "bl") {
      f.kind = Factor::perfect;
      f.l = std::stoi(arg);
      if (f.l < 0) throw UsageError("bl level must be nonnegative");
    } else if (kind == "t") {
      f.kind = Factor::one_point;
      f.lambda = Weight::parse(arg, rd.rank());
    } else {
      throw UsageError("unknown factor kind '" + kind + "'");
    }
    out.push_back(f);
    expect_factor = false;
  }
  if (out.empty() || expect_factor) throw UsageError("empty or dangling tensor description");
  return out;
}

struct Built {
  CrystalPtr crystal;
  std::vector<Elem> seeds;
  bool infinite = false;
};

Built build_crystal(std::shared_ptr<const RootData> rd, const std::vector<Factor>& factors, int slots) {
  std::vector<CrystalPtr> parts;
  std::vector<std::vector<Elem>> choices;
  Built b;
  for (const auto& f : factors) {
    switch (f.kind) {
      case Factor::highest: {
        auto p = std::make_shared<const PathCrystal>(rd, f.lambda, slots);
        choices.push_back({p->ground_state()});
        parts.push_back(p);
        b.infinite = true;
        break;
      }
      case Factor::perfect: {
        auto p = std::make_shared<const PerfectCrystalA>(rd, f.l);
        choices.push_back(p->elements());
        parts.push_back(p);
        break;
      }
      case Factor::one_point:
        parts.push_back(std::make_shared<const TCrystal>(rd, f.lambda));
        choices.push_back({Elem{}});
        break;
    }
  }
  b.crystal = tensor(parts);
  b.seeds = {Elem{}};
  for (const auto& opts : choices) {
    std::vector<Elem> next;
    for (const auto& s : b.seeds)
      for (const auto& o : opts) next.push_back(TensorCrystal::pair(s, o));
    b.seeds = std::move(next);
  }
  return b;
}

struct GenOptions {
  std::string family;
  int bl = -1;
  std::string hw;
  std::string tensor_text;
  int depth = -1;
  int slots = 0;
  std::string input;
};

std::shared_ptr<const RootData> root_data_for(const std::string& family) {
  if (family.empty()) throw UsageError("--family is required");
  auto t = AffineType::parse(family);
  t.validate();
  return std::make_shared<const RootData>(t);
}

CrystalGraph generate_from(const GenOptions& o, const Budget& budget) {
  if (!o.input.empty()) return load_graph(o.input);
  auto rd = root_data_for(o.family);
  int chosen = (o.bl >= 0) + !o.hw.empty() + !o.tensor_text.empty();
  if (chosen != 1) throw UsageError("give exactly one of --bl, --hw, --tensor or --input");
  if (rd->type().family != Family::A1) throw UsageError("crystal operators are available for family A1 only");
  std::vector<Factor> factors;
  if (o.bl >= 0) factors.push_back({Factor::perfect, {}, o.bl});
  if (!o.hw.empty()) factors = parse_factors("hw:" + o.hw, *rd);
  if (!o.tensor_text.empty()) factors = parse_factors(o.tensor_text, *rd);
  bool infinite = std::any_of(factors.begin(), factors.end(), [](const Factor& f) { return f.kind == Factor::highest; });
  int depth = o.depth;
  if (depth < 0) depth = infinite ? 4 : 1 << 20;
  return with_truncation_retry(o.slots > 0 ? o.slots : default_slots(depth), 512, [&](int N) {
    auto b = build_crystal(rd, factors, N);
    return generate(*b.crystal, b.seeds, depth, infinite ? Direction::f_only : Direction::both, budget);
  });
}

void add_gen_options(CLI::App* cmd, GenOptions& o) {
  cmd->add_option("--family", o.family, "affine type, e.g. A1:2");
  cmd->add_option("--bl", o.bl, "perfect crystal B_l");
  cmd->add_option("--hw", o.hw, "highest weight crystal B(lambda), e.g. L0+L1");
  cmd->add_option("--tensor", o.tensor_text, "tensor of factors, e.g. \"hw:L0 x bl:2\"");
  cmd->add_option("--depth", o.depth, "generation depth");
  cmd->add_option("--slots", o.slots, "path truncation N (default depth + 2)");
}

json key_json(const std::string& key) {
  auto parsed = json::parse(key, nullptr, false);
  return parsed.is_discarded() ? json(key) : parsed;
}

int report_exit(const VerificationReport& rep, const std::string& format, const std::string& out) {
  emit(format == "json" ? rep.to_json().dump(2) : rep.to_text(), out);
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crystal graphs, heads, perfect crystals and verification of B(lambda) x B_l isomorphisms"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  std::string out;
  long long budget_nodes = 0;
  double budget_seconds = 0;
  bool canonical = false;
  app.add_option("--budget", budget_nodes, "node budget (overrides CRYSTAL_BUDGET)");
  app.add_option("--time-budget", budget_seconds, "time budget per stage in seconds");
  app.add_option("-o,--out", out, "output file (written atomically)");

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "generate a crystal graph");
  add_gen_options(gen, gen_opts);
  gen->add_option("--format", format, "json or dot");
  gen->add_flag("--canonical", canonical, "sort nodes by key");

  GenOptions head_opts;
  bool strict = false;
  auto* head_cmd = app.add_subcommand("head", "head of a crystal graph and its induced crystal");
  add_gen_options(head_cmd, head_opts);
  head_cmd->add_option("--input", head_opts.input, "graph file (json or dot)");
  head_cmd->add_option("--format", format, "json, dot or text");
  head_cmd->add_flag("--strict", strict, "fail when any node is tainted by unevaluated edges");

  std::string t_family, t_factors, t_elem, t_op;
  int t_color = -1;
  auto* tensor_cmd = app.add_subcommand("tensor", "apply the tensor rule to one element");
  tensor_cmd->add_option("--family", t_family)->required();
  tensor_cmd->add_option("--factors", t_factors, "e.g. \"bl:2 x bl:1\"")->required();
  tensor_cmd->add_option("--elem", t_elem, "element as nested JSON, e.g. [[2,0,0],[0,1,0]]")->required();
  tensor_cmd->add_option("--op", t_op, "e or f");
  tensor_cmd->add_option("-i,--color", t_color, "color i");
  int t_slots = 4;
  tensor_cmd->add_option("--slots", t_slots, "path truncation for hw factors");

  std::string p_family, p_lambda, p_coords;
  int p_l = 0;
  bool p_inverse = false;
  auto* psi_cmd = app.add_subcommand("psi", "map u_lambda x b to B_{l-k}");
  psi_cmd->add_option("--family", p_family)->required();
  psi_cmd->add_option("--l", p_l)->required();
  psi_cmd->add_option("--lambda", p_lambda)->required();
  psi_cmd->add_option("--coords", p_coords, "comma separated coordinates")->required();
  psi_cmd->add_flag("--inverse", p_inverse, "map B_{l-k} back to B_l^(lambda)");

  GenOptions weyl_opts;
  std::string w_node, w_word;
  auto* weyl_cmd = app.add_subcommand("weyl", "Weyl group action S_w on a node");
  add_gen_options(weyl_cmd, weyl_opts);
  weyl_cmd->add_option("--input", weyl_opts.input, "graph file");
  weyl_cmd->add_option("--node", w_node, "node key (element JSON)")->required();
  weyl_cmd->add_option("--word", w_word, "reduced word i1,i2,... for s_i1 s_i2 ...")->required();

  auto* verify = app.add_subcommand("verify", "run a verification");
  verify->require_subcommand(1);
  verify->fallthrough();
  std::string v_family, v_lambda;
  int v_k = -1, v_l = 0, v_depth = 6, v_slots = 0;
  auto add_rank1 = [&](CLI::App* c, bool needs_lambda) {
    c->add_option("--family", v_family)->required();
    c->add_option("--k", v_k, "level of lambda");
    c->add_option("--l", v_l)->required();
    auto* lo = c->add_option("--lambda", v_lambda);
    if (needs_lambda) lo->required();
    c->add_option("--depth", v_depth);
    c->add_option("--slots", v_slots);
    c->add_option("--format", format, "json or text");
  };
  auto* v_iso = verify->add_subcommand("iso", "B(lambda) x B_l isomorphic to B_{l-k} x B(lambda')");
  add_rank1(v_iso, true);
  auto* v_head = verify->add_subcommand("head-location", "head of B(lambda) x B_l");
  add_rank1(v_head, true);
  auto* v_psi = verify->add_subcommand("psi-bijection", "Psi: B_l^(lambda) -> B_{l-k} is a bijection");
  add_rank1(v_psi, false);
  auto* v_perf = verify->add_subcommand("perfectness", "perfectness probes for B_l");
  v_perf->add_option("--family", v_family)->required();
  v_perf->add_option("--l", v_l)->required();
  v_perf->add_option("--format", format, "json or text");
  GenOptions dec_opts;
  auto* v_dec = verify->add_subcommand("decomposition", "decomposition along head components");
  add_gen_options(v_dec, dec_opts);
  v_dec->add_option("--input", dec_opts.input, "graph file");
  int dec_depth = 4;
  v_dec->add_option("--ball", dec_depth, "ball radius compared per component");
  v_dec->add_option("--format", format, "json or text");

  std::string c_input, c_to = "json";
  auto* convert = app.add_subcommand("convert", "convert graphs between json and dot");
  convert->add_option("--input", c_input)->required();
  convert->add_option("--to", c_to, "json or dot");
  convert->add_flag("--canonical", canonical, "sort nodes by key");

  std::string path_family, path_lambda, path_elem, path_op;
  int path_slots = 3, path_color = 0;
  auto* path_cmd = app.add_subcommand("path", "ground-state paths of B(lambda)");
  path_cmd->require_subcommand(1);
  path_cmd->fallthrough();
  auto* path_ground = path_cmd->add_subcommand("ground", "print the ground-state path");
  auto* path_step = path_cmd->add_subcommand("step", "apply one operator to a path");
  for (auto* c : {path_ground, path_step}) {
    c->add_option("--family", path_family)->required();
    c->add_option("--lambda", path_lambda)->required();
    c->add_option("--slots", path_slots, "truncation N");
  }
  path_step->add_option("--path", path_elem, "path JSON {\"mu_N\":..., \"slots\":...}")->required();
  path_step->add_option("--op", path_op, "e or f")->required();
  path_step->add_option("-i,--color", path_color)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Budget budget = Budget::from_env();
    if (budget_nodes > 0) budget.max_nodes = static_cast<std::size_t>(budget_nodes);
    if (budget_seconds > 0) budget.max_time = std::chrono::milliseconds(static_cast<long long>(budget_seconds * 1000));

    if (*gen) {
      emit(render_graph(generate_from(gen_opts, budget), format, canonical), out);
      return 0;
    }
    if (*head_cmd) {
      CrystalGraph g = generate_from(head_opts, budget);
      auto hp = head_partial(g);
      if (strict && hp.tainted_count > 0)
        throw Failure(std::to_string(hp.tainted_count) + " nodes have e-closures reaching unevaluated nodes");
      CrystalGraph hc = head_crystal(g, hp.head);
      if (format == "dot") {
        emit(hc.to_dot(), out);
      } else if (format == "text") {
        std::ostringstream os;
        os << "head: " << hp.head.size() << " nodes (" << hp.tainted_count << " undecided)\n";
        for (int v : hp.head) os << "  " << g.node(v).key << "\n";
        emit(os.str(), out);
      } else {
        json keys = json::array();
        for (int v : hp.head) keys.push_back(key_json(g.node(v).key));
        emit(json{{"head", keys}, {"size", hp.head.size()}, {"tainted", hp.tainted_count},
                  {"head_crystal", hc.to_json(canonical)}}
                 .dump(2),
             out);
      }
      return 0;
    }
    if (*tensor_cmd) {
      auto rd = root_data_for(t_family);
      if (rd->type().family != Family::A1) throw UsageError("crystal operators are available for family A1 only");
      auto b = build_crystal(rd, parse_factors(t_factors, *rd), t_slots);
      Elem x = b.crystal->from_json(json::parse(t_elem));
      auto stats = [&](const Elem& e) {
        json eps = json::array(), phi = json::array();
        for (int i = 0; i < rd->rank(); ++i) {
          eps.push_back(b.crystal->eps(e, i).str());
          phi.push_back(b.crystal->phi(e, i).str());
        }
        return json{{"elem", b.crystal->to_json(e)}, {"wt", b.crystal->wt(e).values()}, {"eps", eps}, {"phi", phi}};
      };
      json result = stats(x);
      if (!t_op.empty()) {
        if (t_op != "e" && t_op != "f") throw UsageError("--op must be e or f");
        if (t_color < 0 || t_color >= rd->rank()) throw UsageError("--color out of range");
        auto y = t_op == "e" ? b.crystal->e(x, t_color) : b.crystal->f(x, t_color);
        result["result"] = y ? stats(*y) : json(nullptr);
      }
      emit(result.dump(2), out);
      return 0;
    }
    if (*psi_cmd) {
      auto t = AffineType::parse(p_family);
      t.validate();
      Weight lam = Weight::parse(p_lambda, static_cast<std::size_t>(t.rank()));
      Coord c = parse_coord(p_coords);
      if (p_inverse) {
        int k = level_of_weight(t, lam);
        if (!bl_contains(t, p_l - k, c)) throw UsageError("coordinates are not in B_{l-k}");
        emit(format_coord(psi_inverse(t, p_l, lam, c)), out);
        return 0;
      }
      if (!bl_contains(t, p_l, c)) throw UsageError("coordinates are not in B_l");
      if (auto why = head_set_failure(t, p_l, lam, c)) throw UsageError("not in B_l^(lambda): " + *why);
      emit(format_coord(psi_map(t, p_l, lam, c)), out);
      return 0;
    }
    if (*weyl_cmd) {
      CrystalGraph g = generate_from(weyl_opts, budget);
      int v = g.find(json::parse(w_node).dump());
      if (v < 0) throw UsageError("node not in the graph: " + w_node);
      std::vector<int> word;
      for (const auto& part : CLI::detail::split(w_word, ',')) word.push_back(std::stoi(part));
      int w = weyl_word(g, v, word);
      emit(json{{"node", key_json(g.node(v).key)}, {"word", word}, {"image", key_json(g.node(w).key)}}.dump(2), out);
      return 0;
    }
    if (*verify) {
      if (*v_perf) {
        auto t = AffineType::parse(v_family);
        t.validate();
        return report_exit(verify_perfectness(t, v_l), format, out);
      }
      if (*v_dec) {
        CrystalGraph g = generate_from(dec_opts, budget);
        std::string tag = dec_opts.family.empty() ? g.type_tag() : dec_opts.family;
        if (tag.empty()) throw UsageError("--family is required for graphs without a type tag");
        auto rd = root_data_for(tag);
        return report_exit(verify_decomposition(rd, g, dec_depth, budget), format, out);
      }
      auto t = AffineType::parse(v_family);
      t.validate();
      RootData rd(t);
      std::optional<Weight> lam;
      if (!v_lambda.empty()) lam = Weight::parse(v_lambda, static_cast<std::size_t>(rd.rank()));
      if (*v_psi) {
        int k = v_k >= 0 ? v_k : (lam ? level_of_weight(t, *lam) : -1);
        if (k < 0) throw UsageError("give --k or --lambda");
        return report_exit(verify_psi_bijection(t, k, v_l, lam), format, out);
      }
      if (v_k >= 0 && rd.level(*lam) != v_k) throw UsageError("--k does not match the level of --lambda");
      Rank1Params p{t, v_l, *lam, v_depth, v_slots, budget};
      return report_exit(*v_iso ? verify_iso_theorem(p) : verify_head_location(p), format, out);
    }
    if (*convert) {
      emit(render_graph(load_graph(c_input), c_to, canonical), out);
      return 0;
    }
    if (*path_cmd) {
      auto rd = root_data_for(path_family);
      Weight lam = Weight::parse(path_lambda, static_cast<std::size_t>(rd->rank()));
      PathCrystal pc(rd, lam, path_slots);
      if (*path_ground) {
        emit(pc.to_json(pc.ground_state()).dump(), out);
        return 0;
      }
      Elem p = pc.from_json(json::parse(path_elem));
      if (path_op != "e" && path_op != "f") throw UsageError("--op must be e or f");
      if (path_color < 0 || path_color >= rd->rank()) throw UsageError("--color out of range");
      try {
        auto q = path_op == "e" ? pc.e(p, path_color) : pc.f(p, path_color);
        emit(q ? pc.to_json(*q).dump() : std::string("null"), out);
        return 0;
      } catch (const TruncationFault& tf) {
        std::cerr << "truncation fault: " << tf.what() << "; retry with --slots "
                  << path_slots + tf.suggested_increase() << "\n";
        return 1;
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const LevelViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const TheoremViolation& e) {
    std::cerr << "theorem violation: " << e.what() << "\n" << e.witness().dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
