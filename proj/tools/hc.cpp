// Command-line front end.
//
// Exit codes: 0 property holds / Duplicator wins, 1 property fails / Spoiler
// wins, 2 usage or input error, 3 resource guard tripped.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hc/characterization.hpp"
#include "hc/coalgebras.hpp"
#include "hc/comonads.hpp"
#include "hc/games.hpp"
#include "hc/io.hpp"
#include "hc/logic.hpp"
#include "hc/structures.hpp"
#include "json.hpp"

namespace {

using namespace hc;

constexpr int kHolds = 0;
constexpr int kFails = 1;
constexpr int kUsage = 2;
constexpr int kResource = 3;

const std::map<std::string, GameVariant> kLogics = {
    {"hybrid", GameVariant::BackForthHybrid},
    {"hybrid-temporal", GameVariant::BackForthTemporal},
    {"bf", GameVariant::BackForthBounded},
    {"bc", GameVariant::Bijection},
    {"bijection", GameVariant::Bijection},
    {"fo-ef", GameVariant::EF},
    {"existential-hybrid", GameVariant::ExistentialHybrid},
    {"existential-bf", GameVariant::ExistentialBounded},
};

constexpr const char* kLogicHelp =
    "hybrid -> hybrid back-and-forth game, hybrid-temporal -> temporal game, "
    "bf -> bounded back-and-forth game, bc|bijection -> bijection game, "
    "fo-ef -> EF game, existential-hybrid -> existential hybrid game, "
    "existential-bf -> existential bounded game";

GameVariant parse_variant(const std::string& name) {
  for (GameVariant v : {GameVariant::ExistentialEF, GameVariant::ExistentialHybrid,
                        GameVariant::ExistentialBounded, GameVariant::EF, GameVariant::BackForthHybrid,
                        GameVariant::BackForthBounded, GameVariant::BackForthTemporal,
                        GameVariant::Bijection, GameVariant::ComonadicGk})
    if (to_string(v) == name) return v;
  throw Error("unknown game variant '" + name + "'");
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

// Reason of the first failing check on the principal line of a transcript.
std::string failure_reason(const std::string& transcript) {
  std::istringstream in(transcript);
  std::string line;
  const std::string tag = "check=fail: ";
  while (std::getline(in, line)) {
    const auto pos = line.find(tag);
    if (pos != std::string::npos) return line.substr(pos + tag.size());
    if (line.find("cardinality clash") != std::string::npos) return line;
  }
  return "Spoiler exhausts Duplicator's replies";
}

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) throw Error("corpus '" + dir + "' is not a directory");
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> out;
  for (const auto& p : files) out.push_back({p.stem().string(), load_structure(p.string())});
  if (out.empty()) throw Error("corpus '" + dir + "' has no .json structures");
  return out;
}

struct Options {
  std::string structure, left, right, formula, logic = "hybrid", variant, kind, cover, notion, corpus,
      anchor = "x", transition, target;
  int depth = -1, k = -1, q = -1;
  bool fo = false, trace = false, with_identity = false, verify = false, temporal = false, scott = false;
  std::size_t bijection_cap = 8;
};

int cmd_check(const Options& o) {
  const Structure s = load_structure(o.structure);
  ParseOptions po;
  po.max_constant = static_cast<int>(s.basepoints().size());
  bool holds;
  if (o.fo) {
    const Formula f = parse_fo(o.formula, po);
    std::cout << "formula: " << to_string(f) << '\n';
    holds = eval_fo(f, s);
  } else {
    const Hybrid f = parse_hybrid(o.formula, po);
    std::cout << "formula: " << to_string(f) << '\n';
    holds = eval_hybrid(f, s);
  }
  std::cout << "result: " << (holds ? "holds" : "fails") << '\n';
  return holds ? kHolds : kFails;
}

int report_game(const GameResult& r, const Structure& a, const Structure& b, bool trace, bool show_reason) {
  std::cout << "winner: " << to_string(r.winner) << '\n';
  const std::string transcript = hc::trace(r, a, b);
  if (show_reason && r.winner == Player::Spoiler) std::cout << "reason: " << failure_reason(transcript) << '\n';
  if (trace) std::cout << transcript;
  return r.winner == Player::Duplicator ? kHolds : kFails;
}

int cmd_equiv(const Options& o) {
  const auto it = kLogics.find(o.logic);
  if (it == kLogics.end()) throw Error("unknown logic '" + o.logic + "' (" + kLogicHelp + ")");
  const Structure a = load_structure(o.left);
  const Structure b = load_structure(o.right);
  GameOptions go;
  go.bijection_cap = o.bijection_cap;
  const GameResult r = solve(a, b, it->second, o.depth, go);
  std::cout << "logic: " << o.logic << " game: " << to_string(it->second) << " depth: " << o.depth << '\n';
  std::cout << "equivalent: " << yes_no(r.winner == Player::Duplicator) << '\n';
  return report_game(r, a, b, o.trace, true);
}

int cmd_game(const Options& o) {
  const GameVariant v = parse_variant(o.variant);
  const Structure a = load_structure(o.left);
  const Structure b = load_structure(o.right);
  GameOptions go;
  go.bijection_cap = o.bijection_cap;
  const GameResult r = solve(a, b, v, o.k, go);
  std::cout << "game: " << to_string(v) << " rounds: " << o.k << '\n';
  const int code = report_game(r, a, b, true, true);
  std::cout << "strategy verified: " << yes_no(verify_strategy(r, a, b, v, o.k, go)) << '\n';
  return code;
}

int cmd_comonad(const Options& o) {
  const Structure a = load_structure(o.structure);
  const ComonadKind kind = parse_comonad_kind(o.kind);
  if (o.target.empty()) {
    std::cout << build_comonad(a, kind, o.k, o.with_identity).dump();
    return kHolds;
  }
  const Structure b = load_structure(o.target);
  const auto w = find_cokleisli_morphism(a, b, kind, o.k);
  std::cout << "cokleisli morphism: " << yes_no(w.has_value()) << '\n';
  if (!w) return kFails;
  for (int i = 0; i < w->carrier->size(); ++i)
    std::cout << w->carrier->play_name(i) << " -> " << b.name(w->map[i]) << '\n';
  return kHolds;
}

int cmd_depth(const Options& o) {
  const Structure s = load_structure(o.structure);
  const ComonadKind kind = o.kind.empty() ? default_cover_kind(s) : parse_comonad_kind(o.kind);
  const int m = static_cast<int>(s.basepoints().size());
  if (!o.cover.empty()) {
    const TreeCover t = load_cover(o.cover, s);
    const bool gen = is_generated_tree_cover(t);
    std::cout << "generated cover: " << yes_no(gen) << '\n';
    if (!gen) return kFails;
    const int h = cover_height(t);
    const int k = std::max(1, h - m);
    std::cout << "height: " << h << '\n';
    const Coalgebra c = cover_to_coalgebra(t, k, kind);
    const bool laws = check_coalgebra_laws(c).all();
    std::cout << "coalgebra (" << to_string(kind) << ", k=" << k << ") laws: " << (laws ? "pass" : "fail")
              << '\n';
    for (int x = 0; x < s.size(); ++x) {
      std::cout << "  " << s.name(x) << " -> ";
      for (std::size_t i = 0; i < c.alpha[x].size(); ++i) std::cout << (i ? "." : "") << s.name(c.alpha[x][i]);
      std::cout << '\n';
    }
    return laws ? kHolds : kFails;
  }
  const DepthResult d = generated_tree_depth(s);
  std::cout << "generated tree depth: " << d.depth.to_string() << '\n';
  std::cout << "coalgebra number (" << to_string(kind) << "): " << coalgebra_number(s, kind).to_string()
            << '\n';
  if (d.witness) std::cout << "witness cover: " << cover_to_json(*d.witness) << '\n';
  return d.depth.is_infinite() ? kFails : kHolds;
}

int cmd_workspace(const Options& o) {
  const Structure a = load_structure(o.structure);
  const Workspace w = build_workspace(a, o.q);
  std::cout << "|A| = " << a.size() << '\n';
  std::cout << "|N| = " << w.ball.size() << " (ball radius " << w.radius << ")\n";
  std::cout << "|C| = " << w.workspace.size() << '\n';
  std::cout << "bound 2q|A| = " << 2 * o.q * a.size() << '\n';
  if (!o.verify) return kHolds;
  const auto v = verify_workspace_report(a, o.q);
  std::cout << "positions replayed: " << v.positions << '\n';
  std::cout << "invariants: " << (v.invariants ? "hold" : "violated") << '\n';
  std::cout << "partial isomorphisms: " << (v.partial_isomorphisms ? "hold" : "violated") << '\n';
  std::cout << "strategy verified: " << yes_no(v.strategy_verified) << '\n';
  std::cout << "EF solver agrees: " << yes_no(v.solver_agrees) << '\n';
  if (v.failure) std::cout << "failure: " << *v.failure << '\n';
  std::cout << "verification: " << (v.ok() ? "passed" : "failed") << '\n';
  return v.ok() ? kHolds : kFails;
}

int cmd_invariance(const Options& o) {
  const Formula f = parse_fo(o.formula);
  const InvarianceNotion n = parse_invariance_notion(o.notion);
  const auto corpus = load_corpus(o.corpus);
  const InvarianceReport r = check_invariance(f, n, corpus);
  std::cout << "formula: " << to_string(f) << '\n';
  std::cout << "notion: " << to_string(n) << '\n';
  std::cout << "comparisons: " << r.checked << '\n';
  for (const auto& c : r.counterexamples) {
    std::cout << "counterexample: " << c.structure;
    if (!c.partner.empty()) std::cout << " + " << c.partner;
    std::cout << " original=" << (c.original ? "true" : "false")
              << " transformed=" << (c.transformed ? "true" : "false") << '\n';
  }
  std::cout << "invariant on corpus: " << yes_no(r.invariant()) << '\n';
  return r.invariant() ? kHolds : kFails;
}

int cmd_translate(const Options& o) {
  const Hybrid f = parse_hybrid(o.formula);
  const Formula t = standard_translation(f, o.anchor, o.transition.empty() ? "E" : o.transition);
  std::cout << to_string(t) << '\n';
  return kHolds;
}

int cmd_characteristic(const Options& o) {
  const Structure s = load_structure(o.structure);
  if (o.scott) {
    const ScottType t = scott_type(s, o.k);
    std::cout << "scott type: " << to_string(t) << '\n';
    std::cout << "formula: " << to_string(scott_formula(t, s.signature())) << '\n';
    return kHolds;
  }
  CharacteristicOptions co;
  co.temporal = o.temporal;
  const Formula f = characteristic_formula(s, o.k, co);
  std::cout << "rank: " << quantifier_rank(f) << '\n';
  std::cout << "formula: " << to_string(f) << '\n';
  return kHolds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Games, comonads and tree covers for hybrid logic and bounded formulas"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "Evaluate a formula at the basepoints");
  check->add_option("--structure", o.structure, "Structure JSON")->required();
  check->add_option("--formula", o.formula, "Hybrid formula, or first-order sentence with --fo")->required();
  check->add_flag("--fo", o.fo, "Parse the formula as a first-order sentence");

  auto* equiv = app.add_subcommand("equiv", "Decide equivalence up to a depth by solving a game");
  equiv->add_option("--left", o.left, "Left structure JSON")->required();
  equiv->add_option("--right", o.right, "Right structure JSON")->required();
  equiv->add_option("--logic", o.logic, kLogicHelp)->capture_default_str();
  equiv->add_option("--depth", o.depth, "Number of rounds")->required()->check(CLI::NonNegativeNumber);
  equiv->add_flag("--trace", o.trace, "Print the principal line of play");
  equiv->add_option("--bijection-cap", o.bijection_cap, "Largest accessible set in the bijection game")
      ->capture_default_str();

  auto* game = app.add_subcommand("game", "Solve a game and print its transcript");
  game->add_option("--left", o.left, "Left structure JSON")->required();
  game->add_option("--right", o.right, "Right structure JSON")->required();
  game->add_option("--variant", o.variant,
                   "existential-ef, existential-hybrid, existential-bounded, ef, hybrid, bounded, "
                   "hybrid-temporal, bijection, gk")
      ->required();
  game->add_option("--rounds", o.k, "Number of rounds")->required()->check(CLI::NonNegativeNumber);
  game->add_option("--bijection-cap", o.bijection_cap, "Largest accessible set in the bijection game")
      ->capture_default_str();

  auto* comonad = app.add_subcommand("comonad", "Dump a comonad carrier or search for a coKleisli morphism");
  comonad->add_option("--structure", o.structure, "Structure JSON")->required();
  comonad->add_option("--kind", o.kind, "ef, modal, hybrid, hybrid-temporal, bounded")->required();
  comonad->add_option("--k", o.k, "Resource index")->required()->check(CLI::PositiveNumber);
  comonad->add_flag("--with-I", o.with_identity, "Add the equality-tracking relation I");
  comonad->add_option("--target", o.target, "Search for a coKleisli morphism into this structure");

  auto* depth = app.add_subcommand("depth", "Generated tree depth and coalgebra number, or check a cover");
  depth->add_option("--structure", o.structure, "Structure JSON")->required();
  depth->add_option("--cover", o.cover, "Cover JSON to check instead");
  depth->add_option("--kind", o.kind, "Comonad for the coalgebras (hybrid or bounded by default)");

  auto* workspace = app.add_subcommand("workspace", "Build the workspace and optionally verify its strategy");
  workspace->add_option("--structure", o.structure, "Structure JSON")->required();
  workspace->add_option("--q", o.q, "Number of rounds")->required()->check(CLI::PositiveNumber);
  workspace->add_flag("--verify", o.verify, "Replay every Spoiler sequence and cross-check");

  auto* invariance = app.add_subcommand("invariance", "Check a sentence for invariance over a corpus");
  invariance->add_option("--formula", o.formula, "First-order sentence")->required();
  invariance->add_option("--notion", o.notion, "generated:K, disjoint or ball:K")->required();
  invariance->add_option("--corpus", o.corpus, "Directory of structure JSON files")->required();

  auto* translate = app.add_subcommand("translate", "Standard translation of a hybrid formula");
  translate->add_option("--formula", o.formula, "Hybrid formula")->required();
  translate->add_option("--anchor", o.anchor, "Anchor variable")->capture_default_str();
  translate->add_option("--transition", o.transition, "Transition symbol (default E)");

  auto* characteristic = app.add_subcommand("characteristic", "Characteristic sentence of a structure");
  characteristic->add_option("--structure", o.structure, "Structure JSON")->required();
  characteristic->add_option("--k", o.k, "Rank")->required()->check(CLI::NonNegativeNumber);
  characteristic->add_flag("--temporal", o.temporal, "Also quantify through backward guards");
  characteristic->add_flag("--scott", o.scott, "Print the counting descriptor instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) return cmd_check(o);
    if (*equiv) return cmd_equiv(o);
    if (*game) return cmd_game(o);
    if (*comonad) return cmd_comonad(o);
    if (*depth) return cmd_depth(o);
    if (*workspace) return cmd_workspace(o);
    if (*invariance) return cmd_invariance(o);
    if (*translate) return cmd_translate(o);
    if (*characteristic) return cmd_characteristic(o);
  } catch (const ResourceExceeded& e) {
    std::cerr << "error: resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
