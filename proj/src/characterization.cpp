#include "hc/characterization.hpp"

#include <algorithm>
#include <functional>

namespace hc {

std::optional<int> MetricSpaceView::element(int s, int x) const {
  for (int e = 0; e < carrier.size(); ++e)
    if (summand[e] == s && local[e] == x) return e;
  return std::nullopt;
}

namespace {

struct Part {
  std::string name;  // empty for the base summand
  char type;
  const Structure* source;
};

// Sum of the parts; the first part keeps its ids and supplies the basepoints.
MetricSpaceView sum_view(const Structure& a, const std::vector<Part>& parts, bool pointed) {
  MetricSpaceView v;
  std::vector<std::string> universe;
  std::map<std::string, std::set<Tuple>> rel;
  for (const auto& [name, arity] : a.signature().relations) rel[name];
  int shift = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Structure& src = *parts[p].source;
    v.names.push_back(parts[p].name.empty() ? "base" : parts[p].name);
    v.type.push_back(parts[p].type);
    for (int e = 0; e < src.size(); ++e) {
      universe.push_back(parts[p].name.empty() ? src.name(e) : parts[p].name + ":" + src.name(e));
      v.summand.push_back(static_cast<int>(p));
      v.local.push_back(a.index(src.name(e)));
    }
    for (const auto& [name, tuples] : src.relations())
      for (auto t : tuples) {
        for (int& e : t) e += shift;
        rel[name].insert(std::move(t));
      }
    shift += src.size();
  }
  Signature sig = a.signature();
  std::vector<int> bp;
  if (pointed) {
    const Structure& base = *parts.front().source;
    for (int b : a.basepoints()) bp.push_back(base.index(a.name(b)));
  } else {
    sig.num_basepoints = 0;
  }
  v.carrier = Structure(sig, std::move(universe), std::move(rel), std::move(bp));
  v.distance = gaifman_distance(v.carrier);
  return v;
}

const MetricSpaceView& view(const Workspace& w, Side s) {
  return s == Side::Left ? w.left_view : w.right_view;
}

int on(const WorkspaceEntry& e, Side s) { return s == Side::Left ? e.left : e.right; }

Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

std::uint32_t pow2(int e) { return std::uint32_t{1} << e; }

}  // namespace

Workspace build_workspace(const Structure& a, int q) {
  if (q < 1) throw Error("workspace needs q >= 1");
  if (q > 16) throw ResourceExceeded("workspace radius 2^q is too large");
  Workspace w;
  w.q = q;
  w.radius = pow2(q);
  w.ball = ball_part(a, w.radius);

  std::vector<Part> copies;
  for (int i = 1; i <= q; ++i) copies.push_back({"M" + std::to_string(i), 'M', &a});
  for (int i = 1; i <= q; ++i) copies.push_back({"N" + std::to_string(i), 'N', &w.ball});
  w.workspace = sum_view(a, copies, false).carrier;
  if (w.workspace.size() > 2 * q * a.size()) throw Error("workspace exceeds the 2q|A| size bound");

  std::vector<Part> left{{"", 'M', &a}};
  std::vector<Part> right{{"", 'N', &w.ball}};
  left.insert(left.end(), copies.begin(), copies.end());
  right.insert(right.end(), copies.begin(), copies.end());
  w.left_view = sum_view(a, left, true);
  w.right_view = sum_view(a, right, true);
  w.left = w.left_view.carrier;
  w.right = w.right_view.carrier;
  return w;
}

std::uint32_t WorkspaceStrategyState::radius() const { return pow2(q - round); }

std::string to_string(WorkspaceCase c) {
  switch (c) {
    case WorkspaceCase::Near: return "I";
    case WorkspaceCase::Tracked: return "II";
    case WorkspaceCase::Fresh: return "III";
  }
  return "?";
}

WorkspaceStrategyState initial_workspace_state(const Workspace& w, bool sabotage) {
  WorkspaceStrategyState s;
  s.q = w.q;
  s.sabotage = sabotage;
  const auto& lb = w.left.basepoints();
  const auto& rb = w.right.basepoints();
  for (std::size_t i = 0; i < lb.size(); ++i) s.entries.push_back({lb[i], rb[i], true, -1, -1});
  return s;
}

WorkspaceStep workspace_strategy_step(const Workspace& w, const WorkspaceStrategyState& s, Move move) {
  if (s.round >= s.q) throw Error("workspace strategy has no rounds left");
  const Side mv = move.side;
  const Side ot = other(mv);
  const MetricSpaceView& vm = view(w, mv);
  const MetricSpaceView& vo = view(w, ot);
  const int e = move.element;
  if (e < 0 || e >= vm.carrier.size()) throw Error("move outside the structure");
  const ExtNat r1(pow2(s.q - s.round - 1));

  WorkspaceStep step;
  step.state = s;
  step.state.round = s.round + 1;
  WorkspaceEntry entry;
  auto place = [&](int reply) {
    if (mv == Side::Left) {
      entry.left = e;
      entry.right = reply;
    } else {
      entry.left = reply;
      entry.right = e;
    }
    step.reply = reply;
    step.state.entries.push_back(entry);
  };
  auto image = [&](int summand) {
    auto y = vo.element(summand, vm.local[e]);
    if (!y) throw Error("canonical isomorphism undefined on the moved element");
    return *y;
  };

  for (const auto& x : s.entries)
    if (x.near && vm.distance.at(on(x, mv), e) <= r1) {
      step.which = WorkspaceCase::Near;
      entry.near = true;
      place(image(0));
      return step;
    }

  for (const auto& x : s.entries)
    if (!x.near && vm.distance.at(on(x, mv), e) <= r1) {
      step.which = WorkspaceCase::Tracked;
      entry.near = false;
      entry.rho_left = x.rho_left;
      entry.rho_right = x.rho_right;
      int target = ot == Side::Left ? x.rho_left : x.rho_right;
      if (s.sabotage) {
        const int n = static_cast<int>(vo.names.size());
        for (int d = 1; d < n; ++d) {
          const int t = (target + d) % n;
          if (vo.type[t] == vo.type[target]) {
            target = t;
            break;
          }
        }
      }
      place(image(target));
      return step;
    }

  step.which = WorkspaceCase::Fresh;
  const int from = vm.summand[e];
  for (int t = 0; t < static_cast<int>(vo.names.size()); ++t) {
    if (vo.type[t] != vm.type[from]) continue;
    bool used = false;
    for (const auto& x : s.entries) used = used || vo.summand[on(x, ot)] == t;
    if (used) continue;
    entry.near = false;
    entry.rho_left = mv == Side::Left ? from : t;
    entry.rho_right = mv == Side::Left ? t : from;
    place(image(t));
    return step;
  }
  throw Error("no unused summand of the required type");
}

std::optional<std::string> workspace_invariant_violation(const Workspace& w,
                                                         const WorkspaceStrategyState& s) {
  const ExtNat r(s.radius());
  const std::uint32_t inner = w.radius - s.radius();
  const auto& es = s.entries;
  const std::size_t m = w.left.basepoints().size();
  for (std::size_t i = 0; i < m && i < es.size(); ++i)
    if (!es[i].near) return "basepoint " + std::to_string(i + 1) + " is not in C0";

  for (std::size_t i = 0; i < es.size(); ++i) {
    if (!es[i].near) continue;
    for (Side sd : {Side::Left, Side::Right}) {
      const auto& v = view(w, sd);
      const int x = on(es[i], sd);
      bool inside = v.summand[x] == 0 && std::any_of(v.carrier.basepoints().begin(),
                                                      v.carrier.basepoints().end(),
                                                      [&](int b) { return v.distance.at(b, x) <= inner; });
      if (!inside) return "near entry " + std::to_string(i) + " lies outside the inner ball";
    }
    if (w.left_view.local[es[i].left] != w.right_view.local[es[i].right])
      return "near entry " + std::to_string(i) + " is not copied identically";
  }

  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = 0; j < es.size(); ++j) {
      if (!es[i].near || es[j].near) continue;
      if (w.left_view.distance.at(es[i].left, es[j].left) <= r ||
          w.right_view.distance.at(es[i].right, es[j].right) <= r)
        return "entries " + std::to_string(i) + " and " + std::to_string(j) + " are not separated";
    }

  for (std::size_t i = 0; i < es.size(); ++i) {
    if (es[i].near) continue;
    const int sl = w.left_view.summand[es[i].left];
    const int sr = w.right_view.summand[es[i].right];
    if (es[i].rho_left != sl || es[i].rho_right != sr || w.left_view.type[sl] != w.right_view.type[sr] ||
        w.left_view.local[es[i].left] != w.right_view.local[es[i].right])
      return "far entry " + std::to_string(i) + " does not follow its canonical isomorphism";
  }

  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = i + 1; j < es.size(); ++j) {
      if (es[i].near || es[j].near) continue;
      const bool close = w.left_view.distance.at(es[i].left, es[j].left) <= r ||
                         w.right_view.distance.at(es[i].right, es[j].right) <= r;
      if (close && (es[i].rho_left != es[j].rho_left || es[i].rho_right != es[j].rho_right))
        return "close far entries " + std::to_string(i) + " and " + std::to_string(j) +
               " use different isomorphisms";
    }
  return std::nullopt;
}

WorkspaceVerification verify_workspace_report(const Structure& a, int q, bool sabotage) {
  WorkspaceVerification out;
  const Workspace w = build_workspace(a, q);
  GameResult strategy;
  strategy.variant = GameVariant::EF;
  strategy.k = q;
  strategy.winner = Player::Duplicator;

  auto pairs_of = [](const WorkspaceStrategyState& s) {
    History h;
    for (const auto& e : s.entries) h.emplace_back(e.left, e.right);
    return h;
  };

  std::function<void(const WorkspaceStrategyState&)> replay = [&](const WorkspaceStrategyState& s) {
    ++out.positions;
    const History h = pairs_of(s);
    if (auto why = workspace_invariant_violation(w, s)) {
      out.invariants = false;
      if (!out.failure) out.failure = *why;
    }
    if (!is_partial_isomorphism(h, w.left, w.right)) {
      out.partial_isomorphisms = false;
      if (!out.failure) out.failure = "position is not a partial isomorphism";
    }
    if (s.round == s.q) return;
    for (Side sd : {Side::Left, Side::Right}) {
      const int n = view(w, sd).carrier.size();
      for (int x = 0; x < n; ++x) {
        const Move mv{sd, x};
        const WorkspaceStep step = workspace_strategy_step(w, s, mv);
        strategy.duplicator[{h, mv}] = step.reply;
        replay(step.state);
      }
    }
  };
  replay(initial_workspace_state(w, sabotage));

  out.strategy_verified = verify_strategy(strategy, w.left, w.right, GameVariant::EF, q);
  out.solver_agrees = solve(w.left, w.right, GameVariant::EF, q).winner == Player::Duplicator;
  if (!out.strategy_verified && !out.failure) out.failure = "strategy rejected by the game verifier";
  if (!out.solver_agrees && !out.failure) out.failure = "EF solver finds a Spoiler win";
  return out;
}

bool verify_workspace(const Structure& a, int q, bool sabotage) {
  return verify_workspace_report(a, q, sabotage).ok();
}

InvarianceNotion parse_invariance_notion(const std::string& text) {
  InvarianceNotion n;
  if (text == "disjoint") {
    n.kind = InvarianceKind::Disjoint;
    n.k = 0;
    return n;
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error("notion must be generated:K, ball:K or disjoint");
  const std::string head = text.substr(0, colon);
  if (head == "generated") n.kind = InvarianceKind::Generated;
  else if (head == "ball") n.kind = InvarianceKind::Ball;
  else throw Error("unknown invariance notion '" + head + "'");
  try {
    std::size_t used = 0;
    n.k = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw Error("");
  } catch (const std::exception&) {
    throw Error("notion parameter must be an integer");
  }
  if (n.k < 0) throw Error("notion parameter must be non-negative");
  return n;
}

std::string to_string(const InvarianceNotion& n) {
  switch (n.kind) {
    case InvarianceKind::Generated: return "generated:" + std::to_string(n.k);
    case InvarianceKind::Ball: return "ball:" + std::to_string(n.k);
    case InvarianceKind::Disjoint: return "disjoint";
  }
  return "?";
}

namespace {

std::optional<bool> try_eval(const Formula& f, const Structure& s) {
  try {
    return eval_fo(f, s);
  } catch (const SignatureMismatch&) {
    return std::nullopt;
  } catch (const ScopeError&) {
    return std::nullopt;
  }
}

}  // namespace

InvarianceReport check_invariance(const Formula& f, const InvarianceNotion& notion,
                                  const std::vector<CorpusEntry>& corpus) {
  InvarianceReport rep;
  for (const auto& c : corpus) {
    const auto base = try_eval(f, c.structure);
    if (!base) continue;
    auto compare = [&](const Structure& t, const std::string& partner) {
      ++rep.checked;
      const bool v = eval_fo(f, t);
      if (v != *base) rep.counterexamples.push_back({c.name, partner, *base, v});
    };
    switch (notion.kind) {
      case InvarianceKind::Generated:
        compare(reachable_part(c.structure, ExtNat(static_cast<std::uint32_t>(notion.k))), "");
        break;
      case InvarianceKind::Ball:
        compare(ball_part(c.structure, static_cast<std::uint32_t>(notion.k)), "");
        break;
      case InvarianceKind::Disjoint:
        for (const auto& p : corpus) {
          const auto& sa = c.structure.signature();
          const auto& sb = p.structure.signature();
          if (sa.relations != sb.relations || sa.transitions != sb.transitions) continue;
          compare(disjoint_union(c.structure, p.structure), p.name);
        }
        break;
    }
  }
  return rep;
}

InvarianceReport check_local_agreement(const Formula& f, int k, const std::vector<CorpusEntry>& corpus) {
  InvarianceReport rep;
  for (const auto& c : corpus) {
    const Structure ball = ball_part(c.structure, static_cast<std::uint32_t>(k));
    const auto local = try_eval(f, ball);
    if (!local) continue;
    const Formula rel = gaifman_relativize(f, {}, k, c.structure.signature());
    ++rep.checked;
    const bool v = eval_fo(rel, c.structure);
    if (v != *local) rep.counterexamples.push_back({c.name, "", v, *local});
  }
  return rep;
}

Formula synthesize_bounded_equivalent(const Formula& f, int k, const std::vector<CorpusEntry>& corpus) {
  const auto rep = check_invariance(f, {InvarianceKind::Generated, k}, corpus);
  if (!rep.invariant())
    throw Error("formula is not generated:" + std::to_string(k) + " invariant on the corpus (" +
                rep.counterexamples.front().structure + ")");
  const int q = quantifier_rank(f);
  const int e = std::max(k, q);
  if (e > 16) throw ResourceExceeded("characteristic rank is too large");
  const int rank = q * static_cast<int>(pow2(e));
  std::vector<Formula> models;
  for (const auto& c : corpus) {
    const auto v = try_eval(f, c.structure);
    if (v && *v) models.push_back(characteristic_formula(c.structure, rank));
  }
  return fo::disj_all(models);
}

}  // namespace hc
