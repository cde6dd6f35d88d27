#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "generators.hpp"
#include "hc/characterization.hpp"
#include "oracles.hpp"

using namespace hc;

namespace {

std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> out;
  const auto fixtures = fx::unimodal_fixtures();
  for (std::size_t i = 0; i < fixtures.size(); ++i) out.push_back({"s" + std::to_string(i), fixtures[i]});
  out.push_back({"path6", fx::path(6)});
  out.push_back({"unreachable_p", fx::make(fx::unimodal_signature(), 2, {}, {1})});
  return out;
}

gen::FoShape bounded_shape() {
  gen::FoShape s;
  s.binary = {"E"};
  s.unary = {"P"};
  s.transitions = {"E"};
  return s;
}

bool ef_dup(const Structure& a, const Structure& b, GameVariant v, int k) {
  return solve(a, b, v, k).winner == Player::Duplicator;
}

}  // namespace

TEST_CASE("workspace construction") {
  const auto w3 = build_workspace(fx::path3(), 1);
  CHECK(w3.workspace.size() <= 6);
  CHECK(w3.radius == 2u);

  const auto p6 = fx::path(6);
  const auto w = build_workspace(p6, 1);
  CHECK(w.ball.universe() == std::vector<std::string>{"a", "b", "c"});
  CHECK(w.workspace.size() == 9);
  CHECK(w.left.size() == 15);
  CHECK(w.right.size() == 12);
  CHECK(w.left.basepoints().size() == 1);
  CHECK(w.left.name(w.left.basepoints()[0]) == "a");

  // The views tag every element with its summand and origin.
  for (int x = 0; x < w.left.size(); ++x) {
    const int s = w.left_view.summand[x];
    CHECK(w.left_view.element(s, w.left_view.local[x]) == x);
    for (int y = 0; y < w.left.size(); ++y)
      if (w.left_view.summand[y] != s) CHECK(w.left_view.distance.at(x, y).is_infinite());
  }
  CHECK(w.left_view.type[0] == 'M');
  CHECK(w.right_view.type[0] == 'N');

  // With the ball covering A both sides are isomorphic.
  for (const auto& s : {fx::path3(), fx::star(3), fx::c2()}) {
    const auto v = build_workspace(s, 2);
    CHECK(v.ball == s);
    CHECK(v.left.relations() == v.right.relations());
  }
  for (const auto& s : fx::unimodal_fixtures())
    for (int q = 1; q <= 2; ++q)
      CHECK(build_workspace(s, q).workspace.size() <= 2 * q * s.size());
  CHECK_THROWS_AS(build_workspace(p6, 0), Error);
  CHECK_THROWS_AS(build_workspace(p6, 17), ResourceExceeded);
}

TEST_CASE("strategy cases") {
  const auto p6 = fx::path(6);
  const auto w = build_workspace(p6, 2);
  const auto s0 = initial_workspace_state(w);
  CHECK(s0.radius() == 4u);
  CHECK_FALSE(workspace_invariant_violation(w, s0).has_value());

  const auto near = workspace_strategy_step(w, s0, Move{Side::Left, w.left.index("b")});
  CHECK(near.which == WorkspaceCase::Near);
  CHECK(w.right.name(near.reply) == "b");
  CHECK(near.state.radius() == 2u);

  const auto fresh = workspace_strategy_step(w, s0, Move{Side::Left, w.left.index("M1:a")});
  CHECK(fresh.which == WorkspaceCase::Fresh);
  CHECK(w.right.name(fresh.reply).rfind("M", 0) == 0);
  CHECK(w.right.name(fresh.reply).substr(w.right.name(fresh.reply).find(':')) == ":a");
  CHECK_FALSE(workspace_invariant_violation(w, fresh.state).has_value());

  const auto tracked = workspace_strategy_step(w, fresh.state, Move{Side::Left, w.left.index("M1:b")});
  CHECK(tracked.which == WorkspaceCase::Tracked);
  const std::string summand = w.right.name(fresh.reply).substr(0, w.right.name(fresh.reply).find(':'));
  CHECK(w.right.name(tracked.reply) == summand + ":b");
  CHECK_FALSE(workspace_invariant_violation(w, tracked.state).has_value());

  const auto sabotaged = workspace_strategy_step(w, initial_workspace_state(w, true), Move{Side::Left, w.left.index("M1:a")});
  const auto wrong = workspace_strategy_step(w, sabotaged.state, Move{Side::Left, w.left.index("M1:b")});
  CHECK(w.right.name(wrong.reply) != summand + ":b");

  CHECK_THROWS_AS(workspace_strategy_step(w, tracked.state, Move{Side::Left, 0}), Error);
  CHECK(to_string(WorkspaceCase::Near) == "I");
  CHECK(to_string(WorkspaceCase::Tracked) == "II");
  CHECK(to_string(WorkspaceCase::Fresh) == "III");
}

TEST_CASE("radius halves each round") {
  WorkspaceStrategyState s;
  s.q = 4;
  for (int r = 0; r < 4; ++r) {
    s.round = r;
    const auto now = s.radius();
    s.round = r + 1;
    CHECK(s.radius() * 2 == now);
  }
}

TEST_CASE("workspace verification") {
  CHECK(verify_workspace(fx::path(6), 1));
  CHECK(verify_workspace(fx::path(6), 2));
  for (const auto& s : fx::unimodal_fixtures())
    for (int q = 1; q <= 2; ++q) {
      const auto r = verify_workspace_report(s, q);
      INFO(fx::label(s), " q=", q, " ", r.failure.value_or(""));
      CHECK(r.ok());
      CHECK(r.positions > 0);
    }
  const auto sabotaged = verify_workspace_report(fx::path(6), 2, true);
  CHECK_FALSE(sabotaged.ok());
  CHECK(sabotaged.failure.has_value());
}

TEST_CASE("union of distant partial isomorphisms") {
  std::mt19937 rng(11);
  int tested = 0;
  for (int round = 0; round < 50000 && tested < 200; ++round) {
    const auto a = fx::random_structure(rng, fx::unimodal_signature(), 6, 0.15, 0.4);
    const auto b = fx::random_structure(rng, fx::unimodal_signature(), 6, 0.15, 0.4);
    const auto da = gaifman_distance(a);
    const auto db = gaifman_distance(b);
    auto random_pairs = [&](int n) {
      oracle::Pairs p;
      std::vector<int> xs(6), ys(6);
      std::iota(xs.begin(), xs.end(), 0);
      std::iota(ys.begin(), ys.end(), 0);
      std::shuffle(xs.begin(), xs.end(), rng);
      std::shuffle(ys.begin(), ys.end(), rng);
      for (int i = 0; i < n; ++i) p.emplace_back(xs[i], ys[i]);
      return p;
    };
    const auto alpha = random_pairs(1 + static_cast<int>(rng() % 2));
    const auto beta = random_pairs(1 + static_cast<int>(rng() % 2));
    if (!is_partial_isomorphism(alpha, a, b) || !is_partial_isomorphism(beta, a, b)) continue;
    bool far = true;
    for (const auto& [x, y] : alpha)
      for (const auto& [u, v] : beta) far = far && da.at(x, u) > ExtNat(1) && db.at(y, v) > ExtNat(1);
    if (!far) continue;
    auto both = alpha;
    both.insert(both.end(), beta.begin(), beta.end());
    CHECK(is_partial_isomorphism(both, a, b));
    ++tested;
  }
  CHECK(tested >= 100);
}

TEST_CASE("games after restricting to reachable parts and balls") {
  const auto fixtures = fx::unimodal_fixtures();
  for (const auto& a : fixtures)
    for (const auto& b : fixtures) {
      for (int m = 1; m <= 2; ++m) {
        const auto ra = reachable_part(a, ExtNat(static_cast<std::uint32_t>(m)));
        const auto rb = reachable_part(b, ExtNat(static_cast<std::uint32_t>(m)));
        if (ef_dup(a, b, GameVariant::BackForthBounded, m)) CHECK(ef_dup(ra, rb, GameVariant::BackForthBounded, m));
        const auto sa = ball_part(a, static_cast<std::uint32_t>(m));
        const auto sb = ball_part(b, static_cast<std::uint32_t>(m));
        if (ef_dup(a, b, GameVariant::BackForthTemporal, m)) CHECK(ef_dup(sa, sb, GameVariant::BackForthTemporal, m));
      }
      for (int k = 1; k <= 2; ++k)
        for (int q = 1; q <= 2; ++q) {
          const auto ra = reachable_part(a, ExtNat(static_cast<std::uint32_t>(k)));
          const auto rb = reachable_part(b, ExtNat(static_cast<std::uint32_t>(k)));
          if (ef_dup(ra, rb, GameVariant::BackForthBounded, k * q)) CHECK(ef_dup(ra, rb, GameVariant::EF, q));
          const auto sa = ball_part(a, static_cast<std::uint32_t>(k));
          const auto sb = ball_part(b, static_cast<std::uint32_t>(k));
          if (ef_dup(sa, sb, GameVariant::BackForthTemporal, k * q)) CHECK(ef_dup(sa, sb, GameVariant::EF, q));
        }
    }
}

TEST_CASE("invariance checks") {
  const auto c = corpus();
  CHECK(parse_invariance_notion("generated:2").kind == InvarianceKind::Generated);
  CHECK(parse_invariance_notion("ball:3").k == 3);
  CHECK(parse_invariance_notion("disjoint").kind == InvarianceKind::Disjoint);
  CHECK(to_string(parse_invariance_notion("generated:2")) == "generated:2");
  CHECK_THROWS_AS(parse_invariance_notion("generated"), Error);
  CHECK_THROWS_AS(parse_invariance_notion("local:1"), Error);

  std::mt19937 rng(5);
  for (int i = 0; i < 60; ++i) {
    const int k = 1 + i % 2;
    const Formula f = gen::fo(rng, bounded_shape(), k);
    INFO(to_string(f));
    CHECK(check_invariance(f, {InvarianceKind::Generated, k}, c).invariant());
    CHECK(check_invariance(f, {InvarianceKind::Generated, k + 1}, c).invariant());
    CHECK(check_invariance(f, {InvarianceKind::Disjoint, 0}, c).invariant());
  }

  const Formula some_p = parse_fo("exists y (P(y))");
  const auto report = check_invariance(some_p, {InvarianceKind::Generated, 2}, c);
  CHECK_FALSE(report.invariant());
  bool named = false;
  for (const auto& ce : report.counterexamples)
    if (ce.structure == "unreachable_p") {
      named = true;
      CHECK(ce.original);
      CHECK_FALSE(ce.transformed);
    }
  CHECK(named);
  const auto disjoint = check_invariance(parse_fo("forall y (!P(y))"), {InvarianceKind::Disjoint, 0}, c);
  CHECK_FALSE(disjoint.invariant());
  CHECK_FALSE(disjoint.counterexamples.front().partner.empty());
}

TEST_CASE("local agreement of relativized sentences") {
  const auto c = corpus();
  std::mt19937 rng(6);
  gen::FoShape shape = bounded_shape();
  shape.bounded = false;
  const auto sig = fx::unimodal_signature();
  for (int i = 0; i < 40; ++i) {
    const int k = 1 + i % 2;
    const Formula f = gen::fo(rng, shape, 2);
    INFO(to_string(f));
    CHECK(check_local_agreement(f, k, c).invariant());
    CHECK(check_invariance(gaifman_relativize(f, {}, k, sig), {InvarianceKind::Ball, k}, c).invariant());
  }
}

TEST_CASE("corpus-relative synthesis") {
  const auto c = corpus();
  const Formula f = parse_fo("exists y (E(c1,y) & !(y = c1) & P(y))");
  const Formula g = synthesize_bounded_equivalent(f, 1, c);
  for (const auto& e : c) CHECK(eval_fo(g, e.structure) == eval_fo(f, e.structure));

  const auto sig = fx::unimodal_signature();
  const Formula rel = gaifman_relativize(parse_fo("exists y (P(y))"), {}, 1, sig);
  std::vector<CorpusEntry> small(c.begin(), c.begin() + 10);
  const Formula h = synthesize_bounded_equivalent(rel, 1, small);
  for (const auto& e : small) CHECK(eval_fo(h, e.structure) == eval_fo(rel, e.structure));

  const std::vector<CorpusEntry> one{{"path3", fx::path3()}};
  const Formula single = synthesize_bounded_equivalent(parse_fo("P(c1) | !P(c1)"), 1, one);
  CHECK(equal(single, characteristic_formula(fx::path3(), 0)));

  CHECK_THROWS_AS(synthesize_bounded_equivalent(parse_fo("exists y (P(y))"), 2, c), Error);
}
