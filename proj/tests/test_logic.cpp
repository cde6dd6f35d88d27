#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "generators.hpp"
#include "hc/games.hpp"
#include "hc/logic.hpp"

using namespace hc;

namespace {

bool st_eval(const Hybrid& f, const Structure& s) {
  Assignment env;
  env.bind("x", s.basepoints()[0]);
  return eval_fo(standard_translation(f, "x"), s, env);
}

Formula acc_guarded(FoKind kind, int count, const Formula& body) {
  const std::vector<GuardAtom> acc{{"E", Term::constant_symbol(1), false}, {"E", Term::constant_symbol(2), false}};
  switch (kind) {
    case FoKind::BoundedExists: return fo::bounded_exists("y", acc, body);
    case FoKind::BoundedForall: return fo::bounded_forall("y", acc, body);
    default: return fo::count_exists(count, "y", acc, body);
  }
}

}  // namespace

TEST_CASE("hybrid parser") {
  const Hybrid f = parse_hybrid("down x. dia x");
  CHECK(equal(f, hy::down("x", hy::dia(hy::var("x")))));
  CHECK(to_string(f) == "down x. dia x");
  CHECK_THROWS_AS(parse_hybrid("dia x"), ScopeError);
  CHECK_NOTHROW(parse_hybrid("dia x", ParseOptions{false, std::nullopt}));
  CHECK_THROWS_AS(parse_hybrid("@c2 p", ParseOptions{true, 1}), Error);
  CHECK_NOTHROW(parse_hybrid("@c1 p", ParseOptions{true, 1}));
  try {
    parse_hybrid("p & & q");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
  CHECK(equal(parse_hybrid("box p | !q & r"),
              hy::disj(hy::box(hy::atom("p")), hy::conj(hy::neg(hy::atom("q")), hy::atom("r")))));
  CHECK(equal(parse_hybrid("@c1 diainv boxinv p"), hy::at_nominal(1, hy::diainv(hy::boxinv(hy::atom("p"))))));
  CHECK(predicate_for_atom("p1") == "P1");
}

TEST_CASE("first-order parser") {
  const Formula f = parse_fo("exists y (E(c1,y) & P(y))");
  REQUIRE(f->kind == FoKind::BoundedExists);
  CHECK(f->var == "y");
  CHECK(f->guard == std::vector<GuardAtom>{{"E", Term::constant_symbol(1), false}});
  CHECK(equal(f->left, fo::atom("P", {Term::variable("y")})));
  CHECK(parse_fo("exists y (P(y))")->kind == FoKind::Exists);
  CHECK(parse_fo("forall y (E(y,c1) -> P(y))")->guard.front().backward);
  CHECK(parse_fo("exists>=3 y (E(c1,y) & P(y))")->count == 3);
  CHECK_THROWS_AS(parse_fo("exists>=2 y (P(y))"), ParseError);
  CHECK_THROWS_AS(parse_fo("P(y)"), ScopeError);
  CHECK_THROWS_AS(parse_fo("E(c1,"), ParseError);
  CHECK(quantifier_rank(parse_fo("E(c1,c1)")) == 0);
  CHECK(quantifier_rank(f) == 1);
  CHECK(quantifier_rank(parse_fo("exists y (E(c1,y) & forall z (E(y,z) -> P(z)))")) == 2);
}

TEST_CASE("printers round-trip") {
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    const Hybrid f = gen::hybrid(rng, 1 + i % 3, i % 2 == 0);
    CHECK(equal(parse_hybrid(to_string(f)), f));
  }
  gen::FoShape bounded{{"E", "F"}, {"P"}, {"E"}, 2, true, true};
  gen::FoShape free{{"E", "F"}, {"P"}, {"E"}, 2, false, false};
  for (int i = 0; i < 300; ++i) {
    const Formula f = gen::fo(rng, i % 2 ? bounded : free, 1 + i % 3);
    CHECK_MESSAGE(equal(parse_fo(to_string(f)), f), to_string(f));
  }
  CHECK(to_string(parse_fo("exists y (E(c1,y) & P(y))")) == "exists y (E(c1,y) & P(y))");
  CHECK(to_string(parse_fo("exists>=2 y (E(c1,y) & true)")) == "exists>=2 y (E(c1,y) & true)");
}

TEST_CASE("hybrid depth") {
  CHECK(hybrid_depth(hy::dia(hy::atom("p"))) == 1);
  CHECK(hybrid_depth(hy::dia(hy::var("x"))) == 0);
  CHECK(hybrid_depth(parse_hybrid("down x. dia (p & dia x)")) == 1);
  CHECK(hybrid_depth(parse_hybrid("box box diainv p")) == 3);
  CHECK(hybrid_depth(parse_hybrid("down x. diainv x")) == 0);
}

TEST_CASE("standard translation clauses") {
  CHECK(to_string(standard_translation(parse_hybrid("dia p"), "x")) == "exists y (E(x,y) & P(y))");
  CHECK(to_string(standard_translation(parse_hybrid("p"), "x")) == "P(x)");
  CHECK(to_string(standard_translation(parse_hybrid("down z. dia z"), "x")) == "exists y (E(x,y) & y = x)");
  CHECK(to_string(standard_translation(parse_hybrid("diainv p"), "x")) == "exists y (E(y,x) & P(y))");
  CHECK(to_string(standard_translation(parse_hybrid("@c1 p"), "x")) == "P(c1)");
}

TEST_CASE("evaluation examples") {
  CHECK(eval_fo(parse_fo("E(c1,c1)"), fx::loop()));
  Assignment env;
  env.bind("x", 0);
  CHECK(eval_fo(parse_fo("x = x", ParseOptions{false, std::nullopt}), fx::path3(), env));
  const Formula two = parse_fo("exists>=2 y (E(c1,y) & true)");
  CHECK(eval_fo(two, fx::star(3)));
  CHECK_FALSE(eval_fo(two, fx::star(1)));
  CHECK_THROWS_AS(eval_fo(parse_fo("x = x", ParseOptions{false, std::nullopt}), fx::loop()), ScopeError);
  CHECK_THROWS_AS(eval_fo(parse_fo("E(c2,c2)"), fx::loop()), ScopeError);
  CHECK(eval_hybrid(parse_hybrid("down x. dia x"), fx::loop()));
  CHECK_FALSE(eval_hybrid(parse_hybrid("down x. dia x"), fx::c2()));
  CHECK(eval_hybrid(parse_hybrid("p | !p"), fx::c2()));
  CHECK(eval_hybrid(parse_hybrid("down x. dia dia x"), fx::c2()));
  CHECK(eval_hybrid(parse_hybrid("diainv true"), fx::back_edge()));
  CHECK_FALSE(eval_hybrid(parse_hybrid("dia true"), fx::back_edge()));
  CHECK(eval_hybrid(parse_hybrid("diainv true"), fx::c2()));
}

TEST_CASE("exact counts") {
  for (const auto& s : fx::unimodal_fixtures())
    for (int i = 1; i <= 4; ++i) {
      const std::vector<GuardAtom> g{{"E", Term::constant_symbol(1), false}};
      const Formula body = fo::atom("P", {Term::variable("y")});
      const bool exact = eval_fo(fo::exactly(i, "y", g, body), s);
      const bool split = eval_fo(fo::count_exists(i, "y", g, body), s) && !eval_fo(fo::count_exists(i + 1, "y", g, body), s);
      CHECK(exact == split);
      int count = 0;
      for (int y = 0; y < s.size(); ++y) count += s.holds("E", {s.basepoints()[0], y}) && s.holds("P", {y});
      CHECK(exact == (count == i));
    }
}

TEST_CASE("hybrid evaluation commutes with the standard translation") {
  std::mt19937 rng(5);
  const auto fixtures = fx::unimodal_fixtures();
  for (int i = 0; i < 400; ++i) {
    const Hybrid f = gen::hybrid(rng, 1 + i % 3, i % 2 == 0);
    const Formula t = standard_translation(f, "x");
    CHECK(is_bounded(t, fx::unimodal_signature(), true));
    if (!(i % 2)) {
      // Formulas without backward modalities land in the forward fragment.
      bool backward = to_string(f).find("inv") != std::string::npos;
      CHECK(is_bounded(t, fx::unimodal_signature(), false) == !backward);
    }
    CHECK(quantifier_rank(t) >= hybrid_depth(f));
    for (const auto& s : fixtures) CHECK_MESSAGE(eval_hybrid(f, s) == st_eval(f, s), to_string(f));
  }
}

TEST_CASE("bounded fragment recognizer") {
  const Signature sig = fx::bounded_signature(2);
  CHECK_FALSE(is_bounded(parse_fo("exists y (P(y))"), sig));
  CHECK_FALSE(is_bounded(parse_fo("exists y (F(c1,y) & P(y))"), sig));
  CHECK(is_bounded(parse_fo("exists y (E(c1,y) & P(y))"), sig));
  CHECK_FALSE(is_bounded(parse_fo("exists y (E(y,c1) & P(y))"), sig));
  CHECK(is_bounded(parse_fo("exists y (E(y,c1) & P(y))"), sig, true));
  CHECK(is_bounded(parse_fo("E(c1,c2) & !c1 = c2"), sig));
}

TEST_CASE("characteristic formulas") {
  const auto fixtures = fx::unimodal_fixtures();
  for (const auto& s : fixtures)
    for (int k = 0; k <= 2; ++k) {
      const Formula chi = characteristic_formula(s, k);
      CHECK(eval_fo(chi, s));
      CHECK(quantifier_rank(chi) <= k);
      CHECK(is_bounded(chi, s.signature()));
    }
  CHECK_FALSE(eval_fo(characteristic_formula(fx::loop(), 0), fx::c2()));
  CHECK(eval_fo(characteristic_formula(fx::star(2), 1), fx::star(3)));
  CHECK(eval_fo(characteristic_formula(fx::star(3), 1), fx::star(2)));
  const Formula temporal = characteristic_formula(fx::back_edge(), 1, CharacteristicOptions{true});
  CHECK(is_bounded(temporal, fx::unimodal_signature(), true));
  CHECK_FALSE(eval_fo(temporal, fx::single()));
  CHECK(eval_fo(characteristic_formula(fx::back_edge(), 1), fx::single()));
  for (const auto& s : fx::bounded_fixtures()) CHECK(eval_fo(characteristic_formula(s, 2), s));
}

TEST_CASE("characteristic formulas agree with the bounded game") {
  const auto fixtures = fx::unimodal_fixtures();
  for (std::size_t i = 0; i < fixtures.size(); i += 2)
    for (std::size_t j = 0; j < fixtures.size(); ++j)
      for (int k = 0; k <= 2; ++k) {
        const bool game = solve(fixtures[i], fixtures[j], GameVariant::BackForthBounded, k).winner == Player::Duplicator;
        CHECK(eval_fo(characteristic_formula(fixtures[i], k), fixtures[j]) == game);
      }
}

TEST_CASE("scott types") {
  CHECK(scott_type(fx::path3(), 2) == scott_type(relabel(fx::path3(), {{"a", "u"}, {"b", "v"}, {"c", "w"}}), 2));
  CHECK_FALSE(scott_type(fx::loop(), 1) == scott_type(fx::c2(), 1));
  CHECK_FALSE(scott_type(fx::star(2), 1) == scott_type(fx::star(3), 1));
  CHECK(scott_type(fx::star(2), 1).children.size() == 1);
  CHECK(scott_type(fx::star(2), 1).counts == std::vector<int>{2});
  CHECK(scott_type(fx::single(), 1).stuck);
  const auto fixtures = fx::unimodal_fixtures();
  for (const auto& s : fixtures)
    for (int k = 0; k <= 2; ++k) {
      const ScottType t = scott_type(s, k);
      const Formula f = scott_formula(t, s.signature());
      CHECK(eval_fo(f, s));
      for (const auto& u : fixtures) CHECK(eval_fo(f, u) == (scott_type(u, k) == t));
    }
}

TEST_CASE("guard normalization preserves meaning and rank") {
  const auto fixtures = fx::bounded_fixtures();
  std::mt19937 rng(3);
  gen::FoShape shape{{"E", "F"}, {"P"}, {"E"}, 2, true, false};
  for (int i = 0; i < 60; ++i) {
    const Formula body = gen::fo(rng, shape, i % 2);
    for (FoKind kind : {FoKind::BoundedExists, FoKind::BoundedForall, FoKind::CountExists})
      for (int c = 1; c <= 3; ++c) {
        const Formula f = acc_guarded(kind, c, body);
        const Formula n = normalize_guards(f);
        CHECK(quantifier_rank(n) == quantifier_rank(f));
        CHECK(is_bounded(n, fixtures[0].signature()));
        for (const auto& s : fixtures) CHECK(eval_fo(n, s) == eval_fo(f, s));
        if (kind != FoKind::CountExists) break;
      }
  }
}

TEST_CASE("gaifman relativization") {
  const Signature sig = fx::unimodal_signature();
  const Formula qf = parse_fo("E(c1,c1) & !P(c1)");
  CHECK(equal(gaifman_relativize(qf, {}, 2, sig), qf));
  const Formula f = parse_fo("exists y (P(y))");
  const Formula r = gaifman_relativize(f, {}, 2, sig);
  CHECK(r->kind == FoKind::Exists);
  CHECK(quantifier_rank(r) > quantifier_rank(f));
  const Structure p6 = fx::path(6);
  for (int k = 0; k <= 6; ++k) CHECK(eval_fo(gaifman_relativize(f, {}, k, sig), p6) == eval_fo(f, ball_part(p6, k)));
  std::mt19937 rng(9);
  gen::FoShape shape{{"E"}, {"P"}, {"E"}, 1, false, false};
  for (int i = 0; i < 40; ++i) {
    const Formula g = gen::fo(rng, shape, 2);
    for (const auto& s : fx::unimodal_fixtures())
      for (int k = 0; k <= 2; ++k)
        CHECK(eval_fo(gaifman_relativize(g, {}, k, sig), s) == eval_fo(g, ball_part(s, k)));
  }
  Assignment env;
  env.bind("y", 2);
  const Formula d = distance_at_most({Term::constant_symbol(1)}, "y", 2, sig);
  CHECK(eval_fo(d, fx::path3(), env));
  CHECK_FALSE(eval_fo(distance_at_most({Term::constant_symbol(1)}, "y", 1, sig), fx::path3(), env));
}
