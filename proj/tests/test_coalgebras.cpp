#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "hc/coalgebras.hpp"
#include "oracles.hpp"

using namespace hc;

namespace {

// Every generated cover by brute force over all parent maps, checked from
// scratch: chain of basepoints at the bottom, single tree above the last
// basepoint, adjacency comparability, generation from a strict ancestor.
std::set<std::vector<int>> brute_covers(const Structure& s, std::optional<int> k_bound) {
  const int n = s.size();
  const auto& bp = s.basepoints();
  const int m = static_cast<int>(bp.size());
  const auto d = oracle::distances(s);
  std::set<std::vector<int>> out;
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  auto ancestors = [&](int x) -> std::optional<std::vector<int>> {
    std::vector<int> chain{x};
    while (parent[chain.back()] != -1) {
      chain.push_back(parent[chain.back()]);
      if (static_cast<int>(chain.size()) > n) return std::nullopt;
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
  };
  for (;;) {
    bool ok = true;
    std::vector<std::vector<int>> br(static_cast<std::size_t>(n));
    for (int x = 0; x < n && ok; ++x) {
      auto c = ancestors(x);
      if (!c) ok = false;
      else br[x] = *c;
    }
    for (int i = 0; i < m && ok; ++i) ok = parent[bp[i]] == (i == 0 ? -1 : bp[i - 1]);
    auto leq = [&](int x, int y) { return std::find(br[y].begin(), br[y].end(), x) != br[y].end(); };
    int height = 0;
    for (int x = 0; x < n && ok; ++x) {
      height = std::max(height, static_cast<int>(br[x].size()));
      const bool is_bp = std::find(bp.begin(), bp.end(), x) != bp.end();
      if (!is_bp) {
        if (m == 0 ? false : !leq(bp[m - 1], x)) ok = false;
        bool seen = false;
        for (std::size_t i = 0; i + 1 < br[x].size(); ++i) seen = seen || oracle::any_transition(s, br[x][i], x);
        if (!seen) ok = false;
      }
      for (int y = 0; y < n && ok; ++y)
        if (d[x][y] == 1 && !leq(x, y) && !leq(y, x)) ok = false;
    }
    if (ok && k_bound && height - m > *k_bound) ok = false;
    if (ok) out.insert(parent);
    int p = 0;
    while (p < n && ++parent[p] == n) parent[p++] = -1;
    if (p == n) break;
  }
  return out;
}

TreeCover cover(const Structure& s, std::vector<int> parent) { return TreeCover{s, std::move(parent)}; }

Structure two_point(const std::vector<int>& pred) {
  return fx::make(fx::unimodal_signature(), 2, {{0, 1}}, pred);
}

}  // namespace

TEST_CASE("cover recognition") {
  const auto p = fx::path3();
  const TreeCover chain = cover(p, {-1, 0, 1});
  CHECK(is_generated_tree_cover(chain));
  CHECK(cover_height(chain) == 3);
  CHECK(is_generated_tree_cover(chain, 2));
  CHECK_FALSE(is_generated_tree_cover(chain, 1));
  CHECK_FALSE(is_generated_tree_cover(cover(p, {-1, 0, 0})));
  const TreeCover star = cover(fx::star(2), {-1, 0, 0});
  CHECK(is_generated_tree_cover(star));
  CHECK(cover_height(star) == 2);
  CHECK(branch(chain, 2) == std::vector<int>{0, 1, 2});
  CHECK(cover_leq(chain, 0, 2));
  CHECK_FALSE(cover_leq(star, 1, 2));
  CHECK_THROWS_AS(branch(cover(p, {-1, 2, 1}), 1), CoverError);
  CHECK_THROWS_AS(is_generated_tree_cover(cover(p, {-1, 2, 1})), CoverError);
  // c is seen from b only, so hanging it directly under a is not generated.
  CHECK_FALSE(is_generated_tree_cover(cover(fx::make(fx::unimodal_signature(), 3, {{0, 1}, {1, 2}, {0, 2}}, {}),
                                            {-1, 0, 0})));
}

TEST_CASE("cover enumeration matches brute force") {
  for (const auto& s : fx::unimodal_fixtures())
    for (std::optional<int> k : {std::optional<int>{}, std::optional<int>{1}, std::optional<int>{2}}) {
      std::set<std::vector<int>> got;
      for (const auto& t : enumerate_generated_covers(s, k)) {
        CHECK(is_generated_tree_cover(t, k));
        got.insert(t.parent);
      }
      CHECK(got == brute_covers(s, k));
    }
  for (const auto& s : fx::bounded_fixtures()) {
    std::set<std::vector<int>> got;
    for (const auto& t : enumerate_generated_covers(s, 2)) {
      got.insert(t.parent);
      CHECK(t.parent[s.basepoints()[0]] == -1);
      CHECK(t.parent[s.basepoints()[1]] == s.basepoints()[0]);
      CHECK(cover_height(t) - 2 <= 2);
    }
    CHECK(got == brute_covers(s, 2));
  }
  EnumerationOptions tiny;
  tiny.max_candidates = 3;
  CHECK_THROWS_AS(enumerate_generated_covers(fx::star(3), std::nullopt, tiny), ResourceExceeded);
}

TEST_CASE("covers and coalgebras correspond") {
  const auto chain = cover_to_coalgebra(cover(fx::path3(), {-1, 0, 1}), 2);
  CHECK(chain.alpha[2] == Play{0, 1, 2});
  CHECK(check_coalgebra_laws(chain).all());
  const auto star = cover_to_coalgebra(cover(fx::star(2), {-1, 0, 0}), 1);
  CHECK(star.alpha[1] == Play{0, 1});
  CHECK(star.alpha[2] == Play{0, 2});
  CHECK_THROWS_AS(cover_to_coalgebra(cover(fx::path3(), {-1, 0, 1}), 1), CoverError);

  for (const auto& s : fx::unimodal_fixtures())
    for (int k = 1; k <= 3; ++k) {
      const auto covers = enumerate_generated_covers(s, k);
      const auto coalgebras = enumerate_coalgebras(s, k, ComonadKind::Hybrid);
      CHECK(covers.size() == coalgebras.size());
      std::set<std::vector<Play>> from_covers;
      for (const auto& t : covers) {
        const auto c = cover_to_coalgebra(t, k);
        CHECK(check_coalgebra_laws(c).all());
        CHECK(coalgebra_to_cover(c).parent == t.parent);
        from_covers.insert(c.alpha);
        // The coalgebra is a cover morphism into the prefix order of the carrier.
        for (int x = 0; x < s.size(); ++x) {
          CHECK(c.alpha[x].back() == x);
          if (t.parent[x] >= 0) CHECK(c.alpha[t.parent[x]] == Play(c.alpha[x].begin(), c.alpha[x].end() - 1));
        }
      }
      std::set<std::vector<Play>> enumerated;
      for (const auto& c : coalgebras) enumerated.insert(c.alpha);
      CHECK(enumerated == from_covers);
    }
  for (const auto& s : fx::bounded_fixtures()) {
    const auto covers = enumerate_generated_covers(s, 1);
    CHECK(covers.size() == enumerate_coalgebras(s, 1, ComonadKind::Bounded).size());
    for (const auto& t : covers) {
      const auto c = cover_to_coalgebra(t, 1);
      CHECK(check_coalgebra_laws(c).all());
      CHECK(coalgebra_to_cover(c).parent == t.parent);
    }
  }
}

TEST_CASE("coalgebra law negative controls") {
  auto c = cover_to_coalgebra(cover(fx::path3(), {-1, 0, 1}), 2);
  c.alpha[2].pop_back();
  const auto r = check_coalgebra_laws(c);
  CHECK_FALSE(r.counit);
  CHECK_FALSE(r.all());
  CHECK_THROWS_AS(coalgebra_to_cover(c), CoverError);

  // b is never seen, so its play exists in the EF carrier only.
  const Structure unseen = fx::make(fx::unimodal_signature(), 2, {}, {1});
  Coalgebra bad{std::make_shared<const ComonadStructure>(build_comonad(unseen, ComonadKind::Hybrid, 1, false)),
                {Play{0}, Play{0, 1}}};
  const auto report = check_coalgebra_laws(bad);
  CHECK_FALSE(report.membership);
  CHECK(report.counit);
  Coalgebra ef{std::make_shared<const ComonadStructure>(build_comonad(unseen, ComonadKind::EF, 1, false)),
               {Play{0}, Play{0, 1}}};
  CHECK(check_coalgebra_laws(ef).homomorphism);
  CHECK(check_coalgebra_laws(ef).membership);
}

TEST_CASE("depth and coalgebra number") {
  CHECK(generated_tree_depth(fx::path3()).depth == ExtNat(3));
  CHECK(generated_tree_depth(fx::star(3)).depth == ExtNat(2));
  CHECK(generated_tree_depth(fx::single()).depth == ExtNat(1));
  const Structure isolated = fx::make(fx::unimodal_signature(), 2, {}, {1});
  CHECK(generated_tree_depth(isolated).depth.is_infinite());
  CHECK_FALSE(generated_tree_depth(isolated).witness.has_value());
  CHECK(coalgebra_number(isolated, ComonadKind::Hybrid).is_infinite());
  CHECK(coalgebra_number(fx::path3(), ComonadKind::Hybrid) == ExtNat(2));

  for (const auto& s : fx::unimodal_fixtures()) {
    const auto covers = brute_covers(s, std::nullopt);
    const auto d = generated_tree_depth(s);
    const auto n = coalgebra_number(s, ComonadKind::Hybrid);
    if (covers.empty()) {
      CHECK(d.depth.is_infinite());
      CHECK(n.is_infinite());
      continue;
    }
    int best = s.size() + 1;
    for (const auto& parent : covers) best = std::min(best, cover_height(cover(s, parent)));
    CHECK(d.depth == ExtNat(static_cast<std::uint32_t>(best)));
    REQUIRE(d.witness.has_value());
    CHECK(cover_height(*d.witness) == best);
    CHECK(n == ExtNat(static_cast<std::uint32_t>(std::max(1, best - 1))));
  }
}

TEST_CASE("prefix order on the carrier is a generated cover") {
  for (const auto& s : fx::unimodal_fixtures())
    for (int k = 1; k <= 2; ++k) {
      const auto c = build_comonad(s, ComonadKind::Hybrid, k, false);
      std::vector<int> parent;
      for (int i = 0; i < c.size(); ++i) parent.push_back(c.parent(i));
      const TreeCover t{c.carrier(), parent};
      CHECK(is_generated_tree_cover(t, k));
    }
}

TEST_CASE("open pathwise embeddings") {
  const TreeCover chain = cover(fx::path3(), {-1, 0, 1});
  CHECK(check_open_pathwise_embedding({0, 1, 2}, chain, chain));

  // Siblings b (with P) and c (without) both sent to the P-marked child.
  const Structure siblings = fx::make(fx::unimodal_signature(), 3, {{0, 1}, {0, 2}}, {1});
  const TreeCover t = cover(siblings, {-1, 0, 0});
  const TreeCover u = cover(two_point({1}), {-1, 0});
  CHECK_FALSE(check_open_pathwise_embedding({0, 1, 1}, t, u));

  // The two-element chain sits inside Path3, whose branch extends further.
  const TreeCover pruned = cover(two_point({}), {-1, 0});
  CHECK_FALSE(check_open_pathwise_embedding({0, 1}, pruned, chain));
  CHECK(check_open_pathwise_embedding({0, 1}, pruned, pruned));

  CHECK_THROWS_AS(check_open_pathwise_embedding({0, 2}, pruned, chain), Error);
  CHECK_THROWS_AS(check_open_pathwise_embedding({0, 1, 2}, chain, chain, 2), ResourceExceeded);
}
