#include "hc/games.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <sstream>

#include "hc/comonads.hpp"

namespace hc {

std::string to_string(GameVariant v) {
  switch (v) {
    case GameVariant::ExistentialEF: return "existential-ef";
    case GameVariant::ExistentialHybrid: return "existential-hybrid";
    case GameVariant::ExistentialBounded: return "existential-bounded";
    case GameVariant::EF: return "ef";
    case GameVariant::BackForthHybrid: return "hybrid";
    case GameVariant::BackForthBounded: return "bounded";
    case GameVariant::BackForthTemporal: return "hybrid-temporal";
    case GameVariant::Bijection: return "bijection";
    case GameVariant::ComonadicGk: return "gk";
  }
  return "?";
}

std::string to_string(Player p) { return p == Player::Spoiler ? "spoiler" : "duplicator"; }

bool is_existential(GameVariant v) {
  return v == GameVariant::ExistentialEF || v == GameVariant::ExistentialHybrid ||
         v == GameVariant::ExistentialBounded;
}

namespace {

Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

const char* side_tag(Side s) { return s == Side::Left ? "L" : "R"; }

std::vector<int> side_elems(const History& h, Side s) {
  std::vector<int> out;
  for (const auto& [x, y] : h) out.push_back(s == Side::Left ? x : y);
  return out;
}

History extend(const History& h, Side side, int x, int y) {
  History out = h;
  out.emplace_back(side == Side::Left ? x : y, side == Side::Left ? y : x);
  return out;
}

History initial_history(const Structure& a, const Structure& b) {
  History h;
  for (std::size_t i = 0; i < a.basepoints().size(); ++i)
    h.emplace_back(a.basepoints()[i], b.basepoints()[i]);
  return h;
}

std::string tuple_text(const std::string& rel, const Tuple& t, const Structure& s) {
  std::string out = rel + "(";
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + s.name(t[i]);
  return out + ")";
}

// First violation of the winning condition on the pairs (positions in order),
// written to `why` when given.
bool violates(const History& h, const Structure& a, const Structure& b, bool hom_only,
              std::string* why) {
  const int n = static_cast<int>(h.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool ea = h[i].first == h[j].first;
      const bool eb = h[i].second == h[j].second;
      if (ea && !eb) {
        if (why)
          *why = "left element " + a.name(h[i].first) + " is paired with both " +
                 b.name(h[i].second) + " and " + b.name(h[j].second);
        return true;
      }
      if (!hom_only && eb && !ea) {
        if (why)
          *why = "right element " + b.name(h[i].second) + " is paired with both " +
                 a.name(h[i].first) + " and " + a.name(h[j].first);
        return true;
      }
    }
  for (const auto& [rel, arity] : a.signature().relations) {
    std::vector<int> idx(static_cast<std::size_t>(arity), 0);
    if (n == 0) break;
    while (true) {
      Tuple ta, tb;
      for (int p : idx) {
        ta.push_back(h[p].first);
        tb.push_back(h[p].second);
      }
      const bool ha = a.holds(rel, ta);
      const bool hb = b.holds(rel, tb);
      if (ha && !hb) {
        if (why)
          *why = tuple_text(rel, ta, a) + " holds on the left but " + tuple_text(rel, tb, b) +
                 " fails on the right";
        return true;
      }
      if (!hom_only && hb && !ha) {
        if (why)
          *why = tuple_text(rel, tb, b) + " holds on the right but " + tuple_text(rel, ta, a) +
                 " fails on the left";
        return true;
      }
      int p = arity - 1;
      while (p >= 0 && ++idx[p] == n) idx[p--] = 0;
      if (p < 0) break;
    }
  }
  return false;
}

bool accessible(const Structure& s, GameVariant v, const std::vector<int>& played, int x) {
  switch (v) {
    case GameVariant::ExistentialEF:
    case GameVariant::EF:
      return true;
    case GameVariant::ExistentialHybrid:
    case GameVariant::BackForthHybrid:
    case GameVariant::ComonadicGk: {
      const std::string& e = s.signature().transition();
      return std::any_of(played.begin(), played.end(), [&](int p) { return s.edge(e, p, x); });
    }
    case GameVariant::BackForthTemporal: {
      const std::string& e = s.signature().transition();
      return std::any_of(played.begin(), played.end(),
                         [&](int p) { return s.edge(e, p, x) || s.edge(e, x, p); });
    }
    case GameVariant::ExistentialBounded:
    case GameVariant::BackForthBounded:
    case GameVariant::Bijection:
      return std::any_of(played.begin(), played.end(), [&](int p) { return s.transition_edge(p, x); });
  }
  return false;
}

void validate(const Structure& a, const Structure& b, GameVariant v) {
  if (!(a.signature() == b.signature()))
    throw SignatureMismatch("games need both structures over the same signature");
  switch (v) {
    case GameVariant::ExistentialHybrid:
    case GameVariant::BackForthHybrid:
    case GameVariant::BackForthTemporal:
    case GameVariant::ComonadicGk:
      if (!a.signature().is_unimodal())
        throw SignatureMismatch(to_string(v) +
                                " game needs one basepoint, one transition and unary predicates");
      break;
    case GameVariant::Bijection:
      if (a.basepoints().empty()) throw SignatureMismatch("bijection game needs a basepoint");
      break;
    default:
      break;
  }
}

// ---------------------------------------------------------------------------
// Arenas: position check and legal moves per variant.

class Arena {
 public:
  virtual ~Arena() = default;
  virtual bool ok(const History& h) = 0;
  /// Legal elements for a move on `side` after history h.
  virtual std::vector<int> moves(Side side, const History& h) = 0;
  virtual std::vector<Side> spoiler_sides() const = 0;
  /// Memo key; positions with equal keys have equal game values.
  virtual History key(const History& h) const {
    History k = h;
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
  }
  virtual std::string explain(const History& h) = 0;
};

class RegularArena : public Arena {
 public:
  RegularArena(const Structure& a, const Structure& b, GameVariant v) : a_(a), b_(b), v_(v) {}

  bool ok(const History& h) override {
    auto k = key(h);
    if (auto it = ok_.find(k); it != ok_.end()) return it->second;
    const bool r = !violates(h, a_, b_, is_existential(v_), nullptr);
    ok_.emplace(std::move(k), r);
    return r;
  }
  std::vector<int> moves(Side side, const History& h) override {
    const Structure& s = side == Side::Left ? a_ : b_;
    const std::vector<int> played = side_elems(h, side);
    std::vector<int> out;
    for (int x = 0; x < s.size(); ++x)
      if (accessible(s, v_, played, x)) out.push_back(x);
    return out;
  }
  std::vector<Side> spoiler_sides() const override {
    if (is_existential(v_)) return {Side::Left};
    return {Side::Left, Side::Right};
  }
  std::string explain(const History& h) override {
    std::string why;
    violates(h, a_, b_, is_existential(v_), &why);
    return why;
  }

 private:
  const Structure& a_;
  const Structure& b_;
  GameVariant v_;
  std::map<History, bool> ok_;
};

// Positions are pairs of plays over the hybrid carriers; the winning set asks
// that pairing prefixes elementwise preserves and reflects every carrier
// relation, I included.
class GkArena : public Arena {
 public:
  GkArena(const Structure& a, const Structure& b, int k)
      : ca_(build_comonad(a, ComonadKind::Hybrid, std::max(k, 1), true)),
        cb_(build_comonad(b, ComonadKind::Hybrid, std::max(k, 1), true)) {}

  bool ok(const History& h) override { return check(h, nullptr); }

  std::vector<int> moves(Side side, const History& h) override {
    const ComonadStructure& c = side == Side::Left ? ca_ : cb_;
    auto p = c.find(side_elems(h, side));
    std::vector<int> out;
    if (!p) return out;
    for (int ch : c.children(*p)) out.push_back(c.play(ch).back());
    return out;
  }
  std::vector<Side> spoiler_sides() const override { return {Side::Left, Side::Right}; }
  History key(const History& h) const override { return h; }
  std::string explain(const History& h) override {
    std::string why;
    check(h, &why);
    return why;
  }

 private:
  bool check(const History& h, std::string* why) {
    if (auto it = ok_.find(h); it != ok_.end() && !why) return it->second;
    bool r = true;
    auto s = ca_.find(side_elems(h, Side::Left));
    auto t = cb_.find(side_elems(h, Side::Right));
    if (!s || !t) {
      if (why) *why = "position is not a pair of carrier plays";
      r = false;
    } else {
      const std::vector<int> cs = ca_.chain(*s);
      const std::vector<int> ct = cb_.chain(*t);
      const Structure& A = ca_.carrier();
      const Structure& B = cb_.carrier();
      const int n = static_cast<int>(cs.size());
      for (const auto& [rel, arity] : A.signature().relations) {
        std::vector<int> idx(static_cast<std::size_t>(arity), 0);
        while (r) {
          Tuple ta, tb;
          for (int p : idx) {
            ta.push_back(cs[p]);
            tb.push_back(ct[p]);
          }
          if (A.holds(rel, ta) != B.holds(rel, tb)) {
            r = false;
            if (why)
              *why = tuple_text(rel, ta, A) + (A.holds(rel, ta) ? " holds" : " fails") +
                     " on the left carrier but " + tuple_text(rel, tb, B) +
                     (B.holds(rel, tb) ? " holds" : " fails") + " on the right carrier";
          }
          int p = arity - 1;
          while (p >= 0 && ++idx[p] == n) idx[p--] = 0;
          if (p < 0) break;
        }
        if (!r) break;
      }
    }
    ok_[h] = r;
    return r;
  }

  ComonadStructure ca_;
  ComonadStructure cb_;
  std::map<History, bool> ok_;
};

std::unique_ptr<Arena> make_arena(const Structure& a, const Structure& b, GameVariant v, int k) {
  if (v == GameVariant::ComonadicGk) return std::make_unique<GkArena>(a, b, k);
  return std::make_unique<RegularArena>(a, b, v);
}

class Solver {
 public:
  explicit Solver(Arena& arena) : arena_(arena) {}

  bool duplicator_wins(const History& h, int r) {
    auto key = std::make_pair(arena_.key(h), r);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool res = arena_.ok(h);
    if (res && r > 0) {
      for (Side side : arena_.spoiler_sides()) {
        for (int x : arena_.moves(side, h)) {
          if (!reply(h, side, x, r)) {
            res = false;
            break;
          }
        }
        if (!res) break;
      }
    }
    memo_.emplace(std::move(key), res);
    return res;
  }

  /// Least winning reply for Duplicator, if any.
  std::optional<int> reply(const History& h, Side side, int x, int r) {
    for (int y : arena_.moves(other(side), h))
      if (duplicator_wins(extend(h, side, x, y), r - 1)) return y;
    return std::nullopt;
  }

  void extract_duplicator(GameResult& out, const History& h, int r) {
    if (r == 0) return;
    for (Side side : arena_.spoiler_sides())
      for (int x : arena_.moves(side, h)) {
        const int y = *reply(h, side, x, r);
        out.duplicator[{h, Move{side, x}}] = y;
        extract_duplicator(out, extend(h, side, x, y), r - 1);
      }
  }

  void extract_spoiler(GameResult& out, const History& h, int r) {
    if (!arena_.ok(h)) return;
    for (Side side : arena_.spoiler_sides())
      for (int x : arena_.moves(side, h)) {
        if (reply(h, side, x, r)) continue;
        out.spoiler[h] = Move{side, x};
        for (int y : arena_.moves(other(side), h)) extract_spoiler(out, extend(h, side, x, y), r - 1);
        return;
      }
  }

 private:
  Arena& arena_;
  std::map<std::pair<History, int>, bool> memo_;
};

GameResult run_solver(Arena& arena, const Structure& a, const Structure& b, GameVariant v, int k) {
  if (k < 0) throw Error("number of rounds must be non-negative");
  Solver solver(arena);
  const History h0 = initial_history(a, b);
  GameResult out;
  out.variant = v;
  out.k = k;
  if (solver.duplicator_wins(h0, k)) {
    out.winner = Player::Duplicator;
    solver.extract_duplicator(out, h0, k);
  } else {
    out.winner = Player::Spoiler;
    solver.extract_spoiler(out, h0, k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bijection game

std::vector<int> accessible_set(const Structure& s, const std::vector<int>& played) {
  std::vector<int> out;
  for (int x = 0; x < s.size(); ++x)
    if (accessible(s, GameVariant::Bijection, played, x)) out.push_back(x);
  return out;
}

// Kuhn's augmenting-path matching on good[i][j].
struct Matching {
  std::vector<int> left_to_right;
  std::vector<int> right_to_left;
  bool perfect = false;
};

bool augment(int i, const std::vector<std::vector<bool>>& good, std::vector<bool>& seen, Matching& m) {
  for (std::size_t j = 0; j < good[i].size(); ++j) {
    if (!good[i][j] || seen[j]) continue;
    seen[j] = true;
    if (m.right_to_left[j] < 0 || augment(m.right_to_left[j], good, seen, m)) {
      m.left_to_right[i] = static_cast<int>(j);
      m.right_to_left[j] = i;
      return true;
    }
  }
  return false;
}

Matching max_matching(const std::vector<std::vector<bool>>& good, std::size_t right) {
  Matching m;
  m.left_to_right.assign(good.size(), -1);
  m.right_to_left.assign(right, -1);
  std::size_t size = 0;
  for (std::size_t i = 0; i < good.size(); ++i) {
    std::vector<bool> seen(right, false);
    if (augment(static_cast<int>(i), good, seen, m)) ++size;
  }
  m.perfect = size == good.size() && size == right;
  return m;
}

// Left vertices reachable by alternating paths from an unmatched left vertex:
// a set whose neighbourhood is smaller than itself.
std::vector<int> hall_violator(const std::vector<std::vector<bool>>& good, const Matching& m) {
  const std::size_t n = good.size();
  std::vector<bool> in_s(n, false);
  std::vector<int> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (m.left_to_right[i] < 0) {
      in_s[i] = true;
      queue.push_back(static_cast<int>(i));
      break;
    }
  std::vector<bool> seen_r(m.right_to_left.size(), false);
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int i = queue[q];
    for (std::size_t j = 0; j < good[i].size(); ++j) {
      if (!good[i][j] || seen_r[j]) continue;
      seen_r[j] = true;
      const int i2 = m.right_to_left[j];
      if (i2 >= 0 && !in_s[i2]) {
        in_s[i2] = true;
        queue.push_back(i2);
      }
    }
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i)
    if (in_s[i]) out.push_back(static_cast<int>(i));
  return out;
}

class BijectionSolver {
 public:
  BijectionSolver(const Structure& a, const Structure& b, const GameOptions& opts)
      : a_(a), b_(b), opts_(opts) {}

  bool ok(const History& h) { return !violates(h, a_, b_, false, nullptr); }

  std::vector<int> acc(Side side, const History& h) {
    return accessible_set(side == Side::Left ? a_ : b_, side_elems(h, side));
  }

  std::vector<std::vector<bool>> good(const History& h, const std::vector<int>& A,
                                      const std::vector<int>& B, int r) {
    std::vector<std::vector<bool>> g(A.size(), std::vector<bool>(B.size(), false));
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < B.size(); ++j)
        g[i][j] = duplicator_wins(extend(h, Side::Left, A[i], B[j]), r - 1);
    return g;
  }

  bool duplicator_wins(const History& h, int r) {
    History k = h;
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    auto key = std::make_pair(std::move(k), r);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool res = ok(h);
    if (res && r > 0) {
      const auto A = acc(Side::Left, h);
      const auto B = acc(Side::Right, h);
      if (A.size() != B.size()) {
        res = false;
      } else if (!A.empty()) {
        if (A.size() > opts_.bijection_cap)
          throw ResourceExceeded("bijection game: accessible set of size " + std::to_string(A.size()) +
                                 " exceeds the cap of " + std::to_string(opts_.bijection_cap));
        res = max_matching(good(h, A, B, r), B.size()).perfect;
      }
    }
    memo_.emplace(std::move(key), res);
    return res;
  }

  void extract_duplicator(GameResult& out, const History& h, int r) {
    if (r == 0) return;
    const auto A = acc(Side::Left, h);
    const auto B = acc(Side::Right, h);
    if (A.empty()) return;
    const Matching m = max_matching(good(h, A, B, r), B.size());
    std::vector<std::pair<int, int>> f;
    for (std::size_t i = 0; i < A.size(); ++i) f.emplace_back(A[i], B[m.left_to_right[i]]);
    out.bijection[h] = f;
    for (const auto& [x, y] : f) extract_duplicator(out, extend(h, Side::Left, x, y), r - 1);
  }

  void extract_spoiler(GameResult& out, const History& h, int r) {
    if (!ok(h)) return;
    const auto A = acc(Side::Left, h);
    const auto B = acc(Side::Right, h);
    if (A.size() != B.size()) {
      out.hall[h] = {};
      return;
    }
    const auto g = good(h, A, B, r);
    const Matching m = max_matching(g, B.size());
    std::vector<int> s;
    for (int i : hall_violator(g, m)) s.push_back(A[i]);
    out.hall[h] = s;
    for (int x : s)
      for (int y : B) {
        const History next = extend(h, Side::Left, x, y);
        if (!duplicator_wins(next, r - 1)) extract_spoiler(out, next, r - 1);
      }
  }

 private:
  const Structure& a_;
  const Structure& b_;
  GameOptions opts_;
  std::map<std::pair<History, int>, bool> memo_;
};

// ---------------------------------------------------------------------------
// Verification

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

bool verify_duplicator(Arena& arena, const GameResult& res, const History& h, int r) {
  if (r == 0) return true;
  for (Side side : arena.spoiler_sides())
    for (int x : arena.moves(side, h)) {
      auto it = res.duplicator.find({h, Move{side, x}});
      if (it == res.duplicator.end())
        throw GameError("Duplicator strategy has no reply at a reachable position");
      const int y = it->second;
      if (!contains(arena.moves(other(side), h), y)) return false;
      const History next = extend(h, side, x, y);
      if (!arena.ok(next)) return false;
      if (!verify_duplicator(arena, res, next, r - 1)) return false;
    }
  return true;
}

bool verify_spoiler(Arena& arena, const GameResult& res, const History& h, int r) {
  if (!arena.ok(h)) return true;
  if (r == 0) return false;
  auto it = res.spoiler.find(h);
  if (it == res.spoiler.end()) throw GameError("Spoiler strategy has no move at a reachable position");
  const Move mv = it->second;
  const auto sides = arena.spoiler_sides();
  if (std::find(sides.begin(), sides.end(), mv.side) == sides.end()) return false;
  if (!contains(arena.moves(mv.side, h), mv.element)) return false;
  for (int y : arena.moves(other(mv.side), h))
    if (!verify_spoiler(arena, res, extend(h, mv.side, mv.element, y), r - 1)) return false;
  return true;
}

bool verify_bijection_duplicator(BijectionSolver& g, const GameResult& res, const History& h, int r) {
  if (r == 0) return true;
  const auto A = g.acc(Side::Left, h);
  const auto B = g.acc(Side::Right, h);
  if (A.size() != B.size()) return false;
  if (A.empty()) return true;
  auto it = res.bijection.find(h);
  if (it == res.bijection.end()) throw GameError("Duplicator has no bijection at a reachable position");
  const auto& f = it->second;
  std::vector<int> dom, ran;
  for (const auto& [x, y] : f) {
    dom.push_back(x);
    ran.push_back(y);
  }
  std::sort(dom.begin(), dom.end());
  std::sort(ran.begin(), ran.end());
  if (dom != A || ran != B || std::adjacent_find(ran.begin(), ran.end()) != ran.end()) return false;
  for (const auto& [x, y] : f) {
    const History next = extend(h, Side::Left, x, y);
    if (!g.ok(next)) return false;
    if (!verify_bijection_duplicator(g, res, next, r - 1)) return false;
  }
  return true;
}

bool verify_bijection_spoiler(BijectionSolver& g, const GameResult& res, const History& h, int r) {
  if (!g.ok(h)) return true;
  if (r == 0) return false;
  const auto A = g.acc(Side::Left, h);
  const auto B = g.acc(Side::Right, h);
  if (A.size() != B.size()) return true;
  if (A.empty()) return false;
  auto it = res.hall.find(h);
  if (it == res.hall.end()) throw GameError("Spoiler has no Hall set at a reachable position");
  const auto& s = it->second;
  if (s.empty()) return false;
  for (int x : s)
    if (!contains(A, x)) return false;
  // Right elements some member of S can be safely matched to.
  std::size_t neighbours = 0;
  for (int y : B) {
    bool safe = false;
    for (int x : s) {
      const History next = extend(h, Side::Left, x, y);
      const bool bad = !g.ok(next) || (res.hall.count(next) && verify_bijection_spoiler(g, res, next, r - 1));
      if (!bad) {
        safe = true;
        break;
      }
    }
    if (safe) ++neighbours;
  }
  return neighbours < s.size();
}

std::string names(const std::vector<int>& xs, const Structure& s) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + s.name(xs[i]);
  return out;
}

}  // namespace

GameResult solve(const Structure& a, const Structure& b, GameVariant variant, int k,
                 const GameOptions& opts) {
  if (variant == GameVariant::Bijection) return solve_bijection(a, b, k, opts);
  if (variant == GameVariant::ComonadicGk) return solve_Gk(a, b, k);
  validate(a, b, variant);
  RegularArena arena(a, b, variant);
  return run_solver(arena, a, b, variant, k);
}

GameResult solve_bijection(const Structure& a, const Structure& b, int k, const GameOptions& opts) {
  validate(a, b, GameVariant::Bijection);
  if (k < 0) throw Error("number of rounds must be non-negative");
  BijectionSolver g(a, b, opts);
  const History h0 = initial_history(a, b);
  GameResult out;
  out.variant = GameVariant::Bijection;
  out.k = k;
  if (g.duplicator_wins(h0, k)) {
    out.winner = Player::Duplicator;
    g.extract_duplicator(out, h0, k);
  } else {
    out.winner = Player::Spoiler;
    g.extract_spoiler(out, h0, k);
  }
  return out;
}

GameResult solve_Gk(const Structure& a, const Structure& b, int k) {
  validate(a, b, GameVariant::ComonadicGk);
  GkArena arena(a, b, k);
  return run_solver(arena, a, b, GameVariant::ComonadicGk, k);
}

namespace {

bool same_atomic(const Structure& a, const Structure& b, const std::vector<int>& x,
                 const std::vector<int>& y) {
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((x[i] == x[j]) != (y[i] == y[j])) return false;
  for (const auto& [rel, arity] : a.signature().relations) {
    if (n == 0) break;
    std::vector<int> idx(static_cast<std::size_t>(arity), 0);
    while (true) {
      Tuple tx, ty;
      for (int p : idx) {
        tx.push_back(x[p]);
        ty.push_back(y[p]);
      }
      if (a.holds(rel, tx) != b.holds(rel, ty)) return false;
      int p = arity - 1;
      while (p >= 0 && ++idx[p] == n) idx[p--] = 0;
      if (p < 0) break;
    }
  }
  return true;
}

class BackForth {
 public:
  BackForth(const Structure& a, const Structure& b) : a_(a), b_(b) {}

  bool related(const std::vector<int>& x, const std::vector<int>& y, int k) {
    auto key = std::make_tuple(x, y, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool r = same_atomic(a_, b_, x, y);
    if (r && k > 0) r = forth(a_, b_, x, y, k, false) && forth(b_, a_, y, x, k, true);
    memo_.emplace(std::move(key), r);
    return r;
  }

 private:
  // Every E-successor of a term on side s is matched by an E-successor of
  // the same term on side t.
  bool forth(const Structure& s, const Structure& t, const std::vector<int>& xs,
             const std::vector<int>& ys, int k, bool swapped) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (const auto& e : s.signature().transitions)
        for (int u = 0; u < s.size(); ++u) {
          if (!s.edge(e, xs[i], u)) continue;
          bool matched = false;
          for (int v = 0; v < t.size() && !matched; ++v) {
            if (!t.edge(e, ys[i], v)) continue;
            std::vector<int> x2 = xs, y2 = ys;
            x2.push_back(u);
            y2.push_back(v);
            matched = swapped ? related(y2, x2, k - 1) : related(x2, y2, k - 1);
          }
          if (!matched) return false;
        }
    return true;
  }

  const Structure& a_;
  const Structure& b_;
  std::map<std::tuple<std::vector<int>, std::vector<int>, int>, bool> memo_;
};

}  // namespace

bool back_and_forth_rank(const Structure& a, const Structure& b, int k) {
  if (!(a.signature() == b.signature()))
    throw SignatureMismatch("back-and-forth relations need the same signature");
  if (a.basepoints().empty()) throw SignatureMismatch("back-and-forth relations need a basepoint");
  if (k < 0) throw Error("rank must be non-negative");
  return BackForth(a, b).related(a.basepoints(), b.basepoints(), k);
}

bool verify_strategy(const GameResult& result, const Structure& a, const Structure& b,
                     GameVariant variant, int k, const GameOptions& opts) {
  if (result.variant != variant || result.k != k)
    throw GameError("strategy was computed for a different game");
  validate(a, b, variant);
  const History h0 = initial_history(a, b);
  if (variant == GameVariant::Bijection) {
    BijectionSolver g(a, b, opts);
    if (result.winner == Player::Duplicator)
      return g.ok(h0) && verify_bijection_duplicator(g, result, h0, k);
    return verify_bijection_spoiler(g, result, h0, k);
  }
  auto arena = make_arena(a, b, variant, k);
  if (result.winner == Player::Duplicator) return arena->ok(h0) && verify_duplicator(*arena, result, h0, k);
  return verify_spoiler(*arena, result, h0, k);
}

bool verify_strategy(const GameResult& result, const Structure& a, const Structure& b) {
  return verify_strategy(result, a, b, result.variant, result.k);
}

std::optional<std::string> explain_violation(const History& pairs, const Structure& a,
                                             const Structure& b, GameVariant variant) {
  if (variant == GameVariant::ComonadicGk) {
    GkArena arena(a, b, std::max<int>(1, static_cast<int>(pairs.size()) - 1));
    if (arena.ok(pairs)) return std::nullopt;
    return arena.explain(pairs);
  }
  std::string why;
  if (!violates(pairs, a, b, is_existential(variant), &why)) return std::nullopt;
  return why;
}

std::string trace(const GameResult& result, const Structure& a, const Structure& b) {
  std::ostringstream os;
  os << "game " << to_string(result.variant) << " k=" << result.k << '\n';
  History h = initial_history(a, b);
  const auto elems_l = side_elems(h, Side::Left);
  const auto elems_r = side_elems(h, Side::Right);

  std::unique_ptr<Arena> arena;
  std::unique_ptr<BijectionSolver> bij;
  std::function<bool(const History&)> ok;
  std::function<std::string(const History&)> why;
  if (result.variant == GameVariant::Bijection) {
    bij = std::make_unique<BijectionSolver>(a, b, GameOptions{});
    ok = [&](const History& x) { return bij->ok(x); };
    why = [&](const History& x) {
      std::string w;
      violates(x, a, b, false, &w);
      return w;
    };
  } else {
    arena = make_arena(a, b, result.variant, result.k);
    ok = [&](const History& x) { return arena->ok(x); };
    why = [&](const History& x) { return arena->explain(x); };
  }
  auto verdict = [&](const History& x) {
    return ok(x) ? std::string("check=ok") : "check=fail: " + why(x);
  };

  os << "round 0 start L=(" << names(elems_l, a) << ") R=(" << names(elems_r, b) << ") "
     << verdict(h) << '\n';
  bool alive = ok(h);
  for (int round = 1; alive && round <= result.k; ++round) {
    os << "round " << round << ' ';
    if (result.variant == GameVariant::Bijection) {
      const auto A = bij->acc(Side::Left, h);
      const auto B = bij->acc(Side::Right, h);
      if (A.size() != B.size()) {
        os << "cardinality clash left=" << A.size() << " right=" << B.size() << '\n';
        alive = false;
        break;
      }
      if (A.empty()) {
        os << "no accessible elements\n";
        break;
      }
      std::vector<std::pair<int, int>> f;
      int pick = -1;
      if (result.winner == Player::Duplicator) {
        f = result.bijection.at(h);
        pick = 0;
      } else {
        for (std::size_t i = 0; i < A.size(); ++i) f.emplace_back(A[i], B[i]);
        const auto& s = result.hall.at(h);
        for (std::size_t i = 0; i < f.size() && pick < 0; ++i) {
          if (!contains(s, f[i].first)) continue;
          const History next = extend(h, Side::Left, f[i].first, f[i].second);
          if (!ok(next) || result.hall.count(next)) pick = static_cast<int>(i);
        }
        if (pick < 0) pick = 0;
      }
      os << "duplicator {";
      for (std::size_t i = 0; i < f.size(); ++i)
        os << (i ? "," : "") << a.name(f[i].first) << "->" << b.name(f[i].second);
      os << "} spoiler L:" << a.name(f[pick].first) << " -> R:" << b.name(f[pick].second) << ' ';
      h = extend(h, Side::Left, f[pick].first, f[pick].second);
    } else {
      Move mv;
      bool found = false;
      if (result.winner == Player::Spoiler) {
        auto it = result.spoiler.find(h);
        if (it != result.spoiler.end()) {
          mv = it->second;
          found = true;
        }
      } else {
        for (Side side : arena->spoiler_sides()) {
          const auto xs = arena->moves(side, h);
          if (!xs.empty()) {
            mv = Move{side, xs.front()};
            found = true;
            break;
          }
        }
      }
      if (!found) {
        os << "spoiler has no move\n";
        break;
      }
      const Structure& ms = mv.side == Side::Left ? a : b;
      const Structure& rs = mv.side == Side::Left ? b : a;
      os << "spoiler " << side_tag(mv.side) << ':' << ms.name(mv.element) << ' ';
      std::optional<int> y;
      if (result.winner == Player::Duplicator) {
        y = result.duplicator.at({h, mv});
      } else {
        const auto ys = arena->moves(other(mv.side), h);
        for (int c : ys)
          if (ok(extend(h, mv.side, mv.element, c))) {
            y = c;
            break;
          }
        if (!y && !ys.empty()) y = ys.front();
      }
      if (!y) {
        os << "duplicator has no reply\n";
        alive = false;
        break;
      }
      os << "duplicator " << side_tag(other(mv.side)) << ':' << rs.name(*y) << ' ';
      h = extend(h, mv.side, mv.element, *y);
    }
    os << verdict(h) << '\n';
    alive = ok(h);
  }
  os << "winner " << to_string(result.winner) << '\n';
  return os.str();
}

}  // namespace hc
