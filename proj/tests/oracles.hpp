#pragma once

// Brute-force reference procedures, written independently of the library
// algorithms they are compared against.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hc/structures.hpp"

namespace oracle {

using hc::Structure;
using Pairs = std::vector<std::pair<int, int>>;

constexpr int kInf = 1 << 20;

/// Floyd-Warshall over the Gaifman graph built straight from the tuples.
inline std::vector<std::vector<int>> distances(const Structure& s) {
  const int n = s.size();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (int x = 0; x < n; ++x) d[x][x] = 0;
  for (const auto& [r, ts] : s.relations())
    for (const auto& t : ts)
      for (int x : t)
        for (int y : t)
          if (x != y) d[x][y] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

/// Elements reachable from a basepoint in at most k directed transition steps.
inline std::set<std::string> reachable(const Structure& s, int k) {
  std::set<int> cur(s.basepoints().begin(), s.basepoints().end());
  for (int step = 0; step < k; ++step) {
    std::set<int> next = cur;
    for (const auto& e : s.signature().transitions)
      for (const auto& t : s.tuples(e))
        if (cur.count(t[0])) next.insert(t[1]);
    cur = next;
  }
  std::set<std::string> out;
  for (int x : cur) out.insert(s.name(x));
  return out;
}

inline bool any_transition(const Structure& s, int x, int y) {
  for (const auto& e : s.signature().transitions)
    if (s.tuples(e).count({x, y})) return true;
  return false;
}

enum class Rule { Any, Forward, Bidirectional, Chain };

/// Every sequence that starts with the basepoint prefixes and extends them
/// by elements admissible under `rule`, up to length k + m.
inline std::set<std::vector<std::string>> plays(const Structure& s, Rule rule, int k) {
  const auto& bp = s.basepoints();
  const int m = static_cast<int>(bp.size());
  std::set<std::vector<std::string>> out;
  std::vector<int> cur;
  auto name = [&](const std::vector<int>& p) {
    std::vector<std::string> v;
    for (int x : p) v.push_back(s.name(x));
    return v;
  };
  for (int i = 0; i < m; ++i) {
    cur.push_back(bp[i]);
    out.insert(name(cur));
  }
  std::function<void()> grow = [&]() {
    if (static_cast<int>(cur.size()) == k + m) return;
    for (int x = 0; x < s.size(); ++x) {
      bool ok = false;
      switch (rule) {
        case Rule::Any: ok = true; break;
        case Rule::Chain: ok = any_transition(s, cur.back(), x); break;
        case Rule::Forward:
          for (int y : cur) ok = ok || any_transition(s, y, x);
          break;
        case Rule::Bidirectional:
          for (int y : cur) ok = ok || any_transition(s, y, x) || any_transition(s, x, y);
          break;
      }
      if (!ok) continue;
      cur.push_back(x);
      out.insert(name(cur));
      grow();
      cur.pop_back();
    }
  };
  grow();
  return out;
}

/// All tuples over `dom` of the given arity.
inline void tuples_over(const std::vector<int>& dom, int arity, std::vector<int>& cur,
                        const std::function<void(const std::vector<int>&)>& f) {
  if (static_cast<int>(cur.size()) == arity) {
    f(cur);
    return;
  }
  for (std::size_t i = 0; i < dom.size(); ++i) {
    cur.push_back(static_cast<int>(i));
    tuples_over(dom, arity, cur, f);
    cur.pop_back();
  }
}

/// Checks the pairs as a map: functional, optionally injective, preserving
/// (and with `reflect`, reflecting) every relation on the domain.
inline bool pairs_ok(const Pairs& p, const Structure& a, const Structure& b, bool iso) {
  for (const auto& [x, y] : p)
    for (const auto& [u, v] : p) {
      if (x == u && y != v) return false;
      if (iso && y == v && x != u) return false;
    }
  std::vector<int> idx;
  for (std::size_t i = 0; i < p.size(); ++i) idx.push_back(static_cast<int>(i));
  for (const auto& [r, ar] : a.signature().relations) {
    bool good = true;
    std::vector<int> cur;
    tuples_over(idx, ar, cur, [&](const std::vector<int>& t) {
      hc::Tuple ta, tb;
      for (int i : t) {
        ta.push_back(p[i].first);
        tb.push_back(p[i].second);
      }
      const bool ha = a.holds(r, ta);
      const bool hb = b.holds(r, tb);
      if (ha && !hb) good = false;
      if (iso && hb && !ha) good = false;
    });
    if (!good) return false;
  }
  return true;
}

/// Plain minimax over full histories. `rule` restricts both players' moves
/// to elements accessible from the current side's history; `existential`
/// lets Spoiler move on the left only and checks homomorphism instead of
/// isomorphism.
inline bool duplicator_wins(const Structure& a, const Structure& b, Rule rule, bool existential, int k) {
  Pairs h;
  for (std::size_t i = 0; i < a.basepoints().size(); ++i) h.emplace_back(a.basepoints()[i], b.basepoints()[i]);
  auto accessible = [&](const Structure& s, bool left, int x) {
    if (rule == Rule::Any) return true;
    for (const auto& pr : h) {
      const int y = left ? pr.first : pr.second;
      if (any_transition(s, y, x)) return true;
      if (rule == Rule::Bidirectional && any_transition(s, x, y)) return true;
    }
    return false;
  };
  std::function<bool(int)> win = [&](int r) -> bool {
    if (!pairs_ok(h, a, b, !existential)) return false;
    if (r == 0) return true;
    for (int side = 0; side < (existential ? 1 : 2); ++side) {
      const Structure& s = side == 0 ? a : b;
      const Structure& o = side == 0 ? b : a;
      for (int x = 0; x < s.size(); ++x) {
        if (!accessible(s, side == 0, x)) continue;
        bool answered = false;
        for (int y = 0; y < o.size() && !answered; ++y) {
          if (!accessible(o, side != 0, y)) continue;
          h.push_back(side == 0 ? std::make_pair(x, y) : std::make_pair(y, x));
          answered = win(r - 1);
          h.pop_back();
        }
        if (!answered) return false;
      }
    }
    return true;
  };
  return win(k);
}

/// Bijection game by enumerating every bijection between the accessible sets.
inline bool bijection_duplicator_wins(const Structure& a, const Structure& b, int k) {
  Pairs h;
  for (std::size_t i = 0; i < a.basepoints().size(); ++i) h.emplace_back(a.basepoints()[i], b.basepoints()[i]);
  auto acc = [&](const Structure& s, bool left) {
    std::vector<int> out;
    for (int x = 0; x < s.size(); ++x)
      for (const auto& pr : h)
        if (any_transition(s, left ? pr.first : pr.second, x)) {
          out.push_back(x);
          break;
        }
    return out;
  };
  std::function<bool(int)> win = [&](int r) -> bool {
    if (!pairs_ok(h, a, b, true)) return false;
    if (r == 0) return true;
    const auto A = acc(a, true);
    auto B = acc(b, false);
    if (A.size() != B.size()) return false;
    if (A.empty()) return true;
    std::sort(B.begin(), B.end());
    do {
      bool all = true;
      for (std::size_t i = 0; i < A.size() && all; ++i) {
        h.emplace_back(A[i], B[i]);
        all = win(r - 1);
        h.pop_back();
      }
      if (all) return true;
    } while (std::next_permutation(B.begin(), B.end()));
    return false;
  };
  return win(k);
}

}  // namespace oracle
