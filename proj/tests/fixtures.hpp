#pragma once

// Deterministic structure fixtures shared by the unit and acceptance suites.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "hc/structures.hpp"

namespace fx {

using hc::Signature;
using hc::Structure;

inline Signature unimodal_signature() {
  Signature s;
  s.relations = {{"E", 2}, {"P", 1}};
  s.transitions = {"E"};
  s.num_basepoints = 1;
  return s;
}

inline Signature bounded_signature(int m) {
  Signature s;
  s.relations = {{"E", 2}, {"F", 2}, {"P", 1}};
  s.transitions = {"E"};
  s.num_basepoints = m;
  return s;
}

inline std::vector<std::string> ids(int n) {
  static const char* names[] = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  return {names, names + n};
}

inline Structure make(const Signature& sig, int n, const std::vector<std::pair<int, int>>& edges,
                      const std::vector<int>& pred, const std::vector<int>& bp = {0},
                      const std::vector<std::pair<int, int>>& f_edges = {}) {
  std::map<std::string, std::set<hc::Tuple>> rel;
  for (const auto& [r, ar] : sig.relations) rel[r];
  for (auto [x, y] : edges) rel["E"].insert({x, y});
  for (auto [x, y] : f_edges) rel["F"].insert({x, y});
  for (int x : pred) rel["P"].insert({x});
  return Structure(sig, ids(n), rel, bp);
}

inline Structure loop() { return make(unimodal_signature(), 1, {{0, 0}}, {}); }
inline Structure c2() { return make(unimodal_signature(), 2, {{0, 1}, {1, 0}}, {}); }
inline Structure path3() { return make(unimodal_signature(), 3, {{0, 1}, {1, 2}}, {}); }
inline Structure star(int leaves) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return make(unimodal_signature(), leaves + 1, e, {});
}
inline Structure single() { return make(unimodal_signature(), 1, {}, {}); }
inline Structure back_edge() { return make(unimodal_signature(), 2, {{1, 0}}, {}); }
inline Structure path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make(unimodal_signature(), n, e, {n - 1});
}

inline Structure random_structure(std::mt19937& rng, const Signature& sig, int n, double p_edge,
                                  double p_pred) {
  std::bernoulli_distribution edge(p_edge), pred(p_pred);
  std::map<std::string, std::set<hc::Tuple>> rel;
  for (const auto& [r, ar] : sig.relations) {
    auto& ts = rel[r];
    if (ar == 1) {
      for (int x = 0; x < n; ++x)
        if (pred(rng)) ts.insert({x});
    } else if (ar == 2) {
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (edge(rng)) ts.insert({x, y});
    }
  }
  std::vector<int> bp;
  for (int i = 0; i < sig.num_basepoints; ++i) bp.push_back(i);
  return Structure(sig, ids(n), rel, bp);
}

/// 30 unimodal pointed structures of size <= 4 over {E:2, P:1}.
inline std::vector<Structure> unimodal_fixtures() {
  std::vector<Structure> out = {loop(), c2(), path3(), star(2), star(3), single(), back_edge()};
  std::mt19937 rng(20261017);
  std::uniform_int_distribution<int> size(1, 4);
  while (out.size() < 30) {
    const int n = size(rng);
    Structure s = random_structure(rng, unimodal_signature(), n, 0.3, 0.4);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

/// 30 two-pointed structures of size <= 4 over {E:2, F:2, P:1} with E the
/// only transition and distinct basepoints.
inline std::vector<Structure> bounded_fixtures() {
  std::vector<Structure> out;
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> size(2, 4);
  while (out.size() < 30) {
    const int n = size(rng);
    Structure s = random_structure(rng, bounded_signature(2), n, 0.25, 0.4);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

inline std::string label(const Structure& s) {
  std::string out = "{";
  for (const auto& [r, ts] : s.relations()) {
    out += r + ":";
    for (const auto& t : ts) {
      out += "(";
      for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + s.name(t[i]);
      out += ")";
    }
    out += " ";
  }
  out += "bp:";
  for (int b : s.basepoints()) out += s.name(b);
  return out + "}";
}

}  // namespace fx
