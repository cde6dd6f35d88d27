#include "hc/structures.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace hc {

namespace {

constexpr std::size_t kDenseLimit = std::size_t{1} << 20;

std::size_t dense_index(const Tuple& t, int n) {
  std::size_t idx = 0;
  for (int e : t) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(e);
  return idx;
}

bool tabulable(int n, int arity) {
  std::size_t cells = 1;
  for (int i = 0; i < arity; ++i) {
    cells *= static_cast<std::size_t>(std::max(n, 1));
    if (cells > kDenseLimit) return false;
  }
  return true;
}

// Calls f on every tuple of length `arity` over `domain`.
template <typename F>
bool for_all_tuples(const std::vector<int>& domain, int arity, F&& f) {
  if (domain.empty()) return true;
  std::vector<std::size_t> pos(static_cast<std::size_t>(arity), 0);
  Tuple t(static_cast<std::size_t>(arity));
  while (true) {
    for (int i = 0; i < arity; ++i) t[i] = domain[pos[i]];
    if (!f(t)) return false;
    int i = arity - 1;
    while (i >= 0 && ++pos[i] == domain.size()) pos[i--] = 0;
    if (i < 0) return true;
  }
}

}  // namespace

std::string ExtNat::to_string() const {
  return infinite_ ? std::string("inf") : std::to_string(value_);
}

void Signature::validate(bool allow_identity) const {
  if (num_basepoints < 0) throw StructureError("signature: negative number of basepoints");
  for (const auto& [name, arity] : relations) {
    if (name.empty()) throw StructureError("signature: empty relation symbol");
    if (name == kIdentitySymbol && !allow_identity)
      throw StructureError("signature: relation symbol 'I' is reserved");
    if (arity < 1) throw StructureError("signature: relation '" + name + "' has arity < 1");
  }
  for (const auto& t : transitions) {
    auto it = relations.find(t);
    if (it == relations.end())
      throw StructureError("signature: transition '" + t + "' is not a relation");
    if (it->second != 2)
      throw StructureError("signature: transition '" + t + "' is not binary");
  }
}

bool Signature::is_unimodal() const {
  if (num_basepoints != 1 || transitions.size() != 1) return false;
  for (const auto& [name, arity] : relations)
    if (!transitions.count(name) && arity != 1) return false;
  return true;
}

const std::string& Signature::transition() const {
  if (transitions.size() != 1) throw SignatureMismatch("signature has no unique transition symbol");
  return *transitions.begin();
}

Structure::Structure(Signature sig, std::vector<std::string> universe,
                     std::map<std::string, std::set<Tuple>> relations,
                     std::vector<int> basepoints, bool allow_identity)
    : sig_(std::move(sig)),
      universe_(std::move(universe)),
      rel_(std::move(relations)),
      basepoints_(std::move(basepoints)) {
  sig_.validate(allow_identity);
  const int n = size();
  for (int i = 0; i < n; ++i) {
    if (universe_[i].empty()) throw StructureError("universe: empty element id");
    if (!ids_.emplace(universe_[i], i).second)
      throw StructureError("universe: duplicate element id '" + universe_[i] + "'");
  }
  for (const auto& [name, tuples] : rel_) {
    auto it = sig_.relations.find(name);
    if (it == sig_.relations.end())
      throw StructureError("relations: symbol '" + name + "' not in signature");
    for (const auto& t : tuples) {
      if (static_cast<int>(t.size()) != it->second)
        throw StructureError("relations: tuple of wrong arity in '" + name + "'");
      for (int e : t)
        if (e < 0 || e >= n)
          throw StructureError("relations: tuple element outside universe in '" + name + "'");
    }
  }
  for (const auto& [name, arity] : sig_.relations) rel_.try_emplace(name);
  if (static_cast<int>(basepoints_.size()) != sig_.num_basepoints)
    throw StructureError("basepoints: expected " + std::to_string(sig_.num_basepoints) +
                         " basepoints, got " + std::to_string(basepoints_.size()));
  for (int b : basepoints_)
    if (b < 0 || b >= n) throw StructureError("basepoints: element outside universe");
  build_index();
}

Structure Structure::from_names(
    Signature sig, std::vector<std::string> universe,
    const std::map<std::string, std::vector<std::vector<std::string>>>& relations,
    const std::vector<std::string>& basepoints) {
  std::map<std::string, int> ids;
  for (std::size_t i = 0; i < universe.size(); ++i) ids.emplace(universe[i], static_cast<int>(i));
  auto lookup = [&](const std::string& id, const std::string& where) {
    auto it = ids.find(id);
    if (it == ids.end())
      throw StructureError(where + ": element '" + id + "' not in universe");
    return it->second;
  };
  std::map<std::string, std::set<Tuple>> rel;
  for (const auto& [name, tuples] : relations) {
    auto& dst = rel[name];
    for (const auto& t : tuples) {
      Tuple idx;
      for (const auto& id : t) idx.push_back(lookup(id, "relations." + name));
      dst.insert(std::move(idx));
    }
  }
  std::vector<int> bp;
  for (const auto& id : basepoints) bp.push_back(lookup(id, "basepoints"));
  if (sig.num_basepoints != static_cast<int>(bp.size())) sig.num_basepoints = static_cast<int>(bp.size());
  return Structure(std::move(sig), std::move(universe), std::move(rel), std::move(bp));
}

void Structure::build_index() {
  const int n = size();
  for (const auto& [name, tuples] : rel_) {
    int arity = sig_.relations.at(name);
    if (!tabulable(n, arity)) continue;
    std::size_t cells = 1;
    for (int i = 0; i < arity; ++i) cells *= static_cast<std::size_t>(std::max(n, 1));
    std::vector<bool> table(cells, false);
    for (const auto& t : tuples) table[dense_index(t, n)] = true;
    dense_.emplace(name, std::move(table));
  }
}

std::optional<int> Structure::find(std::string_view id) const {
  auto it = ids_.find(id);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int Structure::index(std::string_view id) const {
  auto r = find(id);
  if (!r) throw StructureError("unknown element '" + std::string(id) + "'");
  return *r;
}

const std::set<Tuple>& Structure::tuples(const std::string& rel) const {
  auto it = rel_.find(rel);
  if (it == rel_.end()) throw SignatureMismatch("unknown relation symbol '" + rel + "'");
  return it->second;
}

bool Structure::holds(const std::string& rel, const Tuple& t) const {
  auto d = dense_.find(rel);
  if (d != dense_.end()) return d->second[dense_index(t, size())];
  return tuples(rel).count(t) > 0;
}

bool Structure::edge(const std::string& rel, int from, int to) const {
  return holds(rel, Tuple{from, to});
}

bool Structure::transition_edge(int from, int to) const {
  for (const auto& t : sig_.transitions)
    if (edge(t, from, to)) return true;
  return false;
}

std::vector<std::set<int>> gaifman_graph(const Structure& s) {
  std::vector<std::set<int>> adj(static_cast<std::size_t>(s.size()));
  for (const auto& [name, tuples] : s.relations())
    for (const auto& t : tuples)
      for (int x : t)
        for (int y : t)
          if (x != y) adj[x].insert(y);
  return adj;
}

DistanceMatrix gaifman_distance(const Structure& s) {
  const int n = s.size();
  const auto adj = gaifman_graph(s);
  DistanceMatrix d(n);
  for (int src = 0; src < n; ++src) {
    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    std::deque<int> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (int y : adj[x])
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          queue.push_back(y);
        }
    }
    for (int y = 0; y < n; ++y)
      if (dist[y] >= 0) d.set(src, y, ExtNat(static_cast<std::uint32_t>(dist[y])));
  }
  return d;
}

Structure disjoint_union(const Structure& a, const Structure& b) {
  if (!(a.signature().relations == b.signature().relations &&
        a.signature().transitions == b.signature().transitions))
    throw SignatureMismatch("disjoint_union: signatures differ");
  std::vector<std::string> universe;
  universe.reserve(static_cast<std::size_t>(a.size() + b.size()));
  for (const auto& id : a.universe()) universe.push_back("L:" + id);
  for (const auto& id : b.universe()) universe.push_back("R:" + id);
  std::map<std::string, std::set<Tuple>> rel;
  const int shift = a.size();
  for (const auto& [name, tuples] : a.relations()) rel[name] = tuples;
  for (const auto& [name, tuples] : b.relations())
    for (auto t : tuples) {
      for (int& e : t) e += shift;
      rel[name].insert(std::move(t));
    }
  return Structure(a.signature(), std::move(universe), std::move(rel), a.basepoints(),
                   a.signature().relations.count(std::string(kIdentitySymbol)) > 0);
}

Structure induced_substructure(const Structure& s, const std::set<int>& keep) {
  std::vector<int> new_index(static_cast<std::size_t>(s.size()), -1);
  std::vector<std::string> universe;
  for (int e = 0; e < s.size(); ++e)
    if (keep.count(e)) {
      new_index[e] = static_cast<int>(universe.size());
      universe.push_back(s.name(e));
    }
  std::map<std::string, std::set<Tuple>> rel;
  for (const auto& [name, tuples] : s.relations()) {
    auto& dst = rel[name];
    for (const auto& t : tuples) {
      Tuple u;
      bool inside = true;
      for (int e : t) {
        if (new_index[e] < 0) {
          inside = false;
          break;
        }
        u.push_back(new_index[e]);
      }
      if (inside) dst.insert(std::move(u));
    }
  }
  std::vector<int> bp;
  for (int b : s.basepoints()) {
    if (new_index[b] < 0) throw StructureError("induced_substructure: basepoint dropped");
    bp.push_back(new_index[b]);
  }
  return Structure(s.signature(), std::move(universe), std::move(rel), std::move(bp),
                   s.signature().relations.count(std::string(kIdentitySymbol)) > 0);
}

std::set<int> reachable_set(const Structure& s, ExtNat k) {
  const int n = s.size();
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::deque<int> queue;
  for (int b : s.basepoints())
    if (dist[b] < 0) {
      dist[b] = 0;
      queue.push_back(b);
    }
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    if (!k.is_infinite() && static_cast<std::uint32_t>(dist[x]) >= k.value()) continue;
    for (int y = 0; y < n; ++y)
      if (dist[y] < 0 && s.transition_edge(x, y)) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
  }
  std::set<int> out;
  for (int e = 0; e < n; ++e)
    if (dist[e] >= 0) out.insert(e);
  return out;
}

std::set<int> ball_set(const Structure& s, const DistanceMatrix& d, std::uint32_t k) {
  std::set<int> out;
  for (int e = 0; e < s.size(); ++e)
    for (int b : s.basepoints())
      if (d.at(b, e) <= ExtNat(k)) {
        out.insert(e);
        break;
      }
  return out;
}

Structure reachable_part(const Structure& s, ExtNat k) {
  return induced_substructure(s, reachable_set(s, k));
}

Structure ball_part(const Structure& s, std::uint32_t k) {
  return induced_substructure(s, ball_set(s, gaifman_distance(s), k));
}

bool is_homomorphism(const std::vector<int>& h, const Structure& a, const Structure& b) {
  if (static_cast<int>(h.size()) != a.size())
    throw StructureError("is_homomorphism: map is not total on the domain");
  for (int y : h)
    if (y < 0 || y >= b.size()) throw StructureError("is_homomorphism: image outside codomain");
  if (a.basepoints().size() != b.basepoints().size()) return false;
  for (std::size_t i = 0; i < a.basepoints().size(); ++i)
    if (h[a.basepoints()[i]] != b.basepoints()[i]) return false;
  for (const auto& [name, tuples] : a.relations()) {
    if (!b.signature().relations.count(name)) return false;
    for (const auto& t : tuples) {
      Tuple img;
      img.reserve(t.size());
      for (int e : t) img.push_back(h[e]);
      if (!b.holds(name, img)) return false;
    }
  }
  return true;
}

bool is_homomorphism(const std::map<std::string, std::string>& h, const Structure& a,
                     const Structure& b) {
  std::vector<int> idx(static_cast<std::size_t>(a.size()), -1);
  for (int e = 0; e < a.size(); ++e) {
    auto it = h.find(a.name(e));
    if (it == h.end())
      throw StructureError("is_homomorphism: no image for '" + a.name(e) + "'");
    auto y = b.find(it->second);
    if (!y) throw StructureError("is_homomorphism: image '" + it->second + "' outside codomain");
    idx[e] = *y;
  }
  return is_homomorphism(idx, a, b);
}

namespace {

// Deduplicated pair list if the pairs describe a function (and, when
// `injective`, an injection); nullopt otherwise.
std::optional<std::vector<std::pair<int, int>>> as_partial_map(
    const std::vector<std::pair<int, int>>& pairs, const Structure& a, const Structure& b,
    bool injective) {
  std::map<int, int> fwd, bwd;
  for (auto [x, y] : pairs) {
    if (x < 0 || x >= a.size() || y < 0 || y >= b.size()) return std::nullopt;
    auto [it, fresh] = fwd.emplace(x, y);
    if (!fresh && it->second != y) return std::nullopt;
    if (injective) {
      auto [jt, fresh2] = bwd.emplace(y, x);
      if (!fresh2 && jt->second != x) return std::nullopt;
    }
  }
  return std::vector<std::pair<int, int>>(fwd.begin(), fwd.end());
}

bool relations_match(const std::vector<std::pair<int, int>>& map, const Structure& a,
                     const Structure& b, bool reflect) {
  std::vector<int> domain;
  std::map<int, int> image;
  for (auto [x, y] : map) {
    domain.push_back(x);
    image[x] = y;
  }
  for (const auto& [name, arity] : a.signature().relations) {
    if (!b.signature().relations.count(name)) return false;
    bool ok = for_all_tuples(domain, arity, [&](const Tuple& t) {
      Tuple img;
      img.reserve(t.size());
      for (int e : t) img.push_back(image[e]);
      bool in_a = a.holds(name, t);
      bool in_b = b.holds(name, img);
      return reflect ? in_a == in_b : (!in_a || in_b);
    });
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool is_partial_isomorphism(const std::vector<std::pair<int, int>>& pairs, const Structure& a,
                            const Structure& b) {
  auto map = as_partial_map(pairs, a, b, true);
  return map && relations_match(*map, a, b, true);
}

bool is_partial_isomorphism(const std::vector<std::pair<std::string, std::string>>& pairs,
                            const Structure& a, const Structure& b) {
  std::vector<std::pair<int, int>> idx;
  for (const auto& [x, y] : pairs) {
    auto i = a.find(x);
    auto j = b.find(y);
    if (!i || !j) return false;
    idx.emplace_back(*i, *j);
  }
  return is_partial_isomorphism(idx, a, b);
}

bool is_partial_homomorphism(const std::vector<std::pair<int, int>>& pairs, const Structure& a,
                             const Structure& b) {
  auto map = as_partial_map(pairs, a, b, false);
  return map && relations_match(*map, a, b, false);
}

Structure relabel(const Structure& s, const std::map<std::string, std::string>& names) {
  std::vector<std::string> universe;
  std::set<std::string> seen;
  for (const auto& id : s.universe()) {
    auto it = names.find(id);
    if (it == names.end()) throw StructureError("relabel: no new name for '" + id + "'");
    if (!seen.insert(it->second).second) throw StructureError("relabel: names collide");
    universe.push_back(it->second);
  }
  return Structure(s.signature(), std::move(universe), s.relations(), s.basepoints(),
                   s.signature().relations.count(std::string(kIdentitySymbol)) > 0);
}

bool are_isomorphic(const Structure& a, const Structure& b) {
  if (a.size() != b.size() || a.signature() != b.signature()) return false;
  for (const auto& [name, tuples] : a.relations())
    if (tuples.size() != b.tuples(name).size()) return false;
  if (a.size() > 9) throw ResourceExceeded("are_isomorphic: structure too large for brute force");
  std::vector<int> perm(static_cast<std::size_t>(b.size()));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (is_homomorphism(perm, a, b)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace hc
