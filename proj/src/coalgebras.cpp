#include "hc/coalgebras.hpp"

#include <algorithm>

namespace hc {

std::vector<int> branch(const TreeCover& t, int x) {
  const int n = t.base.size();
  std::vector<int> out;
  for (int y = x; y >= 0; y = t.parent.at(y)) {
    if (static_cast<int>(out.size()) > n) throw CoverError("cover parent map is cyclic");
    out.push_back(y);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool cover_leq(const TreeCover& t, int x, int y) {
  const auto b = branch(t, y);
  return std::find(b.begin(), b.end(), x) != b.end();
}

int cover_height(const TreeCover& t) {
  int h = 0;
  for (int x = 0; x < t.base.size(); ++x) h = std::max(h, static_cast<int>(branch(t, x).size()));
  return h;
}

namespace {

bool well_formed(const TreeCover& t) {
  const int n = t.base.size();
  if (static_cast<int>(t.parent.size()) != n) return false;
  for (int x = 0; x < n; ++x)
    if (t.parent[x] < -1 || t.parent[x] >= n || t.parent[x] == x) return false;
  return true;
}

bool is_basepoint(const Structure& s, int x) {
  const auto& bp = s.basepoints();
  return std::find(bp.begin(), bp.end(), x) != bp.end();
}

}  // namespace

bool is_generated_tree_cover(const TreeCover& t, std::optional<int> k_bound) {
  if (!well_formed(t)) return false;
  const Structure& s = t.base;
  const int n = s.size();
  std::vector<std::vector<int>> branches(n);
  for (int x = 0; x < n; ++x) branches[x] = branch(t, x);

  const auto& bp = s.basepoints();
  const int m = static_cast<int>(bp.size());
  std::vector<int> sorted_bp = bp;
  std::sort(sorted_bp.begin(), sorted_bp.end());
  if (std::adjacent_find(sorted_bp.begin(), sorted_bp.end()) != sorted_bp.end()) return false;
  if (m > 0) {
    if (t.parent[bp[0]] != -1) return false;
    for (int i = 1; i < m; ++i)
      if (t.parent[bp[i]] != bp[i - 1]) return false;
    for (int x = 0; x < n; ++x) {
      if (is_basepoint(s, x)) continue;
      if (std::find(branches[x].begin(), branches[x].end(), bp[m - 1]) == branches[x].end()) return false;
    }
  }

  const auto adj = gaifman_graph(s);
  for (int x = 0; x < n; ++x)
    for (int y : adj[x]) {
      const bool cmp = std::find(branches[y].begin(), branches[y].end(), x) != branches[y].end() ||
                       std::find(branches[x].begin(), branches[x].end(), y) != branches[x].end();
      if (!cmp) return false;
    }

  for (int x = 0; x < n; ++x) {
    if (is_basepoint(s, x) || t.parent[x] < 0) continue;
    bool seen = false;
    for (std::size_t i = 0; i + 1 < branches[x].size() && !seen; ++i)
      seen = s.transition_edge(branches[x][i], x);
    if (!seen) return false;
  }

  if (k_bound) {
    int h = 0;
    for (const auto& b : branches) h = std::max(h, static_cast<int>(b.size()));
    if (h - m > *k_bound) return false;
  }
  return true;
}

ComonadKind default_cover_kind(const Structure& s) {
  return s.signature().is_unimodal() ? ComonadKind::Hybrid : ComonadKind::Bounded;
}

Coalgebra cover_to_coalgebra(const TreeCover& t, int k, std::optional<ComonadKind> kind) {
  if (!is_generated_tree_cover(t, k))
    throw CoverError("not a generated tree cover of height at most k + m");
  const Structure& s = t.base;
  Coalgebra c;
  c.target = std::make_shared<const ComonadStructure>(
      build_comonad(s, kind.value_or(default_cover_kind(s)), k, false));
  const auto& bp = s.basepoints();
  const int m = static_cast<int>(bp.size());
  c.alpha.resize(static_cast<std::size_t>(s.size()));
  for (int x = 0; x < s.size(); ++x) {
    const auto b = branch(t, x);
    if (is_basepoint(s, x)) {
      c.alpha[x] = b;
      continue;
    }
    Play p(bp.begin(), bp.end());
    auto top = std::find(b.begin(), b.end(), bp[m - 1]);
    p.insert(p.end(), top + 1, b.end());
    c.alpha[x] = std::move(p);
  }
  return c;
}

CoalgebraLawReport check_coalgebra_laws(const Coalgebra& c) {
  CoalgebraLawReport r;
  const ComonadStructure& cs = *c.target;
  const Structure& s = cs.base();
  const int n = s.size();
  if (static_cast<int>(c.alpha.size()) != n) return r;

  std::vector<int> idx(static_cast<std::size_t>(n), -1);
  r.membership = true;
  for (int x = 0; x < n; ++x) {
    auto i = cs.find(c.alpha[x]);
    if (!i) r.membership = false;
    else idx[x] = *i;
  }

  r.counit = true;
  for (int x = 0; x < n; ++x)
    if (c.alpha[x].empty() || c.alpha[x].back() != x) r.counit = false;

  r.comultiplication = true;
  for (int x = 0; x < n && r.comultiplication; ++x)
    for (std::size_t len = 1; len <= c.alpha[x].size(); ++len) {
      const Play p(c.alpha[x].begin(), c.alpha[x].begin() + len);
      const int last = p.back();
      if (last < 0 || last >= n || c.alpha[last] != p) {
        r.comultiplication = false;
        break;
      }
    }

  if (r.membership) {
    r.homomorphism = true;
    for (const auto& [rel, tuples] : s.relations()) {
      for (const auto& t : tuples) {
        Tuple u;
        for (int e : t) u.push_back(idx[e]);
        if (!cs.carrier().holds(rel, u)) r.homomorphism = false;
      }
    }
  }

  r.basepoints = true;
  const auto& bp = s.basepoints();
  for (std::size_t i = 0; i < bp.size(); ++i)
    if (c.alpha[bp[i]] != Play(bp.begin(), bp.begin() + static_cast<long>(i) + 1)) r.basepoints = false;
  return r;
}

TreeCover coalgebra_to_cover(const Coalgebra& c) {
  if (!check_coalgebra_laws(c).all()) throw CoverError("coalgebra laws fail");
  const Structure& s = c.target->base();
  TreeCover t{s, std::vector<int>(static_cast<std::size_t>(s.size()), -1)};
  for (int x = 0; x < s.size(); ++x) {
    const Play& p = c.alpha[x];
    if (p.size() > 1) t.parent[x] = p[p.size() - 2];
  }
  return t;
}

std::vector<TreeCover> enumerate_generated_covers(const Structure& s, std::optional<int> k_bound,
                                                  const EnumerationOptions& opts) {
  const int n = s.size();
  const auto& bp = s.basepoints();
  std::vector<int> free;
  for (int x = 0; x < n; ++x)
    if (!is_basepoint(s, x)) free.push_back(x);
  std::vector<TreeCover> out;
  if (n == 0) return out;

  double total = 1;
  for (std::size_t i = 0; i < free.size(); ++i) total *= n;
  if (total > static_cast<double>(opts.max_candidates))
    throw ResourceExceeded("cover enumeration exceeds " + std::to_string(opts.max_candidates) + " candidates");

  std::vector<int> base_parent(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 1; i < bp.size(); ++i) base_parent[bp[i]] = bp[i - 1];
  // Choice -1 stands for "root" and is only meaningful without basepoints.
  const int lo = bp.empty() ? -1 : 0;
  std::vector<int> choice(free.size(), lo);
  while (true) {
    TreeCover t{s, base_parent};
    bool proper = true;
    for (std::size_t i = 0; i < free.size(); ++i) {
      if (choice[i] == free[i]) proper = false;
      t.parent[free[i]] = choice[i];
    }
    if (proper) {
      try {
        if (is_generated_tree_cover(t, k_bound)) out.push_back(std::move(t));
      } catch (const CoverError&) {
      }
    }
    int p = static_cast<int>(free.size()) - 1;
    while (p >= 0 && ++choice[p] == n) choice[p--] = lo;
    if (p < 0) break;
  }
  return out;
}

namespace {

class CoalgebraSearch {
 public:
  CoalgebraSearch(std::shared_ptr<const ComonadStructure> target, std::size_t limit,
                  std::size_t max_nodes)
      : target_(std::move(target)), limit_(limit), max_nodes_(max_nodes) {
    const Structure& s = target_->base();
    const int n = s.size();
    candidates_.assign(n, {});
    const auto& bp = s.basepoints();
    for (int i = 0; i < target_->size(); ++i) {
      const Play& p = target_->play(i);
      const int x = p.back();
      const auto pos = std::find(bp.begin(), bp.end(), x);
      if (pos != bp.end()) {
        if (p != Play(bp.begin(), pos + 1)) continue;
      }
      candidates_[x].push_back(i);
    }
    alpha_.assign(n, {});
  }

  std::vector<Coalgebra> run() {
    assign(0);
    return found_;
  }

 private:
  bool consistent(int x) const {
    const int n = static_cast<int>(alpha_.size());
    const Play& p = alpha_[x];
    for (std::size_t len = 1; len < p.size(); ++len) {
      const int y = p[len - 1];
      if (y < x && alpha_[y] != Play(p.begin(), p.begin() + len)) return false;
    }
    for (int y = 0; y < x && y < n; ++y) {
      const Play& q = alpha_[y];
      for (std::size_t len = 1; len < q.size(); ++len)
        if (q[len - 1] == x && p != Play(q.begin(), q.begin() + len)) return false;
    }
    return true;
  }

  void assign(int x) {
    if (found_.size() >= limit_) return;
    if (++nodes_ > max_nodes_) throw ResourceExceeded("coalgebra enumeration exceeds its node budget");
    if (x == static_cast<int>(alpha_.size())) {
      Coalgebra c{target_, alpha_};
      if (check_coalgebra_laws(c).all()) found_.push_back(std::move(c));
      return;
    }
    for (int i : candidates_[x]) {
      alpha_[x] = target_->play(i);
      if (consistent(x)) assign(x + 1);
      if (found_.size() >= limit_) return;
    }
    alpha_[x].clear();
  }

  std::shared_ptr<const ComonadStructure> target_;
  std::size_t limit_;
  std::size_t max_nodes_;
  std::size_t nodes_ = 0;
  std::vector<std::vector<int>> candidates_;
  std::vector<Play> alpha_;
  std::vector<Coalgebra> found_;
};

}  // namespace

std::vector<Coalgebra> enumerate_coalgebras(const Structure& s, int k, ComonadKind kind,
                                            const EnumerationOptions& opts) {
  auto target = std::make_shared<const ComonadStructure>(build_comonad(s, kind, k, false));
  return CoalgebraSearch(target, static_cast<std::size_t>(-1), opts.max_candidates).run();
}

DepthResult generated_tree_depth(const Structure& s) {
  DepthResult r;
  for (auto& t : enumerate_generated_covers(s)) {
    const int h = cover_height(t);
    if (r.depth.is_infinite() || static_cast<std::uint32_t>(h) < r.depth.value()) {
      r.depth = ExtNat(static_cast<std::uint32_t>(h));
      r.witness = std::move(t);
    }
  }
  return r;
}

ExtNat coalgebra_number(const Structure& s, ComonadKind kind) {
  const int top = std::max(1, s.size());
  for (int k = 1; k <= top; ++k) {
    auto target = std::make_shared<const ComonadStructure>(build_comonad(s, kind, k, false));
    if (!CoalgebraSearch(target, 1, EnumerationOptions{}.max_candidates).run().empty())
      return ExtNat(static_cast<std::uint32_t>(k));
  }
  return ExtNat::infinity();
}

bool check_open_pathwise_embedding(const std::vector<int>& f, const TreeCover& t, const TreeCover& u,
                                   int max_size) {
  const int nt = t.base.size();
  const int nu = u.base.size();
  if (nt > max_size || nu > max_size)
    throw ResourceExceeded("open-map check limited to covers of at most " + std::to_string(max_size) +
                           " elements");
  if (static_cast<int>(f.size()) != nt) throw Error("cover morphism is not total");
  if (!is_homomorphism(f, t.base, u.base))
    throw Error("cover morphism is not a basepoint-preserving homomorphism");
  for (int x = 0; x < nt; ++x) {
    const int p = t.parent.at(x);
    const int q = u.parent.at(f[x]);
    if (p < 0 ? q >= 0 : q != f[p]) throw Error("cover morphism does not preserve the covering relation");
  }

  for (int x = 0; x < nt; ++x) {
    std::vector<std::pair<int, int>> pairs;
    for (int y : branch(t, x)) pairs.emplace_back(y, f[y]);
    if (!is_partial_isomorphism(pairs, t.base, u.base)) return false;
  }

  for (int x = 0; x < nt; ++x)
    for (int y = 0; y < nu; ++y) {
      if (!cover_leq(u, f[x], y)) continue;
      bool lifted = false;
      for (int x2 = 0; x2 < nt && !lifted; ++x2) lifted = f[x2] == y && cover_leq(t, x, x2);
      if (!lifted) return false;
    }
  return true;
}

}  // namespace hc
