#include "hc/comonads.hpp"

#include <algorithm>
#include <sstream>

namespace hc {

std::string to_string(ComonadKind k) {
  switch (k) {
    case ComonadKind::EF: return "ef";
    case ComonadKind::Modal: return "modal";
    case ComonadKind::Hybrid: return "hybrid";
    case ComonadKind::HybridTemporal: return "hybrid-temporal";
    case ComonadKind::Bounded: return "bounded";
  }
  return "?";
}

ComonadKind parse_comonad_kind(const std::string& name) {
  if (name == "ef") return ComonadKind::EF;
  if (name == "modal") return ComonadKind::Modal;
  if (name == "hybrid") return ComonadKind::Hybrid;
  if (name == "hybrid-temporal" || name == "temporal") return ComonadKind::HybridTemporal;
  if (name == "bounded") return ComonadKind::Bounded;
  throw Error("unknown comonad kind '" + name + "'");
}

bool is_prefix(const Play& s, const Play& t) {
  return s.size() <= t.size() && std::equal(s.begin(), s.end(), t.begin());
}

bool comparable(const Play& s, const Play& t) { return is_prefix(s, t) || is_prefix(t, s); }

std::optional<int> ComonadStructure::find(const Play& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ComonadStructure::index(const Play& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) {
    std::string name;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) name += '.';
      name += (p[i] >= 0 && p[i] < base_.size()) ? base_.name(p[i]) : "?";
    }
    throw Error("play '" + name + "' is not in the carrier");
  }
  return it->second;
}

std::vector<int> ComonadStructure::chain(int i) const {
  std::vector<int> out;
  for (int p = i; p >= 0; p = parent_[p]) out.push_back(p);
  std::reverse(out.begin(), out.end());
  return out;
}

std::string ComonadStructure::play_name(int i) const { return carrier_.name(i); }

std::string ComonadStructure::dump() const {
  std::ostringstream os;
  os << "comonad " << to_string(kind_) << " k=" << k_ << " with_I=" << (with_I_ ? 1 : 0)
     << " plays=" << plays_.size() << '\n';
  for (int i = 0; i < size(); ++i) os << carrier_.name(i) << '\n';
  for (const auto& [rel, tuples] : carrier_.relations()) {
    os << "relation " << rel << '/' << carrier_.signature().relations.at(rel)
       << " count=" << tuples.size() << '\n';
    for (const auto& t : tuples) {
      for (std::size_t j = 0; j < t.size(); ++j) os << (j ? " " : "") << carrier_.name(t[j]);
      os << '\n';
    }
  }
  return os.str();
}

namespace {

bool admissible(const Structure& s, ComonadKind kind, const Play& p, int b) {
  switch (kind) {
    case ComonadKind::EF:
      return true;
    case ComonadKind::Modal:
      return s.edge(s.signature().transition(), p.back(), b);
    case ComonadKind::Hybrid: {
      const std::string& e = s.signature().transition();
      return std::any_of(p.begin(), p.end(), [&](int a) { return s.edge(e, a, b); });
    }
    case ComonadKind::HybridTemporal: {
      const std::string& e = s.signature().transition();
      return std::any_of(p.begin(), p.end(), [&](int a) { return s.edge(e, a, b) || s.edge(e, b, a); });
    }
    case ComonadKind::Bounded:
      return std::any_of(p.begin(), p.end(), [&](int a) { return s.transition_edge(a, b); });
  }
  return false;
}

// Calls f on every tuple of `arity` positions in [0,n) that contains n-1.
template <typename F>
void tuples_with_last(int n, int arity, F&& f) {
  std::vector<int> idx(static_cast<std::size_t>(arity), 0);
  while (true) {
    if (std::find(idx.begin(), idx.end(), n - 1) != idx.end()) f(idx);
    int p = arity - 1;
    while (p >= 0 && ++idx[p] == n) idx[p--] = 0;
    if (p < 0) return;
  }
}

}  // namespace

ComonadStructure build_comonad(const Structure& base, ComonadKind kind, int k, bool with_I,
                               const ComonadOptions& opts) {
  if (k < 1) throw Error("comonad resource k must be at least 1");
  const Signature& sig = base.signature();
  const int m = static_cast<int>(base.basepoints().size());
  switch (kind) {
    case ComonadKind::Modal:
    case ComonadKind::Hybrid:
    case ComonadKind::HybridTemporal:
      if (!sig.is_unimodal())
        throw SignatureMismatch(to_string(kind) +
                                " comonad needs one basepoint, one transition and unary predicates");
      break;
    case ComonadKind::EF:
    case ComonadKind::Bounded:
      if (m < 1) throw SignatureMismatch(to_string(kind) + " comonad needs at least one basepoint");
      break;
  }

  ComonadStructure c;
  c.kind_ = kind;
  c.k_ = k;
  c.with_I_ = with_I;
  c.base_ = base;

  auto add = [&](Play p) {
    if (c.plays_.size() >= opts.max_plays)
      throw ResourceExceeded("comonad carrier exceeds " + std::to_string(opts.max_plays) + " plays");
    c.index_.emplace(p, static_cast<int>(c.plays_.size()));
    c.plays_.push_back(std::move(p));
  };
  const auto& bp = base.basepoints();
  for (int i = 1; i <= m; ++i) add(Play(bp.begin(), bp.begin() + i));
  std::size_t layer_begin = c.plays_.size() - 1;
  for (int len = m + 1; len <= m + k; ++len) {
    const std::size_t layer_end = c.plays_.size();
    for (std::size_t pi = layer_begin; pi < layer_end; ++pi) {
      for (int b = 0; b < base.size(); ++b) {
        if (!admissible(base, kind, c.plays_[pi], b)) continue;
        Play q = c.plays_[pi];
        q.push_back(b);
        add(std::move(q));
      }
    }
    layer_begin = layer_end;
  }

  const int n = c.size();
  c.parent_.assign(n, -1);
  c.children_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    const Play& p = c.plays_[i];
    if (p.size() > 1) {
      c.parent_[i] = c.index_.at(Play(p.begin(), p.end() - 1));
      c.children_[c.parent_[i]].push_back(i);
    }
  }

  Signature csig = sig;
  if (with_I) csig.relations.emplace(std::string(kIdentitySymbol), 2);
  std::map<std::string, std::set<Tuple>> rel;
  c.local_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    const std::vector<int> ch = c.chain(i);
    const int len = static_cast<int>(ch.size());
    for (const auto& [name, arity] : sig.relations) {
      if (kind == ComonadKind::Modal && sig.transitions.count(name)) {
        if (len >= 2 && base.edge(name, c.plays_[ch[len - 2]].back(), c.plays_[i].back())) {
          Tuple t{ch[len - 2], i};
          c.local_[i].push_back({name, t});
          rel[name].insert(t);
        }
        continue;
      }
      tuples_with_last(len, arity, [&](const std::vector<int>& idx) {
        Tuple last;
        for (int j : idx) last.push_back(c.plays_[ch[j]].back());
        if (!base.holds(name, last)) return;
        Tuple t;
        for (int j : idx) t.push_back(ch[j]);
        c.local_[i].push_back({name, t});
        rel[name].insert(std::move(t));
      });
    }
    if (with_I) {
      const std::string I(kIdentitySymbol);
      for (int j = 0; j < len; ++j) {
        if (c.plays_[ch[j]].back() != c.plays_[i].back()) continue;
        for (Tuple t : {Tuple{ch[j], i}, Tuple{i, ch[j]}}) {
          if (std::find_if(c.local_[i].begin(), c.local_[i].end(), [&](const CarrierTuple& x) {
                return x.rel == I && x.plays == t;
              }) != c.local_[i].end())
            continue;
          c.local_[i].push_back({I, t});
          rel[I].insert(t);
        }
      }
    }
  }

  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& p : c.plays_) {
    std::string id;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) id += '.';
      id += base.name(p[j]);
    }
    ids.push_back(std::move(id));
  }
  std::vector<int> cbp;
  for (int i = 0; i < m; ++i) cbp.push_back(i);
  csig.num_basepoints = m;
  c.carrier_ = Structure(std::move(csig), std::move(ids), std::move(rel), std::move(cbp), with_I);
  return c;
}

int counit(const ComonadStructure& c, const Play& s) {
  c.index(s);
  return s.back();
}

std::vector<Play> cokleisli_extension(const std::vector<int>& h, const ComonadStructure& from,
                                      const ComonadStructure& to) {
  if (static_cast<int>(h.size()) != from.size())
    throw Error("coKleisli map is not total on the carrier");
  for (int v : h)
    if (v < 0 || v >= to.base().size()) throw Error("coKleisli map leaves the target universe");
  std::vector<Play> out(static_cast<std::size_t>(from.size()));
  for (int i = 0; i < from.size(); ++i) {
    const int p = from.parent(i);
    if (p >= 0) out[i] = out[p];
    out[i].push_back(h[i]);
  }
  return out;
}

std::vector<Play> comultiplication(const ComonadStructure& c, const Play& s) {
  c.index(s);
  std::vector<Play> out;
  for (std::size_t len = 1; len <= s.size(); ++len) out.emplace_back(s.begin(), s.begin() + len);
  return out;
}

ComonadLawReport check_comonad_laws(const ComonadStructure& cA, const ComonadStructure& cB,
                                    const ComonadStructure& cC, const std::vector<int>& h,
                                    const std::vector<int>& g, const ExtensionFn& extension) {
  ComonadLawReport r;

  const std::vector<Play> hs = extension(h, cA, cB);
  r.counit_law = hs.size() == h.size();
  for (std::size_t i = 0; r.counit_law && i < hs.size(); ++i)
    r.counit_law = !hs[i].empty() && hs[i].back() == h[i];

  std::vector<int> eps(static_cast<std::size_t>(cA.size()));
  for (int i = 0; i < cA.size(); ++i) eps[i] = cA.play(i).back();
  const std::vector<Play> id = extension(eps, cA, cA);
  r.identity_law = static_cast<int>(id.size()) == cA.size();
  for (int i = 0; r.identity_law && i < cA.size(); ++i) r.identity_law = id[i] == cA.play(i);

  // g after h* needs h* to land in the carrier of B.
  std::vector<int> ghs(hs.size());
  bool lands = hs.size() == h.size();
  for (std::size_t i = 0; lands && i < hs.size(); ++i) {
    auto j = cB.find(hs[i]);
    if (!j) lands = false;
    else ghs[i] = g.at(*j);
  }
  if (lands) {
    const std::vector<Play> lhs = extension(ghs, cA, cC);
    const std::vector<Play> gs = extension(g, cB, cC);
    r.associativity_law = lhs.size() == hs.size();
    for (std::size_t i = 0; r.associativity_law && i < hs.size(); ++i)
      r.associativity_law = lhs[i] == gs.at(cB.index(hs[i]));
  }
  return r;
}

namespace {

bool local_ok(const ComonadStructure& ca, const Structure& b, int play,
              const std::vector<int>& image) {
  const std::string I(kIdentitySymbol);
  for (const auto& t : ca.local_tuples(play)) {
    if (t.rel == I) {
      if (image[t.plays[0]] != image[t.plays[1]]) return false;
      continue;
    }
    Tuple u;
    for (int p : t.plays) u.push_back(image[p]);
    if (!b.holds(t.rel, u)) return false;
  }
  return true;
}

class MorphismSearch {
 public:
  MorphismSearch(const ComonadStructure& ca, const Structure& b)
      : ca_(ca), b_(b), image_(static_cast<std::size_t>(ca.size()), -1) {}

  // Least image for `play` (given its ancestors' images) such that the whole
  // subtree below it can be mapped; records the witness when `record`.
  bool solve(int play, bool record) {
    const std::vector<int> ch = ca_.chain(play);
    std::vector<int> key;
    for (std::size_t j = 0; j + 1 < ch.size(); ++j) key.push_back(image_[ch[j]]);
    auto mk = std::make_pair(play, key);
    if (!record) {
      if (auto it = memo_.find(mk); it != memo_.end()) return it->second;
    }
    bool ok = false;
    const int m = static_cast<int>(ca_.base().basepoints().size());
    for (int v = 0; v < b_.size() && !ok; ++v) {
      if (play < m && v != b_.basepoints()[play]) continue;
      image_[play] = v;
      if (!local_ok(ca_, b_, play, image_)) continue;
      ok = true;
      for (int c : ca_.children(play))
        if (!solve(c, false)) {
          ok = false;
          break;
        }
      if (ok && record)
        for (int c : ca_.children(play)) solve(c, true);
    }
    if (!ok) image_[play] = -1;
    memo_[mk] = ok;
    return ok;
  }

  const std::vector<int>& image() const { return image_; }

 private:
  const ComonadStructure& ca_;
  const Structure& b_;
  std::vector<int> image_;
  std::map<std::pair<int, std::vector<int>>, bool> memo_;
};

}  // namespace

bool is_cokleisli_morphism(const std::vector<int>& h, const ComonadStructure& ca, const Structure& b) {
  if (static_cast<int>(h.size()) != ca.size()) return false;
  for (int v : h)
    if (v < 0 || v >= b.size()) return false;
  const int m = static_cast<int>(ca.base().basepoints().size());
  if (static_cast<int>(b.basepoints().size()) != m) return false;
  for (int i = 0; i < m; ++i)
    if (h[i] != b.basepoints()[i]) return false;
  for (int i = 0; i < ca.size(); ++i)
    if (!local_ok(ca, b, i, h)) return false;
  return true;
}

std::optional<CoKleisliWitness> find_cokleisli_morphism(const Structure& a, const Structure& b,
                                                        ComonadKind kind, int k,
                                                        const ComonadOptions& opts) {
  if (!(a.signature() == b.signature()))
    throw SignatureMismatch("coKleisli search needs structures over the same signature");
  auto ca = std::make_shared<const ComonadStructure>(build_comonad(a, kind, k, true, opts));
  MorphismSearch search(*ca, b);
  if (!search.solve(0, true)) return std::nullopt;
  return CoKleisliWitness{ca, search.image()};
}

}  // namespace hc
