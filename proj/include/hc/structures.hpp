#pragma once

// Finite relational structures with basepoints, their Gaifman geometry, and
// the two idempotent substructure constructions (reachable part, ball part).

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid structure data (loader and constructor invariants).
class StructureError : public Error {
 public:
  using Error::Error;
};

class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

/// A configurable size guard was tripped.
class ResourceExceeded : public Error {
 public:
  using Error::Error;
};

/// Reserved binary symbol for the equality-tracking relation on comonad carriers.
inline constexpr std::string_view kIdentitySymbol = "I";

using Tuple = std::vector<int>;

struct Signature {
  std::map<std::string, int> relations;
  std::set<std::string> transitions;
  int num_basepoints = 1;

  /// Throws StructureError on the first violated invariant. The reserved
  /// symbol I is accepted only when `allow_identity` (comonad carriers).
  void validate(bool allow_identity = false) const;

  /// Single transition symbol, every other symbol unary, exactly one basepoint.
  bool is_unimodal() const;
  /// The unique transition symbol of a unimodal signature.
  const std::string& transition() const;

  bool operator==(const Signature&) const = default;
};

/// Extended natural number; arithmetic saturates at infinity.
class ExtNat {
 public:
  constexpr ExtNat() = default;
  constexpr ExtNat(std::uint32_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  static constexpr ExtNat infinity() {
    ExtNat e;
    e.infinite_ = true;
    return e;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr std::uint32_t value() const { return value_; }

  friend constexpr ExtNat operator+(ExtNat a, ExtNat b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtNat(a.value_ + b.value_);
  }
  friend constexpr bool operator==(ExtNat a, ExtNat b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr std::strong_ordering operator<=>(ExtNat a, ExtNat b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
  }

  std::string to_string() const;

 private:
  std::uint32_t value_ = 0;
  bool infinite_ = false;
};

/// Finite sigma-structure with an ordered universe of opaque string ids.
///
/// Elements are addressed by their position in the universe. Each relation
/// is held as a sorted set of index tuples, so two structures built from the
/// same data compare equal. Immutable after construction.
class Structure {
 public:
  Structure() = default;

  /// Validates every invariant and throws StructureError on the first failure.
  Structure(Signature sig, std::vector<std::string> universe,
            std::map<std::string, std::set<Tuple>> relations,
            std::vector<int> basepoints, bool allow_identity = false);

  /// Name-based construction; tuples and basepoints are given by element id.
  static Structure from_names(
      Signature sig, std::vector<std::string> universe,
      const std::map<std::string, std::vector<std::vector<std::string>>>& relations,
      const std::vector<std::string>& basepoints);

  const Signature& signature() const { return sig_; }
  int size() const { return static_cast<int>(universe_.size()); }
  const std::vector<std::string>& universe() const { return universe_; }
  const std::string& name(int e) const { return universe_.at(e); }
  std::optional<int> find(std::string_view id) const;
  int index(std::string_view id) const;

  const std::map<std::string, std::set<Tuple>>& relations() const { return rel_; }
  const std::set<Tuple>& tuples(const std::string& rel) const;
  bool holds(const std::string& rel, const Tuple& t) const;
  bool edge(const std::string& rel, int from, int to) const;
  /// E(from, to) for some transition symbol E.
  bool transition_edge(int from, int to) const;

  const std::vector<int>& basepoints() const { return basepoints_; }

  bool operator==(const Structure& o) const {
    return sig_ == o.sig_ && universe_ == o.universe_ && rel_ == o.rel_ &&
           basepoints_ == o.basepoints_;
  }

 private:
  void build_index();

  Signature sig_;
  std::vector<std::string> universe_;
  std::map<std::string, std::set<Tuple>> rel_;
  std::vector<int> basepoints_;
  std::map<std::string, int, std::less<>> ids_;
  // Dense membership tables for relations small enough to tabulate.
  std::map<std::string, std::vector<bool>> dense_;
};

/// d(x,y) for every pair of elements, with infinity for disconnected pairs.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(int n = 0) : n_(n), d_(static_cast<std::size_t>(n) * n, ExtNat::infinity()) {}
  int size() const { return n_; }
  ExtNat at(int x, int y) const { return d_[static_cast<std::size_t>(x) * n_ + y]; }
  void set(int x, int y, ExtNat v) { d_[static_cast<std::size_t>(x) * n_ + y] = v; }

 private:
  int n_;
  std::vector<ExtNat> d_;
};

/// Symmetric adjacency: a ~ b iff a != b and both occur in a common tuple.
std::vector<std::set<int>> gaifman_graph(const Structure& s);

/// All-pairs shortest path lengths over the Gaifman graph (BFS from each element).
DistanceMatrix gaifman_distance(const Structure& s);

/// Coproduct. Ids are retagged with "L:" and "R:"; basepoints come from the left.
Structure disjoint_union(const Structure& a, const Structure& b);

/// Substructure induced by the given element indices, universe order kept.
/// Basepoints must lie in the kept set.
Structure induced_substructure(const Structure& s, const std::set<int>& keep);

/// Elements reachable from a basepoint by a directed transition path of
/// length <= k (k = infinity gives the full reachable part).
Structure reachable_part(const Structure& s, ExtNat k);

/// Union of the closed Gaifman balls of radius k around the basepoints.
Structure ball_part(const Structure& s, std::uint32_t k);

/// Indices reachable within k transition steps from any basepoint.
std::set<int> reachable_set(const Structure& s, ExtNat k);
/// Indices within Gaifman distance k of any basepoint.
std::set<int> ball_set(const Structure& s, const DistanceMatrix& d, std::uint32_t k);

/// h[i] is the image of element i of a. Throws StructureError when h is not
/// total on a or maps outside b.
bool is_homomorphism(const std::vector<int>& h, const Structure& a, const Structure& b);
bool is_homomorphism(const std::map<std::string, std::string>& h, const Structure& a,
                     const Structure& b);

/// Well-defined, injective, and preserving and reflecting every relation on
/// its domain. Out-of-range indices make the answer false.
bool is_partial_isomorphism(const std::vector<std::pair<int, int>>& pairs,
                            const Structure& a, const Structure& b);
bool is_partial_isomorphism(const std::vector<std::pair<std::string, std::string>>& pairs,
                            const Structure& a, const Structure& b);

/// Well-defined and preserving every relation on its domain.
bool is_partial_homomorphism(const std::vector<std::pair<int, int>>& pairs,
                             const Structure& a, const Structure& b);

/// Renames every element; the map must be injective and total.
Structure relabel(const Structure& s, const std::map<std::string, std::string>& names);

/// Brute-force basepoint-preserving isomorphism test (small structures only).
bool are_isomorphic(const Structure& a, const Structure& b);

}  // namespace hc
