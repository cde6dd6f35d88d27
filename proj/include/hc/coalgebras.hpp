#pragma once

// Generated tree covers, their correspondence with coalgebras of the play
// comonads, depth numbers, and path-lifting predicates on cover morphisms.

#include <memory>
#include <optional>
#include <vector>

#include "hc/comonads.hpp"
#include "hc/structures.hpp"

namespace hc {

class CoverError : public Error {
 public:
  using Error::Error;
};

/// Forest order on the universe of `base`, stored as the covering relation:
/// parent[x] is the immediate predecessor of x, or -1 for a root.
struct TreeCover {
  Structure base;
  std::vector<int> parent;
};

/// Elements from the root down to x. Throws CoverError on a cycle.
std::vector<int> branch(const TreeCover& t, int x);
/// x <= y in the cover order.
bool cover_leq(const TreeCover& t, int x, int y);
/// Largest number of elements on a chain. Throws CoverError on a cycle.
int cover_height(const TreeCover& t);

/// Tree order with the basepoints (which must be distinct) forming the chain
/// a1 < ... < am at the bottom and everything else above am; Gaifman-adjacent
/// elements comparable; every element other than a basepoint seen from a
/// strict predecessor through a transition. With `k_bound`, also
/// height - m <= k_bound. Throws CoverError when the parent map is cyclic.
bool is_generated_tree_cover(const TreeCover& t, std::optional<int> k_bound = std::nullopt);

struct Coalgebra {
  std::shared_ptr<const ComonadStructure> target;
  std::vector<Play> alpha;  // alpha[x] for each element x of the base
};

/// Kind used for covers of s: Hybrid for unimodal signatures, else Bounded.
ComonadKind default_cover_kind(const Structure& s);

/// alpha(x) lists the basepoints followed by the branch above am up to x.
/// Throws CoverError unless t is a generated cover of height - m <= k.
Coalgebra cover_to_coalgebra(const TreeCover& t, int k,
                             std::optional<ComonadKind> kind = std::nullopt);
/// Parent of x is the last element of the one-shorter prefix of alpha(x).
/// Throws CoverError when the coalgebra laws fail.
TreeCover coalgebra_to_cover(const Coalgebra& c);

struct CoalgebraLawReport {
  bool membership = false;        // every alpha(x) is a carrier play
  bool counit = false;            // last(alpha(x)) == x
  bool comultiplication = false;  // alpha(last p) == p for each prefix p of alpha(x)
  bool homomorphism = false;      // alpha preserves every relation
  bool basepoints = false;        // alpha(a_i) is the i-th distinguished play
  bool all() const { return membership && counit && comultiplication && homomorphism && basepoints; }
};

CoalgebraLawReport check_coalgebra_laws(const Coalgebra& c);

struct EnumerationOptions {
  std::size_t max_candidates = 5000000;
};

/// Every generated cover (optionally with height - m <= k_bound), parent
/// candidates in universe order.
std::vector<TreeCover> enumerate_generated_covers(const Structure& s,
                                                  std::optional<int> k_bound = std::nullopt,
                                                  const EnumerationOptions& opts = {});
/// Every map satisfying all coalgebra laws into the k-carrier of `kind`.
std::vector<Coalgebra> enumerate_coalgebras(const Structure& s, int k, ComonadKind kind,
                                            const EnumerationOptions& opts = {});

struct DepthResult {
  ExtNat depth = ExtNat::infinity();
  std::optional<TreeCover> witness;
};

/// Minimum height of a generated cover (node count), infinity when none.
DepthResult generated_tree_depth(const Structure& s);
/// Least k >= 1 admitting a coalgebra for the k-carrier, infinity when none.
ExtNat coalgebra_number(const Structure& s, ComonadKind kind);

/// f maps elements of t.base to u.base. Requires f to be a homomorphism
/// preserving basepoints, roots and the covering relation (throws Error
/// otherwise) and both bases to have at most `max_size` elements (throws
/// ResourceExceeded otherwise). True iff f restricted to every branch is an
/// embedding and f has the path-lifting property.
bool check_open_pathwise_embedding(const std::vector<int>& f, const TreeCover& t, const TreeCover& u,
                                   int max_size = 64);

}  // namespace hc
