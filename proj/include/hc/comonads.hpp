#pragma once

// Comonads of plays over pointed structures: Ehrenfeucht-Fraisse (EF), modal
// unravelling (Modal), hybrid (Hybrid), hybrid temporal (HybridTemporal) and
// bounded (Bounded). Carriers are materialized eagerly as ordinary structures
// whose elements are plays.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hc/structures.hpp"

namespace hc {

/// A play is a non-empty sequence of element indices of the base structure.
using Play = std::vector<int>;

enum class ComonadKind { EF, Modal, Hybrid, HybridTemporal, Bounded };

std::string to_string(ComonadKind k);
/// Accepts ef, modal, hybrid, hybrid-temporal, bounded.
ComonadKind parse_comonad_kind(const std::string& name);

/// s is a prefix of t (including s == t).
bool is_prefix(const Play& s, const Play& t);
/// One of the two plays is a prefix of the other.
bool comparable(const Play& s, const Play& t);

struct ComonadOptions {
  std::size_t max_plays = 200000;
};

/// Relation instance on the carrier, over play indices.
struct CarrierTuple {
  std::string rel;
  Tuple plays;
};

class ComonadStructure {
 public:
  ComonadKind kind() const { return kind_; }
  int k() const { return k_; }
  bool with_I() const { return with_I_; }
  const Structure& base() const { return base_; }

  /// Plays sorted by length, then lexicographically by element index.
  const std::vector<Play>& plays() const { return plays_; }
  int size() const { return static_cast<int>(plays_.size()); }
  const Play& play(int i) const { return plays_.at(i); }
  std::optional<int> find(const Play& p) const;
  /// Throws Error when the play is not in the carrier.
  int index(const Play& p) const;
  /// Index of the play minus its last element, or -1 for a length-one play.
  int parent(int i) const { return parent_.at(i); }
  const std::vector<int>& children(int i) const { return children_.at(i); }
  /// Indices of the prefixes of play i, shortest first (ends with i).
  std::vector<int> chain(int i) const;

  /// Carrier tuples whose longest play is play i.
  const std::vector<CarrierTuple>& local_tuples(int i) const { return local_.at(i); }

  /// The carrier as a structure: ids "a.b.c", signature of the base plus I
  /// when with_I, basepoints the distinguished prefixes of the basepoint tuple.
  const Structure& carrier() const { return carrier_; }

  /// Stable text dump: header, one play per line, then one block per relation.
  std::string dump() const;

  std::string play_name(int i) const;

 private:
  friend ComonadStructure build_comonad(const Structure&, ComonadKind, int, bool,
                                        const ComonadOptions&);
  ComonadKind kind_ = ComonadKind::EF;
  int k_ = 1;
  bool with_I_ = false;
  Structure base_;
  std::vector<Play> plays_;
  std::map<Play, int> index_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<CarrierTuple>> local_;
  Structure carrier_;
};

/// Throws SignatureMismatch when the kind does not fit the signature
/// (Modal/Hybrid/HybridTemporal need a unimodal signature; EF and Bounded
/// need at least one basepoint), Error when k < 1, and ResourceExceeded
/// above the play cap.
ComonadStructure build_comonad(const Structure& base, ComonadKind kind, int k, bool with_I,
                               const ComonadOptions& opts = {});

/// The last element of a carrier play.
int counit(const ComonadStructure& c, const Play& s);

/// h maps each play index of `from` to an element of the base of `to`. The
/// result lists, per play s of `from`, the sequence of h over the prefixes of
/// s. Membership in `to` is not required (checked by the caller).
std::vector<Play> cokleisli_extension(const std::vector<int>& h, const ComonadStructure& from,
                                      const ComonadStructure& to);

/// Sequence of prefixes of s (each a carrier play).
std::vector<Play> comultiplication(const ComonadStructure& c, const Play& s);

using ExtensionFn = std::function<std::vector<Play>(const std::vector<int>&, const ComonadStructure&,
                                                    const ComonadStructure&)>;

struct ComonadLawReport {
  bool counit_law = false;        // counit after h* equals h
  bool identity_law = false;      // extension of the counit is the identity
  bool associativity_law = false; // (g after h*)* equals g* after h*
  bool all() const { return counit_law && identity_law && associativity_law; }
};

/// h : plays(cA) -> base(cB), g : plays(cB) -> base(cC). `extension`
/// replaces the coKleisli extension (negative controls).
ComonadLawReport check_comonad_laws(const ComonadStructure& cA, const ComonadStructure& cB,
                                    const ComonadStructure& cC, const std::vector<int>& h,
                                    const std::vector<int>& g,
                                    const ExtensionFn& extension = cokleisli_extension);

/// Homomorphism from the carrier (with I) of a to b, where I on b is the
/// identity, preserving basepoints.
bool is_cokleisli_morphism(const std::vector<int>& h, const ComonadStructure& ca, const Structure& b);

struct CoKleisliWitness {
  std::shared_ptr<const ComonadStructure> carrier;
  std::vector<int> map;  // play index -> element of b
};

/// Exhaustive search with memoization on play prefixes; the least witness in
/// (play order, universe order) is returned.
std::optional<CoKleisliWitness> find_cokleisli_morphism(const Structure& a, const Structure& b,
                                                        ComonadKind kind, int k,
                                                        const ComonadOptions& opts = {});

}  // namespace hc
