#pragma once

// Hybrid logic and the (counting-extended) bounded fragment of first-order
// logic: syntax trees, concrete syntax, evaluation, the standard translation,
// and formula-producing constructions (characteristic sentences, Scott types,
// Gaifman relativization).

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hc/structures.hpp"

namespace hc {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Unbound variable in closed mode, or a nominal/constant index beyond m.
class ScopeError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Hybrid formulas

enum class HybridKind {
  True, False, Atom, Var, Nominal, Not, And, Or,
  Box, Dia, BoxInv, DiaInv, Down, At
};

struct HybridNode;
using Hybrid = std::shared_ptr<const HybridNode>;

struct HybridNode {
  HybridKind kind;
  std::string name;  // atom, variable, or binder/@ variable
  int nominal = 0;   // nominal index (Nominal, At with a nominal target)
  Hybrid left;
  Hybrid right;
};

namespace hy {
Hybrid truth();
Hybrid falsity();
Hybrid atom(std::string p);
Hybrid var(std::string x);
Hybrid nominal(int i);
Hybrid neg(Hybrid f);
Hybrid conj(Hybrid f, Hybrid g);
Hybrid disj(Hybrid f, Hybrid g);
Hybrid box(Hybrid f);
Hybrid dia(Hybrid f);
Hybrid boxinv(Hybrid f);
Hybrid diainv(Hybrid f);
Hybrid down(std::string x, Hybrid f);
Hybrid at(std::string x, Hybrid f);
Hybrid at_nominal(int i, Hybrid f);
}  // namespace hy

bool equal(const Hybrid& f, const Hybrid& g);

// ---------------------------------------------------------------------------
// First-order formulas

struct Term {
  bool is_constant = false;
  int constant = 0;  // 1-based constant index c_i
  std::string var;

  static Term variable(std::string v) { return Term{false, 0, std::move(v)}; }
  static Term constant_symbol(int i) { return Term{true, i, {}}; }
  bool operator==(const Term&) const = default;
  std::string to_string() const;
};

/// One guard atom: E(from, x), or E(x, from) when `backward`.
struct GuardAtom {
  std::string rel;
  Term from;
  bool backward = false;
  bool operator==(const GuardAtom&) const = default;
};

enum class FoKind {
  True, False, Atom, Eq, Not, And, Or,
  Forall, Exists, BoundedForall, BoundedExists, CountExists
};

struct FoNode;
using Formula = std::shared_ptr<const FoNode>;

/// Immutable first-order syntax node. Guarded quantifiers carry a guard that
/// is a disjunction of one or more guard atoms on the bound variable; a guard
/// with several atoms is the accessibility abbreviation and is expanded by
/// normalize_guards.
struct FoNode {
  FoKind kind;
  std::string rel;          // Atom
  std::vector<Term> args;   // Atom (n args), Eq (2 args)
  std::string var;          // quantifiers
  std::vector<GuardAtom> guard;
  int count = 0;            // CountExists threshold
  Formula left;             // Not/quantifier body, And/Or left
  Formula right;            // And/Or right
  std::vector<std::string> free_vars;  // sorted, computed at construction
  int rank = 0;
};

namespace fo {
Formula truth();
Formula falsity();
Formula atom(std::string rel, std::vector<Term> args);
Formula eq(Term t, Term u);
Formula neg(Formula f);
Formula conj(Formula f, Formula g);
Formula disj(Formula f, Formula g);
/// Left-folded conjunction/disjunction; empty lists give true/false.
Formula conj_all(const std::vector<Formula>& fs);
Formula disj_all(const std::vector<Formula>& fs);
Formula forall(std::string x, Formula body);
Formula exists(std::string x, Formula body);
Formula bounded_forall(std::string x, std::vector<GuardAtom> guard, Formula body);
Formula bounded_exists(std::string x, std::vector<GuardAtom> guard, Formula body);
Formula count_exists(int threshold, std::string x, std::vector<GuardAtom> guard, Formula body);
/// "exactly i": count_exists(i) and not count_exists(i+1).
Formula exactly(int i, std::string x, std::vector<GuardAtom> guard, Formula body);
}  // namespace fo

bool equal(const Formula& f, const Formula& g);

/// Partial map from variable names to element indices.
class Assignment {
 public:
  Assignment() = default;
  Assignment& bind(std::string var, int element);
  std::optional<int> lookup(std::string_view var) const;
  const std::vector<std::pair<std::string, int>>& bindings() const { return entries_; }

 private:
  std::vector<std::pair<std::string, int>> entries_;
};

// ---------------------------------------------------------------------------
// Concrete syntax

struct ParseOptions {
  /// Reject free world variables (hybrid) / free variables (first-order).
  bool closed = true;
  /// Largest admissible nominal/constant index; unlimited when unset.
  std::optional<int> max_constant;
};

Hybrid parse_hybrid(std::string_view text, const ParseOptions& opts = {});
Formula parse_fo(std::string_view text, const ParseOptions& opts = {});
std::string to_string(const Hybrid& f);
std::string to_string(const Formula& f);

/// The unary predicate a propositional atom denotes: first letter uppercased.
std::string predicate_for_atom(std::string_view atom);

// ---------------------------------------------------------------------------
// Measures and evaluation

/// Modal depth, with dia/diainv applied directly to a world variable at depth 0.
int hybrid_depth(const Hybrid& f);
int quantifier_rank(const Formula& f);

/// Throws ScopeError on an unbound variable or a constant index beyond m.
bool eval_fo(const Formula& f, const Structure& s, const Assignment& env = {});

/// Direct Kripke semantics at the first basepoint (nominals read from the
/// basepoints); `transition` defaults to the unique transition symbol.
bool eval_hybrid(const Hybrid& f, const Structure& s,
                 const std::optional<std::string>& transition = std::nullopt);

/// Guards are single atoms on transition symbols with bound variable distinct
/// from the guarding term, and no quantifier is unguarded. Backward guards
/// are accepted only when `allow_backward` (the temporal extension).
bool is_bounded(const Formula& f, const Signature& sig, bool allow_backward = false);

// ---------------------------------------------------------------------------
// Constructions

/// ST_x(f). Fresh quantified variables avoid every variable name in f and x.
Formula standard_translation(const Hybrid& f, const std::string& anchor,
                             const std::string& transition = "E");

/// Rewrites every multi-atom guard into single-guard bounded formulas of the
/// same quantifier rank (inclusion-exclusion on counting thresholds).
Formula normalize_guards(const Formula& f);

struct CharacteristicOptions {
  /// Also quantify through backward guards E(y,t) (hybrid temporal logic).
  bool temporal = false;
};

/// Bounded sentence of quantifier rank k true exactly in the structures that
/// are k-equivalent to s for the bounded fragment (or its temporal extension).
Formula characteristic_formula(const Structure& s, int k, const CharacteristicOptions& opts = {});

/// Canonical description of the atomic diagram of a tuple of elements.
struct AtomicType {
  std::vector<int> data;
  auto operator<=>(const AtomicType&) const = default;
};
AtomicType atomic_type(const Structure& s, const std::vector<int>& tuple);

/// Recursive counting type of a tuple (rank 0: atomic type; rank k+1: the
/// stuck marker when nothing is accessible, else the exact multiset of rank-k
/// types of one-step extensions by accessible elements). The atomic type of
/// the tuple itself is kept at every rank.
struct ScottType {
  int rank = 0;
  bool stuck = false;
  AtomicType atomic;
  std::vector<ScottType> children;   // sorted, distinct
  std::vector<int> counts;           // parallel to children

  friend bool operator==(const ScottType& a, const ScottType& b);
  friend std::strong_ordering operator<=>(const ScottType& a, const ScottType& b);
};

ScottType scott_type(const Structure& s, int k);
ScottType scott_type_of_tuple(const Structure& s, const std::vector<int>& tuple, int k);
std::string to_string(const ScottType& t);

/// Counting sentence for a descriptor (exact-count quantifiers over
/// accessibility guards). Equality of descriptors is the decision procedure;
/// this is the printer. The signature supplies relation and transition symbols.
Formula scott_formula(const ScottType& t, const Signature& sig);

/// First-order formula saying "some center is within Gaifman distance k of y".
Formula distance_at_most(const std::vector<Term>& centers, const std::string& y, int k,
                         const Signature& sig);

/// Relativizes every quantifier to the k-ball around `centers` (constants
/// c1..cm when empty), with the centers fixed throughout.
Formula gaifman_relativize(const Formula& f, const std::vector<Term>& centers, int k,
                           const Signature& sig);

}  // namespace hc
