#pragma once

// Invariance checks over a corpus, the workspace construction with its
// copy-cat strategy for the q-round EF game, and corpus-relative synthesis
// of bounded equivalents.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hc/games.hpp"
#include "hc/logic.hpp"
#include "hc/structures.hpp"

namespace hc {

/// A sum of structures seen as a metric space: distance is the Gaifman
/// distance of the sum, so elements of different summands are at infinity.
struct MetricSpaceView {
  Structure carrier;
  DistanceMatrix distance;
  std::vector<int> summand;        // summand index of each element
  std::vector<int> local;          // index of the element in the original structure A
  std::vector<std::string> names;  // summand names, index 0 is the base summand
  std::vector<char> type;          // 'M' for copies of A, 'N' for copies of the ball
  /// Element of summand `s` with local index `x`, if present.
  std::optional<int> element(int s, int x) const;
};

struct Workspace {
  int q = 1;
  std::uint32_t radius = 2;  // 2^q
  Structure ball;            // N, the ball of radius 2^q around the basepoints
  Structure workspace;       // q copies of A and q copies of N, no basepoints
  Structure left;            // A + workspace
  Structure right;           // N + workspace
  MetricSpaceView left_view;
  MetricSpaceView right_view;
};

/// Throws Error for q < 1 or when the size bound fails.
Workspace build_workspace(const Structure& a, int q);

struct WorkspaceEntry {
  int left = 0;
  int right = 0;
  bool near = true;  // in C0/D0 (the copy of the ball around the basepoints)
  int rho_left = -1;  // summand pair of the canonical isomorphism, far entries only
  int rho_right = -1;
};

struct WorkspaceStrategyState {
  int q = 1;
  int round = 0;
  std::vector<WorkspaceEntry> entries;  // basepoints first
  /// Test hook: Case II answers through the wrong summand.
  bool sabotage = false;
  /// 2^(q - round).
  std::uint32_t radius() const;
};

enum class WorkspaceCase { Near, Tracked, Fresh };
std::string to_string(WorkspaceCase c);

struct WorkspaceStep {
  WorkspaceStrategyState state;
  int reply = 0;
  WorkspaceCase which = WorkspaceCase::Near;
};

WorkspaceStrategyState initial_workspace_state(const Workspace& w, bool sabotage = false);
/// Duplicator's answer to a Spoiler move. Throws Error when the state is
/// already in its last round or no unused summand of the right type is left.
WorkspaceStep workspace_strategy_step(const Workspace& w, const WorkspaceStrategyState& s, Move move);
/// First violated invariant of the state, nullopt when all six hold.
std::optional<std::string> workspace_invariant_violation(const Workspace& w,
                                                         const WorkspaceStrategyState& s);

struct WorkspaceVerification {
  bool invariants = true;
  bool partial_isomorphisms = true;
  bool strategy_verified = false;
  bool solver_agrees = false;
  std::size_t positions = 0;
  std::optional<std::string> failure;
  bool ok() const { return invariants && partial_isomorphisms && strategy_verified && solver_agrees; }
};

/// Replays every Spoiler sequence of length q against the strategy, then
/// checks the induced Duplicator strategy with the game verifier and the EF
/// solver.
WorkspaceVerification verify_workspace_report(const Structure& a, int q, bool sabotage = false);
bool verify_workspace(const Structure& a, int q, bool sabotage = false);

struct CorpusEntry {
  std::string name;
  Structure structure;
};

enum class InvarianceKind { Generated, Disjoint, Ball };

struct InvarianceNotion {
  InvarianceKind kind = InvarianceKind::Generated;
  int k = 1;
};

/// Accepts "generated:K", "disjoint", "ball:K". Throws Error otherwise.
InvarianceNotion parse_invariance_notion(const std::string& text);
std::string to_string(const InvarianceNotion& n);

struct InvarianceCounterexample {
  std::string structure;
  std::string partner;  // disjoint extensions only
  bool original = false;
  bool transformed = false;
};

struct InvarianceReport {
  std::size_t checked = 0;
  std::vector<InvarianceCounterexample> counterexamples;
  bool invariant() const { return counterexamples.empty(); }
};

/// Compares f on each corpus structure with f on its transform. For disjoint
/// extensions every corpus partner with the same relations is tried.
/// Structures whose signature does not fit f are skipped.
InvarianceReport check_invariance(const Formula& f, const InvarianceNotion& notion,
                                  const std::vector<CorpusEntry>& corpus);

/// A |= f relativized to the k-ball around the constants iff the k-ball part
/// of A satisfies f, for each corpus structure A.
InvarianceReport check_local_agreement(const Formula& f, int k, const std::vector<CorpusEntry>& corpus);

/// Disjunction of rank q*2^max(k,q) characteristic formulas of the corpus
/// models of f, where q is the rank of f. Agreement with f holds on the
/// corpus only. Throws Error when f is not generated(k)-invariant on the corpus.
Formula synthesize_bounded_equivalent(const Formula& f, int k, const std::vector<CorpusEntry>& corpus);

}  // namespace hc
