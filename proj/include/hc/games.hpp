#pragma once

// Model-comparison games solved by memoized backward induction.
//
// Every game starts from the position pairing the basepoint tuples and then
// runs k free rounds. The winning condition is checked at every position,
// the initial one included.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hc/structures.hpp"

namespace hc {

class GameError : public Error {
 public:
  using Error::Error;
};

enum class GameVariant {
  ExistentialEF,
  ExistentialHybrid,
  ExistentialBounded,
  EF,
  BackForthHybrid,
  BackForthBounded,
  BackForthTemporal,
  Bijection,
  ComonadicGk,
};

std::string to_string(GameVariant v);
bool is_existential(GameVariant v);

enum class Player { Spoiler, Duplicator };
enum class Side { Left, Right };

std::string to_string(Player p);

struct Move {
  Side side = Side::Left;
  int element = 0;
  auto operator<=>(const Move&) const = default;
};

/// Full history of paired moves, basepoints first.
using History = std::vector<std::pair<int, int>>;

struct GameResult {
  GameVariant variant = GameVariant::EF;
  int k = 0;
  Player winner = Player::Duplicator;
  /// Spoiler's move at each reachable history (Spoiler wins).
  std::map<History, Move> spoiler;
  /// Duplicator's reply to each move at each reachable history (Duplicator wins).
  std::map<std::pair<History, Move>, int> duplicator;
  /// Bijection game, Duplicator wins: the bijection chosen at each history,
  /// as (left element, right element) pairs.
  std::map<History, std::vector<std::pair<int, int>>> bijection;
  /// Bijection game, Spoiler wins: a set S of accessible left elements whose
  /// good partners are fewer than |S| (empty when the accessible sets differ
  /// in size).
  std::map<History, std::vector<int>> hall;
};

struct GameOptions {
  /// Largest accessible set the bijection game will handle.
  std::size_t bijection_cap = 8;
};

/// Throws SignatureMismatch when the structures or the variant do not fit.
GameResult solve(const Structure& a, const Structure& b, GameVariant variant, int k,
                 const GameOptions& opts = {});
GameResult solve_bijection(const Structure& a, const Structure& b, int k, const GameOptions& opts = {});
/// The game on hybrid carriers with covering moves; positions are pairs of
/// plays and the winning set pairs prefixes elementwise.
GameResult solve_Gk(const Structure& a, const Structure& b, int k);

/// Direct recursion on the inductive back-and-forth relations for the bounded
/// fragment, independent of the game engine.
bool back_and_forth_rank(const Structure& a, const Structure& b, int k);

/// Replays every Spoiler option (or every Duplicator reply) against the
/// stored strategy. Throws GameError when the strategy is missing at a
/// reachable state.
bool verify_strategy(const GameResult& result, const Structure& a, const Structure& b,
                     GameVariant variant, int k, const GameOptions& opts = {});
bool verify_strategy(const GameResult& result, const Structure& a, const Structure& b);

/// Reason the pairs fail the variant's winning condition, naming the atomic
/// fact, or nullopt when the condition holds.
std::optional<std::string> explain_violation(const History& pairs, const Structure& a,
                                             const Structure& b, GameVariant variant);

/// Line-per-round transcript of the principal line of play.
std::string trace(const GameResult& result, const Structure& a, const Structure& b);

}  // namespace hc
