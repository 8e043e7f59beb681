#pragma once

#include <array>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tactics {

using TeamId = std::string;
using PlayerId = std::string;

enum class Side { kHome, kAway };

constexpr Side opposite(Side s) { return s == Side::kHome ? Side::kAway : Side::kHome; }
std::string_view to_string(Side s);
Side parse_side(std::string_view s);

// Outfield shape as a three-line triple; the goalkeeper is implicit.
struct Formation {
  int defenders = 4;
  int midfielders = 4;
  int forwards = 2;

  // Accepts "D-M-F" and longer bandings such as "4-2-3-1"; interior bands are
  // summed into midfield.
  static Formation parse(std::string_view text);
  std::string label() const;
  bool valid() const;

  friend auto operator<=>(const Formation&, const Formation&) = default;
};

inline constexpr int kOutfieldPlayers = 10;
inline constexpr int kFormationCount = 36;

// All 36 compositions of 10 into three positive parts, ordered by
// (defenders, midfielders, forwards).
std::span<const Formation> all_formations();
int formation_index(const Formation& f);

// L1 distance between the (defenders, midfielders, forwards) triples.
int formation_distance(const Formation& a, const Formation& b);

inline constexpr int kStyleFeatureCount = 5;

// Per-match averages used for style clustering.
struct StyleFeatures {
  double passes = 0;
  double shots = 0;
  double goals_for = 0;
  double goals_against = 0;
  double tackles = 0;

  std::array<double, kStyleFeatureCount> as_array() const {
    return {passes, shots, goals_for, goals_against, tackles};
  }
  static StyleFeatures from_array(const std::array<double, kStyleFeatureCount>& a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }
  void validate() const;
};

struct TacticChoice {
  Formation formation;
  int style = 0;
  // Original formation string when ingestion canonicalized a longer banding.
  std::string formation_label;

  std::string label() const;
  friend bool operator==(const TacticChoice& a, const TacticChoice& b) {
    return a.formation == b.formation && a.style == b.style;
  }
};

struct OutcomeDistribution {
  double p_home = 1.0 / 3.0;
  double p_draw = 1.0 / 3.0;
  double p_away = 1.0 / 3.0;

  double sum() const { return p_home + p_draw + p_away; }
  // Same match seen from the other side: home and away swap.
  OutcomeDistribution mirrored() const { return {p_away, p_draw, p_home}; }
  // Throws unless each component is in [0,1] and the sum is 1 within tol.
  void validate(double tol = 1e-9) const;
};

struct GameState {
  int home_goals = 0;
  int away_goals = 0;
  double minute = 0.0;

  int goals(Side s) const { return s == Side::kHome ? home_goals : away_goals; }
  std::string scoreline() const;
  friend bool operator==(const GameState&, const GameState&) = default;
};

int goal_difference(const GameState& state, Side side);

// Regulation time plus injury allowance.
struct MatchClock {
  double regulation = 90.0;
  double injury_time = 4.0;
  double total() const { return regulation + injury_time; }
};

enum class Position { kGK, kDEF, kMID, kFWD };
std::string_view to_string(Position p);
Position parse_position(std::string_view s);

struct PlayerProfile {
  PlayerId id;
  TeamId team;
  Position position = Position::kMID;
  double contribution = 0.5;

  void validate() const;
};

struct GoalEvent {
  double minute = 0.0;
  Side side = Side::kHome;
};

struct Substitution {
  double minute = 0.0;
  Side side = Side::kHome;
  PlayerId player_in;
  PlayerId player_out;
};

enum class MatchResult { kHomeWin = 0, kDraw = 1, kAwayWin = 2 };

inline constexpr int kLineupSize = 11;
inline constexpr int kMaxSubstitutions = 3;

struct MatchRecord {
  int round = 0;
  TeamId home_team;
  TeamId away_team;
  TacticChoice home_tactic;
  TacticChoice away_tactic;
  std::vector<GoalEvent> goals;
  int home_score = 0;
  int away_score = 0;
  std::vector<PlayerId> home_lineup;
  std::vector<PlayerId> away_lineup;
  std::vector<PlayerId> home_bench;
  std::vector<PlayerId> away_bench;
  std::vector<Substitution> substitutions;

  const TeamId& team(Side s) const { return s == Side::kHome ? home_team : away_team; }
  const TacticChoice& tactic(Side s) const { return s == Side::kHome ? home_tactic : away_tactic; }
  const std::vector<PlayerId>& lineup(Side s) const { return s == Side::kHome ? home_lineup : away_lineup; }
  const std::vector<PlayerId>& bench(Side s) const { return s == Side::kHome ? home_bench : away_bench; }
  int score(Side s) const { return s == Side::kHome ? home_score : away_score; }
  MatchResult result() const;
  // Side played by `team`, or nullopt when it did not play.
  std::optional<Side> side_of(const TeamId& team) const;
};

// Throws Error with a diagnostic naming the first violated invariant: score
// vs goal events, ordering, substitution count, bench provenance, lineup size.
void validate_match(const MatchRecord& m);

// On-pitch lineup for `side` once every substitution strictly before `minute`
// (or at it, when inclusive) has been applied.
std::vector<PlayerId> lineup_at(const MatchRecord& m, Side side, double minute, bool inclusive);

}  // namespace tactics
