#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tactics/domain.hpp"
#include "tactics/exec.hpp"
#include "tactics/inmatch.hpp"
#include "tactics/io.hpp"
#include "tactics/strength.hpp"

namespace tactics {

enum class Separation { kWellSeparated, kModerate, kOverlapping };
std::string_view to_string(Separation s);
Separation parse_separation(std::string_view s);
// Minimum inter-centroid distance in units of the intra-cluster stddev.
double separation_ratio(Separation s);

enum class HabitKind { kFavoritePerStyle, kRepeatLast, kAlternate };
std::string_view to_string(HabitKind h);
HabitKind parse_habit(std::string_view s);

struct GeneratorConfig {
  int teams = 20;
  int styles = 4;
  Separation separation = Separation::kWellSeparated;
  int seasons = 2;
  std::uint64_t seed = 0;

  // Expected goals per side per match when every multiplier is 1.
  double base_rate = 1.35;
  double home_advantage = 1.25;
  // Stddev of the planted log attack / log defense.
  double strength_spread = 0.3;

  // Scales the away side's rate; 0 gives a league where away teams never score.
  double away_rate_scale = 1.0;

  // style x style multiplier on the first style's scoring rate. When empty it
  // is drawn as exp(interaction_spread * N(0,1)) per entry.
  std::vector<std::vector<double>> style_interaction;
  double interaction_spread = 0.1;
  // Scoring rate gains exp(formation_effect * (q[own] - q[opponent])) where q
  // is a planted per-formation quality.
  double formation_effect = 0.0;
  std::vector<Formation> formation_pool;  // empty = default pool

  HabitKind habit = HabitKind::kFavoritePerStyle;
  // Probability of following the habit; otherwise uniform over the pool.
  double habit_follow = 0.75;

  // Time and scoreline modifiers (homogeneous when 0, 1).
  double late_inflation = 0.3;
  double trailing_boost = 1.2;
  // Rate factor exp(contribution_effect * (mean on-pitch contribution - 0.5)).
  double contribution_effect = 0.0;

  double contribution_mean = 0.5;
  double contribution_spread = 0.35;

  // Weights of 0..3 scripted substitutions per side.
  std::vector<double> substitution_weights{0.1, 0.2, 0.3, 0.4};
  double substitution_window_start = 46.0;
  double substitution_window_end = 85.0;

  MatchClock clock;

  bool homogeneous() const {
    return late_inflation == 0.0 && trailing_boost == 1.0 && contribution_effect == 0.0;
  }
  void validate() const;

  // Named configurations: well_separated, homogeneous, tactic_sensitive,
  // planted_habit, contribution_sensitive, degenerate_away.
  static GeneratorConfig preset(std::string_view name);
};

struct GroundTruth {
  GeneratorConfig config;
  std::map<TeamId, int> styles;
  std::map<TeamId, TeamRating> strengths;  // planted attack / defense multipliers
  std::vector<std::vector<double>> style_interaction;
  std::vector<Formation> formation_pool;
  std::vector<double> formation_quality;  // aligned with formation_pool
  std::map<TeamId, std::vector<Formation>> favorites;  // per opponent style
  std::vector<std::vector<double>> centroids;          // unit space, one per style
  double intra_stddev = 1.0;

  double quality(const Formation& f) const;
  // Expected goals for `side` over a full match with time modifiers at 1.
  double expected_goals(const TeamId& home, const TeamId& away, const TacticChoice& home_tactic,
                        const TacticChoice& away_tactic, Side side) const;
};

struct League {
  std::vector<MatchRecord> matches;
  std::vector<PlayerProfile> players;
  StyleTable style_features;
  GroundTruth truth;
};

League generate_league(const GeneratorConfig& config);

// Best-contribution starting eleven for the formation (one goalkeeper), the
// rest of the squad on the bench in squad order. Ties go to squad order.
std::pair<std::vector<PlayerId>, std::vector<PlayerId>> select_lineup(const std::vector<PlayerProfile>& squad,
                                                                      const Formation& formation);

// Fills goals and scores of `fixture` by thinning a Poisson process whose rate
// follows the planted truth. Lineups, benches and scripted substitutions must
// already be present.
MatchRecord simulate_match(const GroundTruth& truth, const Roster& roster, MatchRecord fixture, std::uint64_t seed);

namespace kernels {
std::vector<MatchRecord> simulate_batch_serial(const GroundTruth& truth, const Roster& roster,
                                               const std::vector<MatchRecord>& fixtures, std::uint64_t seed);
std::vector<MatchRecord> simulate_batch_omp(const GroundTruth& truth, const Roster& roster,
                                            const std::vector<MatchRecord>& fixtures, std::uint64_t seed);
}  // namespace kernels

// Fixture i is simulated with derive_seed(seed, i).
std::vector<MatchRecord> simulate_batch(const GroundTruth& truth, const Roster& roster,
                                        const std::vector<MatchRecord>& fixtures, std::uint64_t seed,
                                        Exec exec = Exec::kParallel);

// Exact double-Poisson outcome probabilities under the planted rates. Only
// defined for homogeneous configurations.
OutcomeDistribution analytic_outcome_probs(const GroundTruth& truth, const TeamId& home, const TeamId& away,
                                           const TacticChoice& home_tactic, const TacticChoice& away_tactic);

Roster make_roster(const std::vector<PlayerProfile>& players);

void to_json(json& j, const GeneratorConfig& c);
void from_json(const json& j, GeneratorConfig& c);
void to_json(json& j, const GroundTruth& t);
void from_json(const json& j, GroundTruth& t);

}  // namespace tactics
