#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tactics/domain.hpp"
#include "tactics/exec.hpp"
#include "tactics/rbf.hpp"
#include "tactics/strength.hpp"

namespace tactics {

struct TransitionDistribution {
  double p_home_goal = 0.0;
  double p_away_goal = 0.0;
  double p_no_goal = 1.0;

  double sum() const { return p_home_goal + p_away_goal + p_no_goal; }
  double goal(Side s) const { return s == Side::kHome ? p_home_goal : p_away_goal; }
  void validate(double tol = 1e-9) const;
};

enum class NextEvent { kHomeGoal = 0, kAwayGoal = 1, kNoGoal = 2 };

using Roster = std::map<PlayerId, PlayerProfile>;

// One side's in-match strategy: tactic, players on the pitch and on the
// bench, substitutions left.
struct InMatchStrategy {
  TeamId team;
  TacticChoice tactic;
  std::vector<PlayerProfile> lineup;
  std::vector<PlayerProfile> bench;
  int subs_remaining = kMaxSubstitutions;

  double mean_contribution() const;
  void validate() const;
};

struct MatchStrategies {
  InMatchStrategy home;
  InMatchStrategy away;

  const InMatchStrategy& side(Side s) const { return s == Side::kHome ? home : away; }
  InMatchStrategy& side(Side s) { return s == Side::kHome ? home : away; }
};

// Strategy for `side` of a recorded match at `minute`, with the record's
// substitutions before that minute applied.
InMatchStrategy strategy_at(const MatchRecord& m, Side side, double minute, const Roster& roster,
                            bool inclusive = false);

struct SubstitutionAction {
  std::vector<std::pair<PlayerId, PlayerId>> swaps;  // (player_in, player_out)

  std::size_t size() const { return swaps.size(); }
  std::vector<PlayerId> incoming() const;
  friend bool operator==(const SubstitutionAction&, const SubstitutionAction&) = default;
};

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Every subset of the bench with at most `subs_remaining` players, by size
// then lexicographically by bench position; outgoing players unassigned.
std::vector<SubstitutionAction> enumerate_actions(const std::vector<PlayerId>& bench, int subs_remaining);

// Outgoing pairing: each incoming player replaces the lowest-contribution
// on-pitch player of the same position, otherwise the lowest-contribution
// outfield player. Players already paired in this action are skipped; ties
// go to lineup order.
SubstitutionAction assign_outgoing(const SubstitutionAction& action, const InMatchStrategy& strategy);

// enumerate_actions over the strategy's bench, each paired by assign_outgoing.
std::vector<SubstitutionAction> legal_actions(const InMatchStrategy& strategy);

// Throws Error when the action is not legal for the strategy.
InMatchStrategy apply_action(const InMatchStrategy& strategy, const SubstitutionAction& action);

struct TransitionFeatureSpec {
  int num_styles = 1;
  double total_duration = 94.0;
};

Point encode_transition_features(const InMatchStrategy& home, const InMatchStrategy& away,
                                 const OutcomeDistribution& strength, double remaining_time,
                                 const TransitionFeatureSpec& spec);

struct BankConfig {
  RbfConfig rbf{30, 0.0, 1e-3, true, 0, 3};
  int scoreline_cap = 3;
  int min_rows = 30;
  // Rows are taken at each interval start and every `row_step` minutes
  // inside it; <= 0 gives one row per interval.
  double row_step = 10.0;
};

struct TransitionRow {
  GameState state;
  Point x;
  NextEvent label = NextEvent::kNoGoal;
  int round = 0;
};

std::vector<TransitionRow> transition_rows(const std::vector<MatchRecord>& matches, const StrengthModel& strengths,
                                           const Roster& roster, const TransitionFeatureSpec& spec,
                                           double row_step);

// Per-scoreline transition classifiers (home goal, away goal, no goal) for
// scorelines up to scoreline_cap-scoreline_cap, plus a shared overflow model
// trained on every row.
struct StateModelBank {
  std::map<std::pair<int, int>, RbfClassifier> models;
  RbfClassifier overflow;
  int scoreline_cap = 3;
  TransitionFeatureSpec spec;
  StrengthModel strengths;
  std::vector<std::string> fallback_states;  // capped states trained too thinly

  const RbfClassifier& model_for(int home_goals, int away_goals) const;
};

StateModelBank train_transition_bank(const std::vector<MatchRecord>& matches, const StrengthModel& strengths,
                                     const Roster& roster, int num_styles, const MatchClock& clock,
                                     const BankConfig& config = {});

TransitionDistribution transition_probs(const StateModelBank& bank, const GameState& state,
                                        const InMatchStrategy& home, const InMatchStrategy& away,
                                        double remaining_time);

struct Targets {
  GameState advance;
  GameState hold;
};
Targets more_positive_targets(const GameState& state, Side side);

enum class Objective { kAdvance, kHold };
enum class InMatchApproach { kAggressive, kReserved };
std::string_view to_string(InMatchApproach a);
InMatchApproach parse_inmatch_approach(std::string_view s);
inline Objective objective_of(InMatchApproach a) {
  return a == InMatchApproach::kAggressive ? Objective::kAdvance : Objective::kHold;
}

// Applies `action` to `our_side`'s strategy and returns P(own goal next) for
// kAdvance or P(no further goal) for kHold.
double action_payoff(const StateModelBank& bank, const GameState& state, const SubstitutionAction& action,
                     const MatchStrategies& strategies, Side our_side, double remaining_time, Objective objective);

namespace kernels {
std::vector<double> action_payoffs_serial(const StateModelBank& bank, const GameState& state,
                                          const std::vector<SubstitutionAction>& actions,
                                          const MatchStrategies& strategies, Side our_side, double remaining_time,
                                          Objective objective);
std::vector<double> action_payoffs_omp(const StateModelBank& bank, const GameState& state,
                                       const std::vector<SubstitutionAction>& actions,
                                       const MatchStrategies& strategies, Side our_side, double remaining_time,
                                       Objective objective);
}  // namespace kernels

struct ActionChoice {
  SubstitutionAction action;
  double payoff = 0.0;
  std::size_t index = 0;
  std::vector<SubstitutionAction> actions;
  std::vector<double> payoffs;
};

// Argmax over legal_actions; ties go to fewer substitutions, then
// enumeration order.
ActionChoice choose_action(const StateModelBank& bank, const GameState& state, const MatchStrategies& strategies,
                           Side our_side, double remaining_time, InMatchApproach approach,
                           Exec exec = Exec::kParallel);

void to_json(json& j, const TransitionDistribution& d);
void to_json(json& j, const SubstitutionAction& a);
void to_json(json& j, const InMatchStrategy& s);
void from_json(const json& j, InMatchStrategy& s);
void to_json(json& j, const StateModelBank& b);
void from_json(const json& j, StateModelBank& b);
json action_choice_json(const ActionChoice& c, InMatchApproach approach, const std::string& model_version);

}  // namespace tactics
