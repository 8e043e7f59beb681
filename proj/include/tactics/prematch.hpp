#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tactics/clustering.hpp"
#include "tactics/exec.hpp"
#include "tactics/opposition.hpp"
#include "tactics/payoff_net.hpp"
#include "tactics/strength.hpp"

namespace tactics {

// 2 * P(side wins) + 1 * P(draw).
double weighted_payoff(const OutcomeDistribution& d, Side side);

// `ours` is oriented as (P(we win), P(draw), P(we lose)); `theirs` is its
// mirror from the opponent's side.
struct PayoffCell {
  OutcomeDistribution ours;
  OutcomeDistribution theirs;

  double our_payoff() const { return weighted_payoff(ours, Side::kHome); }
  double their_payoff() const { return weighted_payoff(theirs, Side::kHome); }
};

struct PayoffTable {
  std::vector<TacticChoice> our_actions;
  std::vector<TacticChoice> opp_actions;
  std::vector<PayoffCell> cells;  // row-major: our action x opponent action
  Side venue = Side::kHome;

  const PayoffCell& cell(std::size_t ours, std::size_t theirs) const { return cells[ours * opp_actions.size() + theirs]; }
  void validate(double tol = 1e-9) const;
};

// The learned parts of the pre-match game.
struct PrematchModels {
  StrengthModel strengths;
  StyleClusterSet clusters;
  FormationClassifier formations;
  PayoffNet net;
};

namespace kernels {
std::vector<OutcomeDistribution> predict_outcomes_serial(const PayoffNet& net, const std::vector<FeatureVector>& xs);
std::vector<OutcomeDistribution> predict_outcomes_omp(const PayoffNet& net, const std::vector<FeatureVector>& xs);
}  // namespace kernels

// One payoff-net evaluation per (ours, theirs) cell. `venue` is our side;
// features always place the home team in the home block.
PayoffTable build_payoff_table(const PayoffNet& net, const StrengthModel& strengths, int num_styles,
                               const TeamId& our_team, const TeamId& opp_team,
                               const std::vector<TacticChoice>& our_actions,
                               const std::vector<TacticChoice>& opp_actions, Side venue, Exec exec = Exec::kParallel);

enum class Approach { kBestResponse, kSpiteful, kMinmax };
std::string_view to_string(Approach a);
Approach parse_approach(std::string_view s);

struct CriterionResult {
  std::size_t index = 0;
  TacticChoice choice;
  // Per our action: expected own payoff (best response), expected opponent
  // payoff (spiteful), or expected payoff difference (minmax).
  std::vector<double> expected;
};

// `belief` is aligned with table.opp_actions and must have positive mass; it
// is renormalized. Ties go to the earliest our-action.
CriterionResult best_response(const PayoffTable& table, std::span<const double> belief);
CriterionResult spiteful(const PayoffTable& table, std::span<const double> belief);
CriterionResult minmax(const PayoffTable& table, std::span<const double> belief);
CriterionResult apply_criterion(const PayoffTable& table, std::span<const double> belief, Approach approach);

// Belief restricted to the table's opponent actions, renormalized.
std::vector<double> belief_weights(const PayoffTable& table, const OppositionBelief& belief);

// All 36 formations x styles, or only `formations` when given.
std::vector<TacticChoice> default_action_set(int num_styles, const std::vector<Formation>& formations = {});

struct BayesianGameConfig {
  const PrematchModels* models = nullptr;
  TeamId our_team;
  TeamId opp_team;
  Side venue = Side::kHome;
  std::vector<TacticChoice> our_actions;  // empty: observed formations x all styles
  std::vector<MatchRecord> history;       // matches before kickoff
  std::optional<StyleFeatures> opp_features;
  // Use only the most likely opponent tactic instead of the full belief.
  bool point_mass = false;
  Exec exec = Exec::kParallel;
};

struct Recommendation {
  Approach approach = Approach::kBestResponse;
  TacticChoice choice;
  std::vector<std::pair<TacticChoice, double>> expected_payoffs;
  OppositionBelief belief;
  PayoffTable table;
  std::vector<double> weights;
};

Recommendation recommend_prematch(const BayesianGameConfig& config, Approach approach);

json recommendation_json(const Recommendation& r, const std::string& model_version);

}  // namespace tactics
