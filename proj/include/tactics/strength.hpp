#pragma once

#include <map>
#include <vector>

#include "tactics/domain.hpp"
#include "tactics/io.hpp"

namespace tactics {

struct TeamRating {
  double attack = 1.0;
  double defense = 1.0;
};

// Independent double-Poisson scoring model:
//   lambda_home = home_advantage * attack[home] * defense[away]
//   lambda_away = attack[away] * defense[home]
// Normalized so that the mean of log(attack) is 0.
struct StrengthModel {
  std::map<TeamId, TeamRating> ratings;
  double home_advantage = 1.0;
  int max_goals = 10;

  const TeamRating& rating(const TeamId& team) const;
  // (lambda_home, lambda_away) for a fixture.
  std::pair<double, double> expected_goals(const TeamId& home, const TeamId& away) const;
};

struct StrengthFitConfig {
  int iterations = 2000;
  double learning_rate = 0.1;
  double l2 = 1e-3;
  int max_goals = 10;
};

// P(H>A), P(H=A), P(H<A) under independent Poisson scores, summed over the
// grid [0, max_goals]^2. Mass outside the grid is redistributed
// proportionally. lambda = 0 is a point mass at zero goals.
OutcomeDistribution poisson_outcome_grid(double lambda_home, double lambda_away, int max_goals);

OutcomeDistribution outcome_probs(const StrengthModel& model, const TeamId& home, const TeamId& away);

// Maximizes the Poisson log-likelihood of the observed scores (minus an L2
// penalty on log-ratings) by preconditioned gradient ascent in log space,
// halving any step that would lower the objective.
// `trace`, when given, receives the penalized objective before the first
// step and after every step.
StrengthModel fit_strengths(const std::vector<MatchRecord>& matches, const StrengthFitConfig& config = {},
                            std::vector<double>* trace = nullptr);

// Unpenalized mean Poisson log-likelihood of the scores (constant log k!
// terms dropped).
double strength_log_likelihood(const StrengthModel& model, const std::vector<MatchRecord>& matches);

void to_json(json& j, const StrengthModel& m);
void from_json(const json& j, StrengthModel& m);

}  // namespace tactics
