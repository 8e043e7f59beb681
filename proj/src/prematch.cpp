#include "tactics/prematch.hpp"

#include <cmath>

#include "tactics/error.hpp"

namespace tactics {

double weighted_payoff(const OutcomeDistribution& d, Side side) {
  return side == Side::kHome ? 2.0 * d.p_home + d.p_draw : 2.0 * d.p_away + d.p_draw;
}

void PayoffTable::validate(double tol) const {
  if (cells.size() != our_actions.size() * opp_actions.size()) throw Error("payoff table: cell count mismatch");
  for (const auto& c : cells) {
    c.ours.validate(tol);
    c.theirs.validate(tol);
  }
}

PayoffTable build_payoff_table(const PayoffNet& net, const StrengthModel& strengths, int num_styles,
                               const TeamId& our_team, const TeamId& opp_team,
                               const std::vector<TacticChoice>& our_actions,
                               const std::vector<TacticChoice>& opp_actions, Side venue, Exec exec) {
  if (our_actions.empty() || opp_actions.empty()) throw Error("build_payoff_table: empty action list");
  const TeamId& home = venue == Side::kHome ? our_team : opp_team;
  const TeamId& away = venue == Side::kHome ? opp_team : our_team;
  const auto strength = outcome_probs(strengths, home, away);

  std::vector<FeatureVector> xs;
  xs.reserve(our_actions.size() * opp_actions.size());
  for (const auto& ours : our_actions) {
    for (const auto& theirs : opp_actions) {
      xs.push_back(venue == Side::kHome ? encode_payoff_features(ours, theirs, strength, num_styles)
                                        : encode_payoff_features(theirs, ours, strength, num_styles));
    }
  }
  const auto fixture = exec == Exec::kParallel ? kernels::predict_outcomes_omp(net, xs)
                                               : kernels::predict_outcomes_serial(net, xs);

  PayoffTable table;
  table.our_actions = our_actions;
  table.opp_actions = opp_actions;
  table.venue = venue;
  table.cells.reserve(fixture.size());
  for (const auto& d : fixture) {
    const auto ours = venue == Side::kHome ? d : d.mirrored();
    table.cells.push_back({ours, ours.mirrored()});
  }
  return table;
}

std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::kBestResponse: return "best_response";
    case Approach::kSpiteful: return "spiteful";
    case Approach::kMinmax: return "minmax";
  }
  return "?";
}

Approach parse_approach(std::string_view s) {
  if (s == "best" || s == "best_response") return Approach::kBestResponse;
  if (s == "spiteful") return Approach::kSpiteful;
  if (s == "minmax") return Approach::kMinmax;
  throw Error("unknown approach '" + std::string(s) + "'");
}

namespace {

std::vector<double> normalized(const PayoffTable& table, std::span<const double> belief) {
  if (belief.size() != table.opp_actions.size()) throw Error("belief size does not match opponent actions");
  double total = 0.0;
  for (double p : belief) {
    if (!(p >= 0.0)) throw Error("belief mass must be non-negative");
    total += p;
  }
  if (!(total > 0.0)) throw Error("belief has zero mass");
  std::vector<double> w(belief.begin(), belief.end());
  for (auto& v : w) v /= total;
  return w;
}

template <typename Objective>
CriterionResult select(const PayoffTable& table, std::span<const double> belief, Objective objective, bool maximize) {
  if (table.our_actions.empty()) throw Error("payoff table has no actions");
  const auto w = normalized(table, belief);
  CriterionResult r;
  r.expected.assign(table.our_actions.size(), 0.0);
  for (std::size_t i = 0; i < table.our_actions.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += objective(table.cell(i, j)) * w[j];
    r.expected[i] = s;
    const bool better = maximize ? s > r.expected[r.index] : s < r.expected[r.index];
    if (i > 0 && better) r.index = i;
  }
  r.choice = table.our_actions[r.index];
  return r;
}

}  // namespace

CriterionResult best_response(const PayoffTable& table, std::span<const double> belief) {
  return select(table, belief, [](const PayoffCell& c) { return c.our_payoff(); }, true);
}

CriterionResult spiteful(const PayoffTable& table, std::span<const double> belief) {
  return select(table, belief, [](const PayoffCell& c) { return c.their_payoff(); }, false);
}

CriterionResult minmax(const PayoffTable& table, std::span<const double> belief) {
  return select(table, belief, [](const PayoffCell& c) { return c.our_payoff() - c.their_payoff(); }, true);
}

CriterionResult apply_criterion(const PayoffTable& table, std::span<const double> belief, Approach approach) {
  switch (approach) {
    case Approach::kBestResponse: return best_response(table, belief);
    case Approach::kSpiteful: return spiteful(table, belief);
    case Approach::kMinmax: return minmax(table, belief);
  }
  throw Error("unknown approach");
}

std::vector<double> belief_weights(const PayoffTable& table, const OppositionBelief& belief) {
  std::vector<double> w(table.opp_actions.size(), 0.0);
  for (const auto& [tactic, p] : belief.atoms) {
    for (std::size_t j = 0; j < table.opp_actions.size(); ++j) {
      if (table.opp_actions[j] == tactic) w[j] += p;
    }
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) throw Error("belief has zero mass on the opponent action list");
  for (auto& v : w) v /= total;
  return w;
}

std::vector<TacticChoice> default_action_set(int num_styles, const std::vector<Formation>& formations) {
  std::vector<Formation> fs(formations.begin(), formations.end());
  if (fs.empty()) fs.assign(all_formations().begin(), all_formations().end());
  std::vector<TacticChoice> out;
  for (const auto& f : fs) {
    for (int s = 0; s < num_styles; ++s) out.push_back({f, s, {}});
  }
  return out;
}

Recommendation recommend_prematch(const BayesianGameConfig& config, Approach approach) {
  if (!config.models) throw Error("recommend_prematch: models not fitted");
  const auto& models = *config.models;
  const int k = models.clusters.k;
  const int our_style = models.clusters.style_of(config.our_team);

  Recommendation rec;
  rec.approach = approach;
  rec.belief = build_belief(models.formations, models.clusters, config.history, config.opp_team, our_style,
                            config.opp_features);
  if (config.point_mass) {
    rec.belief = OppositionBelief{{{rec.belief.most_likely(), 1.0}}};
  }
  std::vector<TacticChoice> opp_actions;
  for (const auto& [t, p] : rec.belief.atoms) {
    if (p > 0.0) opp_actions.push_back(t);
  }
  const auto our_actions = config.our_actions.empty() ? default_action_set(k, models.formations.vocab) : config.our_actions;
  rec.table = build_payoff_table(models.net, models.strengths, k, config.our_team, config.opp_team, our_actions,
                                 opp_actions, config.venue, config.exec);
  rec.weights = belief_weights(rec.table, rec.belief);
  const auto result = apply_criterion(rec.table, rec.weights, approach);
  rec.choice = result.choice;
  for (std::size_t i = 0; i < our_actions.size(); ++i) rec.expected_payoffs.emplace_back(our_actions[i], result.expected[i]);
  return rec;
}

json recommendation_json(const Recommendation& r, const std::string& model_version) {
  json payoffs = json::array();
  for (const auto& [t, v] : r.expected_payoffs) payoffs.push_back({{"tactic", t}, {"expected", v}});
  json columns = json::array();
  for (std::size_t j = 0; j < r.table.opp_actions.size(); ++j) {
    columns.push_back({{"tactic", r.table.opp_actions[j]}, {"p", r.weights[j]}});
  }
  return json{{"approach", std::string(to_string(r.approach))},
              {"choice", r.choice},
              {"venue", std::string(to_string(r.table.venue))},
              {"expected_payoffs", payoffs},
              {"belief", columns},
              {"model_version", model_version}};
}

}  // namespace tactics
