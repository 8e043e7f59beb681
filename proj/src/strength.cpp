#include "tactics/strength.hpp"

#include <cmath>
#include <set>

#include "tactics/error.hpp"

namespace tactics {

const TeamRating& StrengthModel::rating(const TeamId& team) const {
  auto it = ratings.find(team);
  if (it == ratings.end()) throw NotFound("team '" + team + "' not in strength model");
  return it->second;
}

std::pair<double, double> StrengthModel::expected_goals(const TeamId& home, const TeamId& away) const {
  const auto& h = rating(home);
  const auto& a = rating(away);
  return {home_advantage * h.attack * a.defense, a.attack * h.defense};
}

namespace {

std::vector<double> poisson_pmf(double lambda, int max_goals) {
  std::vector<double> pmf(static_cast<std::size_t>(max_goals) + 1, 0.0);
  if (lambda <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  pmf[0] = std::exp(-lambda);
  for (int k = 1; k <= max_goals; ++k) pmf[k] = pmf[k - 1] * lambda / k;
  return pmf;
}

}  // namespace

OutcomeDistribution poisson_outcome_grid(double lambda_home, double lambda_away, int max_goals) {
  TACTICS_CHECK(max_goals >= 0, "max_goals must be non-negative");
  TACTICS_CHECK(std::isfinite(lambda_home) && std::isfinite(lambda_away) && lambda_home >= 0 && lambda_away >= 0,
                "scoring rates must be finite and non-negative");
  const auto ph = poisson_pmf(lambda_home, max_goals);
  const auto pa = poisson_pmf(lambda_away, max_goals);
  double home = 0, draw = 0, away = 0;
  for (int i = 0; i <= max_goals; ++i) {
    for (int j = 0; j <= max_goals; ++j) {
      const double p = ph[i] * pa[j];
      if (i > j) home += p;
      else if (i == j) draw += p;
      else away += p;
    }
  }
  const double total = home + draw + away;
  return {home / total, draw / total, away / total};
}

OutcomeDistribution outcome_probs(const StrengthModel& model, const TeamId& home, const TeamId& away) {
  auto [lh, la] = model.expected_goals(home, away);
  return poisson_outcome_grid(lh, la, model.max_goals);
}

namespace {

struct IndexedMatch {
  std::size_t home, away;
  double home_goals, away_goals;
};

double mean_ll(const std::vector<IndexedMatch>& rows, const std::vector<double>& att,
               const std::vector<double>& def, double log_home) {
  double ll = 0.0;
  for (const auto& r : rows) {
    const double eh = log_home + att[r.home] + def[r.away];
    const double ea = att[r.away] + def[r.home];
    ll += r.home_goals * eh - std::exp(eh) + r.away_goals * ea - std::exp(ea);
  }
  return ll / static_cast<double>(rows.size());
}

double penalty(const std::vector<double>& att, const std::vector<double>& def, double l2) {
  double s = 0.0;
  for (std::size_t t = 0; t < att.size(); ++t) s += att[t] * att[t] + def[t] * def[t];
  return l2 * s;
}

}  // namespace

StrengthModel fit_strengths(const std::vector<MatchRecord>& matches, const StrengthFitConfig& config,
                            std::vector<double>* trace) {
  if (matches.empty()) throw Error("fit_strengths: empty match list");
  std::map<TeamId, std::size_t> index;
  for (const auto& m : matches) {
    index.emplace(m.home_team, 0);
    index.emplace(m.away_team, 0);
  }
  if (index.size() < 2) throw Error("fit_strengths: need at least two teams");
  std::vector<TeamId> teams;
  for (auto& [id, i] : index) {
    i = teams.size();
    teams.push_back(id);
  }

  std::vector<IndexedMatch> rows;
  rows.reserve(matches.size());
  std::vector<double> appearances(teams.size(), 0.0);
  for (const auto& m : matches) {
    rows.push_back({index[m.home_team], index[m.away_team], static_cast<double>(m.home_score),
                    static_cast<double>(m.away_score)});
    appearances[index[m.home_team]] += 1.0;
    appearances[index[m.away_team]] += 1.0;
  }

  const std::size_t n_teams = teams.size();
  const double n = static_cast<double>(rows.size());
  std::vector<double> att(n_teams, 0.0), def(n_teams, 0.0);
  double log_home = 0.0;
  std::vector<double> g_att(n_teams), g_def(n_teams);

  auto objective = [&] { return mean_ll(rows, att, def, log_home) - penalty(att, def, config.l2); };
  if (trace) trace->push_back(objective());

  double current = objective();
  std::vector<double> next_att(n_teams), next_def(n_teams);
  for (int it = 0; it < config.iterations; ++it) {
    std::fill(g_att.begin(), g_att.end(), 0.0);
    std::fill(g_def.begin(), g_def.end(), 0.0);
    double g_home = 0.0;
    for (const auto& r : rows) {
      const double rh = r.home_goals - std::exp(log_home + att[r.home] + def[r.away]);
      const double ra = r.away_goals - std::exp(att[r.away] + def[r.home]);
      g_home += rh;
      g_att[r.home] += rh;
      g_def[r.away] += rh;
      g_att[r.away] += ra;
      g_def[r.home] += ra;
    }
    // Per-parameter step scaled by the inverse share of matches touching it,
    // a fixed diagonal preconditioner. A step that lowers the objective is
    // halved until it does not; extreme scores otherwise overshoot.
    double rate = config.learning_rate;
    for (int halving = 0;; ++halving) {
      for (std::size_t t = 0; t < n_teams; ++t) {
        const double scale = rate / appearances[t];
        next_att[t] = att[t] + scale * (g_att[t] - 2.0 * config.l2 * n * att[t]);
        next_def[t] = def[t] + scale * (g_def[t] - 2.0 * config.l2 * n * def[t]);
      }
      const double next_home = log_home + rate * g_home / n;
      const double value = mean_ll(rows, next_att, next_def, next_home) - penalty(next_att, next_def, config.l2);
      if ((std::isfinite(value) && value >= current) || halving == 60) {
        att.swap(next_att);
        def.swap(next_def);
        log_home = next_home;
        current = value;
        break;
      }
      rate *= 0.5;
    }
    if (trace) trace->push_back(current);
  }

  const double ll = mean_ll(rows, att, def, log_home);
  if (!std::isfinite(ll) || !std::isfinite(log_home)) {
    throw Error("fit_strengths: non-finite likelihood (degenerate data or learning rate too large)");
  }

  double mean_att = 0.0;
  for (double a : att) mean_att += a;
  mean_att /= static_cast<double>(n_teams);

  StrengthModel model;
  model.max_goals = config.max_goals;
  model.home_advantage = std::exp(log_home);
  for (std::size_t t = 0; t < n_teams; ++t) {
    model.ratings[teams[t]] = TeamRating{std::exp(att[t] - mean_att), std::exp(def[t] + mean_att)};
  }
  return model;
}

double strength_log_likelihood(const StrengthModel& model, const std::vector<MatchRecord>& matches) {
  if (matches.empty()) return 0.0;
  double ll = 0.0;
  for (const auto& m : matches) {
    auto [lh, la] = model.expected_goals(m.home_team, m.away_team);
    ll += m.home_score * std::log(lh) - lh + m.away_score * std::log(la) - la;
  }
  return ll / static_cast<double>(matches.size());
}

void to_json(json& j, const StrengthModel& m) {
  json teams = json::array();
  for (const auto& [id, r] : m.ratings) teams.push_back({{"id", id}, {"attack", r.attack}, {"defense", r.defense}});
  j = json{{"teams", teams}, {"home_advantage", m.home_advantage}, {"max_goals", m.max_goals}};
}

void from_json(const json& j, StrengthModel& m) {
  m.ratings.clear();
  for (const auto& t : j.at("teams")) {
    TeamRating r{t.at("attack").get<double>(), t.at("defense").get<double>()};
    if (!(r.attack > 0) || !(r.defense > 0)) throw Error("strength model: ratings must be positive");
    m.ratings[t.at("id").get<std::string>()] = r;
  }
  m.home_advantage = j.at("home_advantage").get<double>();
  m.max_goals = j.at("max_goals").get<int>();
  if (!(m.home_advantage > 0)) throw Error("strength model: home_advantage must be positive");
}

}  // namespace tactics
