#include "tactics/league.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "tactics/error.hpp"
#include "tactics/rng.hpp"

namespace tactics {

std::string_view to_string(Separation s) {
  switch (s) {
    case Separation::kWellSeparated: return "well_separated";
    case Separation::kModerate: return "moderate";
    case Separation::kOverlapping: return "overlapping";
  }
  return "?";
}

Separation parse_separation(std::string_view s) {
  if (s == "well_separated") return Separation::kWellSeparated;
  if (s == "moderate") return Separation::kModerate;
  if (s == "overlapping") return Separation::kOverlapping;
  throw Error("unknown separation '" + std::string(s) + "'");
}

double separation_ratio(Separation s) {
  switch (s) {
    case Separation::kWellSeparated: return 8.0;
    case Separation::kModerate: return 4.0;
    case Separation::kOverlapping: return 1.5;
  }
  return 1.0;
}

std::string_view to_string(HabitKind h) {
  switch (h) {
    case HabitKind::kFavoritePerStyle: return "favorite_per_style";
    case HabitKind::kRepeatLast: return "repeat_last";
    case HabitKind::kAlternate: return "alternate";
  }
  return "?";
}

HabitKind parse_habit(std::string_view s) {
  if (s == "favorite_per_style") return HabitKind::kFavoritePerStyle;
  if (s == "repeat_last") return HabitKind::kRepeatLast;
  if (s == "alternate") return HabitKind::kAlternate;
  throw Error("unknown habit '" + std::string(s) + "'");
}

namespace {

const std::vector<Formation>& default_pool() {
  static const std::vector<Formation> pool{{4, 4, 2}, {4, 3, 3}, {4, 5, 1}, {3, 5, 2}, {5, 3, 2}, {3, 4, 3}};
  return pool;
}

// Squad composition: two keepers, then defenders, midfielders, forwards.
constexpr int kSquadGK = 2, kSquadDEF = 6, kSquadMID = 6, kSquadFWD = 4;

std::string team_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d", i + 1);
  return buf;
}

std::string player_name(const TeamId& team, int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "-P%02d", i + 1);
  return team + buf;
}

// Sign patterns whose rows differ in at least three of five coordinates and
// where every coordinate splits the rows evenly.
constexpr int kSigns[4][kStyleFeatureCount] = {
    {+1, +1, +1, +1, +1}, {+1, -1, -1, +1, -1}, {-1, +1, -1, -1, +1}, {-1, -1, +1, -1, -1}};

std::vector<std::vector<double>> plant_centroids(int k, double ratio, double sigma, Rng& rng) {
  std::vector<std::vector<double>> c(k, std::vector<double>(kStyleFeatureCount, 0.0));
  if (k == 1) return c;
  if (k <= 4) {
    const double h = ratio * sigma / (2.0 * std::sqrt(3.0));
    for (int i = 0; i < k; ++i) {
      for (int f = 0; f < kStyleFeatureCount; ++f) c[i][f] = h * kSigns[i][f];
    }
    return c;
  }
  for (auto& row : c) {
    for (auto& v : row) v = standard_normal(rng);
  }
  double min_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      double s = 0.0;
      for (int f = 0; f < kStyleFeatureCount; ++f) s += (c[i][f] - c[j][f]) * (c[i][f] - c[j][f]);
      min_d = std::min(min_d, std::sqrt(s));
    }
  }
  for (auto& row : c) {
    for (auto& v : row) v *= ratio * sigma / min_d;
  }
  return c;
}

// Raw feature = base + scale * unit coordinate.
constexpr double kFeatureBase[kStyleFeatureCount] = {420.0, 12.0, 1.4, 1.4, 17.0};
constexpr double kFeatureScale[kStyleFeatureCount] = {40.0, 1.5, 0.15, 0.15, 1.5};

std::vector<std::pair<int, int>> round_robin(int n) {
  // Circle method; with an odd count the extra slot is a bye.
  const int m = n % 2 == 0 ? n : n + 1;
  std::vector<int> ring(m);
  for (int i = 0; i < m; ++i) ring[i] = i;
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < m - 1; ++r) {
    for (int i = 0; i < m / 2; ++i) {
      int a = ring[i], b = ring[m - 1 - i];
      if (a >= n || b >= n) continue;
      if ((i == 0 && r % 2 == 1) || (i > 0 && i % 2 == 1)) std::swap(a, b);
      out.emplace_back(a, b);
    }
    std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
  }
  return out;
}

double mean_contribution(const Roster& roster, const std::vector<PlayerId>& lineup) {
  double s = 0.0;
  for (const auto& id : lineup) s += roster.at(id).contribution;
  return lineup.empty() ? 0.0 : s / static_cast<double>(lineup.size());
}

}  // namespace

void GeneratorConfig::validate() const {
  TACTICS_CHECK(teams >= 2, "generator: need at least two teams");
  TACTICS_CHECK(styles >= 1 && styles <= teams, "generator: style count must be in [1, teams]");
  TACTICS_CHECK(seasons >= 1, "generator: need at least one season");
  TACTICS_CHECK(base_rate >= 0.0 && home_advantage > 0.0 && away_rate_scale >= 0.0,
                "generator: rates must be non-negative");
  TACTICS_CHECK(strength_spread >= 0.0 && interaction_spread >= 0.0, "generator: spreads must be non-negative");
  TACTICS_CHECK(habit_follow >= 0.0 && habit_follow <= 1.0, "generator: habit_follow must be a probability");
  TACTICS_CHECK(late_inflation >= 0.0 && trailing_boost > 0.0, "generator: time modifiers must be positive");
  TACTICS_CHECK(contribution_spread >= 0.0, "generator: contribution spread must be non-negative");
  TACTICS_CHECK(substitution_weights.size() == static_cast<std::size_t>(kMaxSubstitutions + 1),
                "generator: substitution_weights needs one weight per count 0..3");
  double total = 0.0;
  for (double w : substitution_weights) {
    TACTICS_CHECK(w >= 0.0, "generator: substitution weights must be non-negative");
    total += w;
  }
  TACTICS_CHECK(total > 0.0, "generator: substitution weights sum to zero");
  TACTICS_CHECK(substitution_window_start > 0.0 && substitution_window_start <= substitution_window_end &&
                    substitution_window_end < clock.total(),
                "generator: substitution window must lie inside the match");
  if (!style_interaction.empty()) {
    TACTICS_CHECK(style_interaction.size() == static_cast<std::size_t>(styles),
                  "generator: style_interaction must be styles x styles");
    for (const auto& row : style_interaction) {
      TACTICS_CHECK(row.size() == static_cast<std::size_t>(styles), "generator: style_interaction must be square");
      for (double v : row) TACTICS_CHECK(v > 0.0, "generator: interaction multipliers must be positive");
    }
  }
  for (const auto& f : formation_pool) {
    TACTICS_CHECK(f.valid(), "generator: invalid formation in pool");
    TACTICS_CHECK(f.defenders <= kSquadDEF && f.midfielders <= kSquadMID && f.forwards <= kSquadFWD,
                  "generator: formation " + f.label() + " needs more players than a squad holds");
  }
}

GeneratorConfig GeneratorConfig::preset(std::string_view name) {
  GeneratorConfig c;
  if (name == "well_separated") {
    c.formation_effect = 0.15;
  } else if (name == "homogeneous") {
    c.formation_effect = 0.15;
    c.late_inflation = 0.0;
    c.trailing_boost = 1.0;
  } else if (name == "tactic_sensitive") {
    c.formation_effect = 0.4;
    c.interaction_spread = 0.2;
    c.habit_follow = 0.5;
  } else if (name == "planted_habit") {
    c.habit_follow = 0.9;
    c.formation_effect = 0.15;
  } else if (name == "contribution_sensitive") {
    c.contribution_effect = 4.0;
    c.contribution_spread = 0.5;
  } else if (name == "degenerate_away") {
    c.away_rate_scale = 0.0;
  } else {
    throw Error("unknown generator preset '" + std::string(name) + "'");
  }
  return c;
}

double GroundTruth::quality(const Formation& f) const {
  for (std::size_t i = 0; i < formation_pool.size(); ++i) {
    if (formation_pool[i] == f) return formation_quality[i];
  }
  return 0.0;
}

double GroundTruth::expected_goals(const TeamId& home, const TeamId& away, const TacticChoice& home_tactic,
                                   const TacticChoice& away_tactic, Side side) const {
  auto find = [&](const TeamId& t) -> const TeamRating& {
    auto it = strengths.find(t);
    if (it == strengths.end()) throw NotFound("team '" + t + "' not in ground truth");
    return it->second;
  };
  const auto& h = find(home);
  const auto& a = find(away);
  const int k = static_cast<int>(style_interaction.size());
  const int sh = home_tactic.style, sa = away_tactic.style;
  TACTICS_CHECK(sh >= 0 && sh < k && sa >= 0 && sa < k, "ground truth: unknown tactic style");
  const double qh = quality(home_tactic.formation), qa = quality(away_tactic.formation);
  const double beta = config.formation_effect;
  if (side == Side::kHome) {
    return config.base_rate * config.home_advantage * h.attack * a.defense * style_interaction[sh][sa] *
           std::exp(beta * (qh - qa));
  }
  return config.base_rate * config.away_rate_scale * a.attack * h.defense * style_interaction[sa][sh] *
         std::exp(beta * (qa - qh));
}

std::pair<std::vector<PlayerId>, std::vector<PlayerId>> select_lineup(const std::vector<PlayerProfile>& squad,
                                                                      const Formation& formation) {
  TACTICS_CHECK(formation.valid(), "select_lineup: invalid formation");
  const std::pair<Position, int> need[] = {{Position::kGK, 1},
                                           {Position::kDEF, formation.defenders},
                                           {Position::kMID, formation.midfielders},
                                           {Position::kFWD, formation.forwards}};
  std::set<std::size_t> chosen;
  for (const auto& [pos, count] : need) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < squad.size(); ++i) {
      if (squad[i].position == pos) idx.push_back(i);
    }
    if (static_cast<int>(idx.size()) < count) {
      throw Error("select_lineup: squad has too few " + std::string(to_string(pos)) + " players for " +
                  formation.label());
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return squad[a].contribution > squad[b].contribution; });
    chosen.insert(idx.begin(), idx.begin() + count);
  }
  std::pair<std::vector<PlayerId>, std::vector<PlayerId>> out;
  for (std::size_t i = 0; i < squad.size(); ++i) (chosen.count(i) ? out.first : out.second).push_back(squad[i].id);
  return out;
}

Roster make_roster(const std::vector<PlayerProfile>& players) {
  Roster r;
  for (const auto& p : players) {
    if (!r.emplace(p.id, p).second) throw Error("duplicate player id '" + p.id + "'");
  }
  return r;
}

MatchRecord simulate_match(const GroundTruth& truth, const Roster& roster, MatchRecord fixture, std::uint64_t seed) {
  const auto& cfg = truth.config;
  const double total = cfg.clock.total();
  const double regulation = cfg.clock.regulation;

  // Per side: (minute, mean contribution from that minute on).
  std::array<std::vector<std::pair<double, double>>, 2> contribution;
  for (Side side : {Side::kHome, Side::kAway}) {
    auto& steps = contribution[side == Side::kHome ? 0 : 1];
    steps.emplace_back(0.0, mean_contribution(roster, fixture.lineup(side)));
    for (const auto& s : fixture.substitutions) {
      if (s.side != side) continue;
      steps.emplace_back(s.minute, mean_contribution(roster, lineup_at(fixture, side, s.minute, true)));
    }
  }
  auto contribution_at = [&](Side side, double t) {
    const auto& steps = contribution[side == Side::kHome ? 0 : 1];
    double c = steps.front().second;
    for (const auto& [m, v] : steps) {
      if (m <= t) c = v;
    }
    return c;
  };

  const double kappa = cfg.contribution_effect;
  const double base_home =
      truth.expected_goals(fixture.home_team, fixture.away_team, fixture.home_tactic, fixture.away_tactic, Side::kHome) /
      total;
  const double base_away =
      truth.expected_goals(fixture.home_team, fixture.away_team, fixture.home_tactic, fixture.away_tactic, Side::kAway) /
      total;
  const double envelope_factor =
      (1.0 + cfg.late_inflation * total / regulation) * std::max(cfg.trailing_boost, 1.0) * std::exp(std::abs(kappa) * 0.5);
  const double envelope = (base_home + base_away) * envelope_factor;

  fixture.goals.clear();
  GameState state;
  auto rate = [&](Side side, double t) {
    const double base = side == Side::kHome ? base_home : base_away;
    double r = base * (1.0 + cfg.late_inflation * t / regulation);
    if (goal_difference(state, side) < 0) r *= cfg.trailing_boost;
    return r * std::exp(kappa * (contribution_at(side, t) - 0.5));
  };

  if (envelope > 0.0) {
    Rng rng(seed);
    double t = 0.0;
    while (true) {
      t += exponential(rng, envelope);
      if (t >= total) break;
      const double u = uniform01(rng) * envelope;
      const double rh = rate(Side::kHome, t);
      if (u < rh) {
        fixture.goals.push_back({t, Side::kHome});
        ++state.home_goals;
      } else if (u < rh + rate(Side::kAway, t)) {
        fixture.goals.push_back({t, Side::kAway});
        ++state.away_goals;
      }
    }
  }
  fixture.home_score = state.home_goals;
  fixture.away_score = state.away_goals;
  return fixture;
}

std::vector<MatchRecord> simulate_batch(const GroundTruth& truth, const Roster& roster,
                                        const std::vector<MatchRecord>& fixtures, std::uint64_t seed, Exec exec) {
  return exec == Exec::kParallel ? kernels::simulate_batch_omp(truth, roster, fixtures, seed)
                                 : kernels::simulate_batch_serial(truth, roster, fixtures, seed);
}

OutcomeDistribution analytic_outcome_probs(const GroundTruth& truth, const TeamId& home, const TeamId& away,
                                           const TacticChoice& home_tactic, const TacticChoice& away_tactic) {
  if (!truth.config.homogeneous()) {
    throw Error("analytic_outcome_probs: configuration has time, scoreline or lineup rate modifiers");
  }
  return poisson_outcome_grid(truth.expected_goals(home, away, home_tactic, away_tactic, Side::kHome),
                              truth.expected_goals(home, away, home_tactic, away_tactic, Side::kAway), 10);
}

League generate_league(const GeneratorConfig& config) {
  config.validate();
  League league;
  GroundTruth& truth = league.truth;
  truth.config = config;
  truth.formation_pool = config.formation_pool.empty() ? default_pool() : config.formation_pool;
  const int n = config.teams, k = config.styles;

  std::vector<TeamId> teams;
  for (int i = 0; i < n; ++i) teams.push_back(team_name(i));

  // Styles: balanced planted labels, features around separated centroids.
  Rng style_rng(derive_seed(config.seed, 1));
  truth.intra_stddev = 1.0;
  truth.centroids = plant_centroids(k, separation_ratio(config.separation), truth.intra_stddev, style_rng);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i % k;
  shuffle(labels, style_rng);
  for (int i = 0; i < n; ++i) {
    truth.styles[teams[i]] = labels[i];
    std::array<double, kStyleFeatureCount> raw{};
    for (int f = 0; f < kStyleFeatureCount; ++f) {
      const double unit = truth.centroids[labels[i]][f] + truth.intra_stddev * standard_normal(style_rng);
      raw[f] = kFeatureBase[f] + kFeatureScale[f] * unit;
    }
    league.style_features.emplace_back(teams[i], StyleFeatures::from_array(raw));
  }

  Rng strength_rng(derive_seed(config.seed, 2));
  {
    std::vector<double> la(n), ld(n);
    double ma = 0.0, md = 0.0;
    for (int i = 0; i < n; ++i) {
      la[i] = config.strength_spread * standard_normal(strength_rng);
      ld[i] = config.strength_spread * standard_normal(strength_rng);
      ma += la[i] / n;
      md += ld[i] / n;
    }
    for (int i = 0; i < n; ++i) truth.strengths[teams[i]] = {std::exp(la[i] - ma), std::exp(ld[i] - md)};
  }
  if (config.style_interaction.empty()) {
    truth.style_interaction.assign(k, std::vector<double>(k, 1.0));
    for (auto& row : truth.style_interaction) {
      for (auto& v : row) v = std::exp(config.interaction_spread * standard_normal(strength_rng));
    }
  } else {
    truth.style_interaction = config.style_interaction;
  }
  for (std::size_t i = 0; i < truth.formation_pool.size(); ++i) {
    truth.formation_quality.push_back(standard_normal(strength_rng));
  }

  Rng squad_rng(derive_seed(config.seed, 3));
  std::map<TeamId, std::vector<PlayerProfile>> squads;
  for (const auto& t : teams) {
    int idx = 0;
    for (const auto& [pos, count] : {std::pair{Position::kGK, kSquadGK}, std::pair{Position::kDEF, kSquadDEF},
                                     std::pair{Position::kMID, kSquadMID}, std::pair{Position::kFWD, kSquadFWD}}) {
      for (int c = 0; c < count; ++c) {
        const double v = uniform(squad_rng, config.contribution_mean - config.contribution_spread,
                                 config.contribution_mean + config.contribution_spread);
        PlayerProfile p{player_name(t, idx++), t, pos, std::clamp(v, 0.0, 1.0)};
        squads[t].push_back(p);
        league.players.push_back(p);
      }
    }
  }
  const Roster roster = make_roster(league.players);

  Rng habit_rng(derive_seed(config.seed, 4));
  const auto& pool = truth.formation_pool;
  for (const auto& t : teams) {
    auto& fav = truth.favorites[t];
    for (int s = 0; s < k; ++s) fav.push_back(pool[uniform_index(habit_rng, pool.size())]);
  }

  Rng sub_rng(derive_seed(config.seed, 5));
  const auto pairs = round_robin(n);
  const int rounds_per_leg = n % 2 == 0 ? n - 1 : n;
  const std::size_t per_round = pairs.size() / static_cast<std::size_t>(rounds_per_leg);
  std::map<TeamId, std::optional<Formation>> last;
  std::map<TeamId, int> played;
  std::vector<MatchRecord> fixtures;

  auto pick_formation = [&](const TeamId& team, const TeamId& opponent) {
    const int opp_style = truth.styles.at(opponent);
    const Formation& fav = truth.favorites.at(team)[opp_style];
    Formation f;
    if (uniform01(habit_rng) < config.habit_follow) {
      switch (config.habit) {
        case HabitKind::kFavoritePerStyle: f = fav; break;
        case HabitKind::kRepeatLast: f = last[team].value_or(fav); break;
        case HabitKind::kAlternate: {
          const auto base = static_cast<std::size_t>(std::find(pool.begin(), pool.end(), fav) - pool.begin());
          f = pool[(base + static_cast<std::size_t>(played[team])) % pool.size()];
          break;
        }
      }
    } else {
      f = pool[uniform_index(habit_rng, pool.size())];
    }
    last[team] = f;
    ++played[team];
    return f;
  };

  auto script_substitutions = [&](MatchRecord& m, Side side) {
    const auto count = static_cast<int>(sample_weighted(sub_rng, config.substitution_weights));
    std::vector<double> minutes;
    for (int i = 0; i < count; ++i) {
      minutes.push_back(std::round(uniform(sub_rng, config.substitution_window_start, config.substitution_window_end)));
    }
    std::sort(minutes.begin(), minutes.end());
    std::vector<PlayerId> incoming = m.bench(side);
    shuffle(incoming, sub_rng);
    incoming.resize(static_cast<std::size_t>(count));
    std::size_t i = 0;
    while (i < minutes.size()) {
      std::size_t j = i;
      SubstitutionAction action;
      while (j < minutes.size() && minutes[j] == minutes[i]) action.swaps.emplace_back(incoming[j++], PlayerId{});
      // Bench order, as in enumerate_actions, so the pairing matches the
      // enumerated action with the same incoming players.
      const auto& bench = m.bench(side);
      auto bench_pos = [&](const PlayerId& id) { return std::find(bench.begin(), bench.end(), id) - bench.begin(); };
      std::sort(action.swaps.begin(), action.swaps.end(),
                [&](const auto& x, const auto& y) { return bench_pos(x.first) < bench_pos(y.first); });
      const auto strategy = strategy_at(m, side, minutes[i], roster, false);
      for (const auto& [in, out] : assign_outgoing(action, strategy).swaps) {
        m.substitutions.push_back({minutes[i], side, in, out});
      }
      i = j;
    }
  };

  for (int season = 0; season < config.seasons; ++season) {
    for (int leg = 0; leg < 2; ++leg) {
      for (int r = 0; r < rounds_per_leg; ++r) {
        const int round = season * 2 * rounds_per_leg + leg * rounds_per_leg + r + 1;
        for (std::size_t p = 0; p < per_round; ++p) {
          auto [a, b] = pairs[static_cast<std::size_t>(r) * per_round + p];
          if (leg == 1) std::swap(a, b);
          MatchRecord m;
          m.round = round;
          m.home_team = teams[a];
          m.away_team = teams[b];
          const Formation fh = pick_formation(m.home_team, m.away_team);
          const Formation fa = pick_formation(m.away_team, m.home_team);
          m.home_tactic = {fh, truth.styles.at(m.home_team), {}};
          m.away_tactic = {fa, truth.styles.at(m.away_team), {}};
          std::tie(m.home_lineup, m.home_bench) = select_lineup(squads.at(m.home_team), fh);
          std::tie(m.away_lineup, m.away_bench) = select_lineup(squads.at(m.away_team), fa);
          script_substitutions(m, Side::kHome);
          script_substitutions(m, Side::kAway);
          std::stable_sort(m.substitutions.begin(), m.substitutions.end(),
                           [](const Substitution& x, const Substitution& y) { return x.minute < y.minute; });
          fixtures.push_back(std::move(m));
        }
      }
    }
  }

  league.matches = simulate_batch(truth, roster, fixtures, derive_seed(config.seed, 6));
  for (const auto& m : league.matches) validate_match(m);
  return league;
}

void to_json(json& j, const GeneratorConfig& c) {
  j = json{{"teams", c.teams},
           {"styles", c.styles},
           {"separation", std::string(to_string(c.separation))},
           {"seasons", c.seasons},
           {"seed", c.seed},
           {"base_rate", c.base_rate},
           {"home_advantage", c.home_advantage},
           {"strength_spread", c.strength_spread},
           {"away_rate_scale", c.away_rate_scale},
           {"style_interaction", c.style_interaction},
           {"interaction_spread", c.interaction_spread},
           {"formation_effect", c.formation_effect},
           {"formation_pool", c.formation_pool},
           {"habit", std::string(to_string(c.habit))},
           {"habit_follow", c.habit_follow},
           {"late_inflation", c.late_inflation},
           {"trailing_boost", c.trailing_boost},
           {"contribution_effect", c.contribution_effect},
           {"contribution_mean", c.contribution_mean},
           {"contribution_spread", c.contribution_spread},
           {"substitution_weights", c.substitution_weights},
           {"substitution_window_start", c.substitution_window_start},
           {"substitution_window_end", c.substitution_window_end},
           {"regulation", c.clock.regulation},
           {"injury_time", c.clock.injury_time}};
}

void from_json(const json& j, GeneratorConfig& c) {
  c.teams = j.at("teams").get<int>();
  c.styles = j.at("styles").get<int>();
  c.separation = parse_separation(j.at("separation").get<std::string>());
  c.seasons = j.at("seasons").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.base_rate = j.at("base_rate").get<double>();
  c.home_advantage = j.at("home_advantage").get<double>();
  c.strength_spread = j.at("strength_spread").get<double>();
  c.away_rate_scale = j.at("away_rate_scale").get<double>();
  c.style_interaction = j.at("style_interaction").get<std::vector<std::vector<double>>>();
  c.interaction_spread = j.at("interaction_spread").get<double>();
  c.formation_effect = j.at("formation_effect").get<double>();
  c.formation_pool = j.at("formation_pool").get<std::vector<Formation>>();
  c.habit = parse_habit(j.at("habit").get<std::string>());
  c.habit_follow = j.at("habit_follow").get<double>();
  c.late_inflation = j.at("late_inflation").get<double>();
  c.trailing_boost = j.at("trailing_boost").get<double>();
  c.contribution_effect = j.at("contribution_effect").get<double>();
  c.contribution_mean = j.at("contribution_mean").get<double>();
  c.contribution_spread = j.at("contribution_spread").get<double>();
  c.substitution_weights = j.at("substitution_weights").get<std::vector<double>>();
  c.substitution_window_start = j.at("substitution_window_start").get<double>();
  c.substitution_window_end = j.at("substitution_window_end").get<double>();
  c.clock.regulation = j.at("regulation").get<double>();
  c.clock.injury_time = j.at("injury_time").get<double>();
}

void to_json(json& j, const GroundTruth& t) {
  json strengths = json::array();
  for (const auto& [id, r] : t.strengths) strengths.push_back({{"id", id}, {"attack", r.attack}, {"defense", r.defense}});
  json favorites = json::object();
  for (const auto& [id, f] : t.favorites) favorites[id] = f;
  j = json{{"config", t.config},
           {"styles", t.styles},
           {"strengths", strengths},
           {"style_interaction", t.style_interaction},
           {"formation_pool", t.formation_pool},
           {"formation_quality", t.formation_quality},
           {"favorites", favorites},
           {"centroids", t.centroids},
           {"intra_stddev", t.intra_stddev}};
}

void from_json(const json& j, GroundTruth& t) {
  t.config = j.at("config").get<GeneratorConfig>();
  t.styles = j.at("styles").get<std::map<TeamId, int>>();
  t.strengths.clear();
  for (const auto& s : j.at("strengths")) {
    t.strengths[s.at("id").get<std::string>()] = {s.at("attack").get<double>(), s.at("defense").get<double>()};
  }
  t.style_interaction = j.at("style_interaction").get<std::vector<std::vector<double>>>();
  t.formation_pool = j.at("formation_pool").get<std::vector<Formation>>();
  t.formation_quality = j.at("formation_quality").get<std::vector<double>>();
  t.favorites.clear();
  for (const auto& [id, f] : j.at("favorites").items()) t.favorites[id] = f.get<std::vector<Formation>>();
  t.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
  t.intra_stddev = j.at("intra_stddev").get<double>();
}

}  // namespace tactics
