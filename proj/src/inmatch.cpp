#include "tactics/inmatch.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tactics/error.hpp"

namespace tactics {

void TransitionDistribution::validate(double tol) const {
  for (double p : {p_home_goal, p_away_goal, p_no_goal}) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("transition probability outside [0,1]");
  }
  if (std::abs(sum() - 1.0) > tol) throw Error("transition distribution does not sum to 1");
}

double InMatchStrategy::mean_contribution() const {
  if (lineup.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : lineup) s += p.contribution;
  return s / static_cast<double>(lineup.size());
}

void InMatchStrategy::validate() const {
  if (lineup.size() != static_cast<std::size_t>(kLineupSize)) throw Error("strategy lineup must have 11 players");
  if (subs_remaining < 0 || subs_remaining > kMaxSubstitutions) throw Error("substitutions remaining outside [0,3]");
  std::set<PlayerId> seen;
  for (const auto& p : lineup) {
    if (!seen.insert(p.id).second) throw Error("player " + p.id + " appears twice");
  }
  for (const auto& p : bench) {
    if (!seen.insert(p.id).second) throw Error("player " + p.id + " appears twice");
  }
}

namespace {

const PlayerProfile& lookup(const Roster& roster, const PlayerId& id) {
  auto it = roster.find(id);
  if (it == roster.end()) throw NotFound("player '" + id + "' not in roster");
  return it->second;
}

}  // namespace

InMatchStrategy strategy_at(const MatchRecord& m, Side side, double minute, const Roster& roster, bool inclusive) {
  InMatchStrategy s;
  s.team = m.team(side);
  s.tactic = m.tactic(side);
  for (const auto& id : lineup_at(m, side, minute, inclusive)) s.lineup.push_back(lookup(roster, id));
  std::set<PlayerId> used;
  for (const auto& sub : m.substitutions) {
    if (sub.side != side) continue;
    if (sub.minute > minute || (!inclusive && sub.minute == minute)) continue;
    used.insert(sub.player_in);
  }
  for (const auto& id : m.bench(side)) {
    if (!used.count(id)) s.bench.push_back(lookup(roster, id));
  }
  s.subs_remaining = kMaxSubstitutions - static_cast<int>(used.size());
  return s;
}

std::vector<PlayerId> SubstitutionAction::incoming() const {
  std::vector<PlayerId> out;
  for (const auto& [in, o] : swaps) out.push_back(in);
  return out;
}

std::vector<SubstitutionAction> enumerate_actions(const std::vector<PlayerId>& bench, int subs_remaining) {
  TACTICS_CHECK(subs_remaining >= 0 && subs_remaining <= kMaxSubstitutions,
                "enumerate_actions: substitutions remaining must be in [0,3]");
  const std::size_t n = bench.size();
  const std::size_t max_k = std::min<std::size_t>(n, static_cast<std::size_t>(subs_remaining));
  std::vector<SubstitutionAction> out;
  out.push_back({});
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k <= max_k; ++k) {
    idx.resize(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      SubstitutionAction a;
      for (std::size_t i : idx) a.swaps.emplace_back(bench[i], PlayerId{});
      out.push_back(std::move(a));
      // Next k-combination in lexicographic order.
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return out;
}

SubstitutionAction assign_outgoing(const SubstitutionAction& action, const InMatchStrategy& strategy) {
  SubstitutionAction out;
  std::set<PlayerId> taken;
  for (const auto& [in_id, ignored] : action.swaps) {
    auto bench_it = std::find_if(strategy.bench.begin(), strategy.bench.end(),
                                 [&](const PlayerProfile& p) { return p.id == in_id; });
    if (bench_it == strategy.bench.end()) throw Error("substitute " + in_id + " is not on the bench");
    const PlayerProfile* pick = nullptr;
    auto consider = [&](bool same_position) {
      for (const auto& p : strategy.lineup) {
        if (taken.count(p.id)) continue;
        if (same_position ? p.position != bench_it->position : p.position == Position::kGK) continue;
        if (!pick || p.contribution < pick->contribution) pick = &p;
      }
    };
    consider(true);
    if (!pick) consider(false);
    if (!pick) throw Error("no outgoing player available for " + in_id);
    taken.insert(pick->id);
    out.swaps.emplace_back(in_id, pick->id);
  }
  return out;
}

std::vector<SubstitutionAction> legal_actions(const InMatchStrategy& strategy) {
  std::vector<PlayerId> bench;
  for (const auto& p : strategy.bench) bench.push_back(p.id);
  auto actions = enumerate_actions(bench, strategy.subs_remaining);
  for (auto& a : actions) a = assign_outgoing(a, strategy);
  return actions;
}

InMatchStrategy apply_action(const InMatchStrategy& strategy, const SubstitutionAction& action) {
  if (static_cast<int>(action.size()) > strategy.subs_remaining) {
    throw Error("illegal action: " + std::to_string(action.size()) + " substitutions with " +
                std::to_string(strategy.subs_remaining) + " remaining");
  }
  InMatchStrategy next = strategy;
  std::set<PlayerId> ins, outs;
  for (const auto& [in_id, out_id] : action.swaps) {
    if (!ins.insert(in_id).second || !outs.insert(out_id).second || ins.count(out_id) || outs.count(in_id)) {
      throw Error("illegal action: player appears twice");
    }
    auto b = std::find_if(next.bench.begin(), next.bench.end(), [&](const PlayerProfile& p) { return p.id == in_id; });
    if (b == next.bench.end()) throw Error("illegal action: " + in_id + " is not on the bench");
    auto l = std::find_if(next.lineup.begin(), next.lineup.end(), [&](const PlayerProfile& p) { return p.id == out_id; });
    if (l == next.lineup.end()) throw Error("illegal action: " + out_id + " is not on the pitch");
    *l = *b;
    next.bench.erase(b);
  }
  next.subs_remaining -= static_cast<int>(action.size());
  return next;
}

Point encode_transition_features(const InMatchStrategy& home, const InMatchStrategy& away,
                                 const OutcomeDistribution& strength, double remaining_time,
                                 const TransitionFeatureSpec& spec) {
  const auto k = static_cast<std::size_t>(spec.num_styles);
  Point x(2 * k + 6 + 3 + 3, 0.0);
  auto style_slot = [&](int s) {
    TACTICS_CHECK(s >= 0 && static_cast<std::size_t>(s) < k, "transition features: style out of range");
    return static_cast<std::size_t>(s);
  };
  x[style_slot(home.tactic.style)] = 1.0;
  x[k + style_slot(away.tactic.style)] = 1.0;
  std::size_t i = 2 * k;
  for (const auto* s : {&home, &away}) {
    x[i++] = s->tactic.formation.defenders / 10.0;
    x[i++] = s->tactic.formation.midfielders / 10.0;
    x[i++] = s->tactic.formation.forwards / 10.0;
  }
  x[i++] = strength.p_home;
  x[i++] = strength.p_draw;
  x[i++] = strength.p_away;
  x[i++] = std::clamp(remaining_time / spec.total_duration, 0.0, 1.0);
  x[i++] = home.mean_contribution();
  x[i++] = away.mean_contribution();
  return x;
}

std::vector<TransitionRow> transition_rows(const std::vector<MatchRecord>& matches, const StrengthModel& strengths,
                                           const Roster& roster, const TransitionFeatureSpec& spec,
                                           double row_step) {
  std::vector<TransitionRow> rows;
  const double total = spec.total_duration;
  for (const auto& m : matches) {
    const auto strength = outcome_probs(strengths, m.home_team, m.away_team);
    std::vector<GoalEvent> goals = m.goals;
    std::stable_sort(goals.begin(), goals.end(), [](const GoalEvent& a, const GoalEvent& b) { return a.minute < b.minute; });
    GameState state;
    double start = 0.0;
    for (std::size_t g = 0; g <= goals.size(); ++g) {
      const double end = g < goals.size() ? std::min(goals[g].minute, total) : total;
      const NextEvent label = g < goals.size()
                                  ? (goals[g].side == Side::kHome ? NextEvent::kHomeGoal : NextEvent::kAwayGoal)
                                  : NextEvent::kNoGoal;
      std::vector<double> times{start};
      if (row_step > 0) {
        for (double t = start + row_step; t < end; t += row_step) times.push_back(t);
      }
      for (const auto& s : m.substitutions) {
        if (s.minute > start && s.minute < end) times.push_back(s.minute);
      }
      std::sort(times.begin(), times.end());
      times.erase(std::unique(times.begin(), times.end()), times.end());
      for (double t : times) {
        if (t >= total) continue;
        const auto home = strategy_at(m, Side::kHome, t, roster, true);
        const auto away = strategy_at(m, Side::kAway, t, roster, true);
        GameState at = state;
        at.minute = t;
        rows.push_back({at, encode_transition_features(home, away, strength, total - t, spec), label, m.round});
      }
      if (g < goals.size()) {
        (goals[g].side == Side::kHome ? state.home_goals : state.away_goals)++;
        start = goals[g].minute;
      }
    }
  }
  return rows;
}

const RbfClassifier& StateModelBank::model_for(int home_goals, int away_goals) const {
  auto it = models.find({home_goals, away_goals});
  return it != models.end() ? it->second : overflow;
}

namespace {

const std::vector<std::string> kEventLabels{"home_goal", "away_goal", "no_goal"};

RbfClassifier fit_rows(const std::vector<const TransitionRow*>& rows, const RbfConfig& base) {
  std::vector<Point> xs;
  std::vector<int> ys;
  for (const auto* r : rows) {
    xs.push_back(r->x);
    ys.push_back(static_cast<int>(r->label));
  }
  RbfConfig cfg = base;
  cfg.n_centers = std::min<int>(cfg.n_centers, static_cast<int>(xs.size()));
  return train_rbf(xs, ys, kEventLabels, cfg);
}

}  // namespace

StateModelBank train_transition_bank(const std::vector<MatchRecord>& matches, const StrengthModel& strengths,
                                     const Roster& roster, int num_styles, const MatchClock& clock,
                                     const BankConfig& config) {
  StateModelBank bank;
  bank.scoreline_cap = config.scoreline_cap;
  bank.spec = TransitionFeatureSpec{num_styles, clock.total()};
  bank.strengths = strengths;
  const auto rows = transition_rows(matches, strengths, roster, bank.spec, config.row_step);
  if (rows.empty()) throw Error("train_transition_bank: no transition rows");

  std::vector<const TransitionRow*> all;
  std::map<std::pair<int, int>, std::vector<const TransitionRow*>> by_state;
  for (const auto& r : rows) {
    all.push_back(&r);
    if (r.state.home_goals <= config.scoreline_cap && r.state.away_goals <= config.scoreline_cap) {
      by_state[{r.state.home_goals, r.state.away_goals}].push_back(&r);
    }
  }
  bank.overflow = fit_rows(all, config.rbf);
  for (int h = 0; h <= config.scoreline_cap; ++h) {
    for (int a = 0; a <= config.scoreline_cap; ++a) {
      auto it = by_state.find({h, a});
      if (it == by_state.end() || static_cast<int>(it->second.size()) < config.min_rows) {
        bank.fallback_states.push_back(std::to_string(h) + "-" + std::to_string(a));
        continue;
      }
      bank.models.emplace(std::make_pair(h, a), fit_rows(it->second, config.rbf));
    }
  }
  return bank;
}

TransitionDistribution transition_probs(const StateModelBank& bank, const GameState& state,
                                        const InMatchStrategy& home, const InMatchStrategy& away,
                                        double remaining_time) {
  TACTICS_CHECK(remaining_time >= 0.0, "transition_probs: remaining time must be non-negative");
  if (remaining_time <= 0.0) return {0.0, 0.0, 1.0};
  const auto strength = outcome_probs(bank.strengths, home.team, away.team);
  const auto x = encode_transition_features(home, away, strength, remaining_time, bank.spec);
  const auto p = bank.model_for(state.home_goals, state.away_goals).predict_proba(x);
  return {p[0], p[1], p[2]};
}

Targets more_positive_targets(const GameState& state, Side side) {
  Targets t{state, state};
  (side == Side::kHome ? t.advance.home_goals : t.advance.away_goals)++;
  return t;
}

std::string_view to_string(InMatchApproach a) { return a == InMatchApproach::kAggressive ? "aggressive" : "reserved"; }

InMatchApproach parse_inmatch_approach(std::string_view s) {
  if (s == "aggressive") return InMatchApproach::kAggressive;
  if (s == "reserved") return InMatchApproach::kReserved;
  throw Error("unknown in-match approach '" + std::string(s) + "'");
}

double action_payoff(const StateModelBank& bank, const GameState& state, const SubstitutionAction& action,
                     const MatchStrategies& strategies, Side our_side, double remaining_time, Objective objective) {
  MatchStrategies next = strategies;
  next.side(our_side) = apply_action(strategies.side(our_side), action);
  const auto d = transition_probs(bank, state, next.home, next.away, remaining_time);
  return objective == Objective::kAdvance ? d.goal(our_side) : d.p_no_goal;
}

ActionChoice choose_action(const StateModelBank& bank, const GameState& state, const MatchStrategies& strategies,
                           Side our_side, double remaining_time, InMatchApproach approach, Exec exec) {
  ActionChoice c;
  c.actions = legal_actions(strategies.side(our_side));
  const auto objective = objective_of(approach);
  c.payoffs = exec == Exec::kParallel
                  ? kernels::action_payoffs_omp(bank, state, c.actions, strategies, our_side, remaining_time, objective)
                  : kernels::action_payoffs_serial(bank, state, c.actions, strategies, our_side, remaining_time,
                                                   objective);
  // Enumeration order is by size, so the first maximum also has the fewest
  // substitutions among the tied actions.
  for (std::size_t i = 1; i < c.payoffs.size(); ++i) {
    if (c.payoffs[i] > c.payoffs[c.index]) c.index = i;
  }
  c.action = c.actions[c.index];
  c.payoff = c.payoffs[c.index];
  return c;
}

void to_json(json& j, const TransitionDistribution& d) {
  j = json{{"p_home_goal", d.p_home_goal}, {"p_away_goal", d.p_away_goal}, {"p_no_goal", d.p_no_goal}};
}

void to_json(json& j, const SubstitutionAction& a) {
  j = json::array();
  for (const auto& [in, out] : a.swaps) j.push_back({{"player_in", in}, {"player_out", out}});
}

void to_json(json& j, const InMatchStrategy& s) {
  j = json{{"team", s.team}, {"tactic", s.tactic}, {"lineup", s.lineup}, {"bench", s.bench},
           {"subs_remaining", s.subs_remaining}};
}

void from_json(const json& j, InMatchStrategy& s) {
  s.team = j.at("team").get<std::string>();
  s.tactic = j.at("tactic").get<TacticChoice>();
  s.lineup = j.at("lineup").get<std::vector<PlayerProfile>>();
  s.bench = j.at("bench").get<std::vector<PlayerProfile>>();
  s.subs_remaining = j.at("subs_remaining").get<int>();
}

void to_json(json& j, const StateModelBank& b) {
  json states = json::object();
  for (const auto& [key, clf] : b.models) states[std::to_string(key.first) + "-" + std::to_string(key.second)] = clf;
  j = json{{"states", states},
           {"overflow", b.overflow},
           {"scoreline_cap", b.scoreline_cap},
           {"num_styles", b.spec.num_styles},
           {"total_duration", b.spec.total_duration},
           {"strengths", b.strengths},
           {"fallback_states", b.fallback_states}};
}

void from_json(const json& j, StateModelBank& b) {
  b.models.clear();
  for (const auto& [key, value] : j.at("states").items()) {
    GameState s;
    const auto dash = key.find('-');
    if (dash == std::string::npos) throw Error("transition bank: malformed state key '" + key + "'");
    b.models.emplace(std::make_pair(std::stoi(key.substr(0, dash)), std::stoi(key.substr(dash + 1))),
                     value.get<RbfClassifier>());
  }
  b.overflow = j.at("overflow").get<RbfClassifier>();
  b.scoreline_cap = j.at("scoreline_cap").get<int>();
  b.spec.num_styles = j.at("num_styles").get<int>();
  b.spec.total_duration = j.at("total_duration").get<double>();
  b.strengths = j.at("strengths").get<StrengthModel>();
  b.fallback_states = j.value("fallback_states", std::vector<std::string>{});
}

json action_choice_json(const ActionChoice& c, InMatchApproach approach, const std::string& model_version) {
  json actions = json::array();
  for (std::size_t i = 0; i < c.actions.size(); ++i) {
    actions.push_back({{"index", i}, {"swaps", c.actions[i]}, {"payoff", c.payoffs[i]}});
  }
  return json{{"approach", std::string(to_string(approach))},
              {"recommended", {{"index", c.index}, {"swaps", c.action}, {"payoff", c.payoff}}},
              {"actions", actions},
              {"model_version", model_version}};
}

}  // namespace tactics
