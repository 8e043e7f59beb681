#include "tactics/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "tactics/error.hpp"
#include "tactics/league.hpp"
#include "tactics/rng.hpp"

namespace tactics {

bool closeness(const Formation& recommended, const Formation& actual) {
  const int d = formation_distance(recommended, actual);
  return d == 0 || d == 2;
}

ClassificationMetrics classification_metrics(std::span<const int> truth, std::span<const int> predicted) {
  TACTICS_CHECK(truth.size() == predicted.size(), "classification_metrics: size mismatch");
  ClassificationMetrics m;
  if (truth.empty()) return m;
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(predicted.begin(), predicted.end());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (predicted[i] == c && truth[i] == c) ++tp;
      if (predicted[i] == c && truth[i] != c) ++fp;
      if (predicted[i] != c && truth[i] == c) ++fn;
    }
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.precision += p;
    m.recall += r;
    m.f1 += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  const auto n = static_cast<double>(classes.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

CrossvalReport crossval_metrics(std::span<const int> labels, const FitPredict& fit_predict,
                                const CrossvalConfig& config) {
  TACTICS_CHECK(config.folds >= 1, "crossval: need at least one fold");
  TACTICS_CHECK(config.train_fraction > 0.0 && config.train_fraction < 1.0, "crossval: train fraction must be in (0,1)");
  TACTICS_CHECK(labels.size() >= static_cast<std::size_t>(config.folds), "crossval: fewer rows than folds");
  CrossvalReport report;
  report.seed = config.seed;
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [c, idx] : by_class) {
    if (idx.size() < 2) report.flagged_classes.push_back(c);
  }

  for (int f = 0; f < config.folds; ++f) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(f)));
    std::vector<std::size_t> train, test;
    for (auto [c, idx] : by_class) {
      shuffle(idx, rng);
      auto n_train = static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(idx.size())));
      n_train = std::clamp<std::size_t>(n_train, 1, idx.size());
      train.insert(train.end(), idx.begin(), idx.begin() + static_cast<long>(n_train));
      test.insert(test.end(), idx.begin() + static_cast<long>(n_train), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());

    FoldResult fold;
    fold.train_size = train.size();
    fold.test_size = test.size();
    std::map<int, std::size_t> counts;
    for (auto i : train) ++counts[labels[i]];
    int majority = counts.begin()->first;
    for (const auto& [c, n] : counts) {
      if (n > counts[majority]) majority = c;
    }
    if (!test.empty()) {
      const auto predicted = fit_predict(train, test);
      TACTICS_CHECK(predicted.size() == test.size(), "crossval: trainer returned the wrong number of predictions");
      std::vector<int> truth;
      std::size_t hits = 0;
      for (auto i : test) {
        truth.push_back(labels[i]);
        hits += labels[i] == majority;
      }
      fold.metrics = classification_metrics(truth, predicted);
      fold.majority_baseline = static_cast<double>(hits) / static_cast<double>(test.size());
    }
    report.folds.push_back(fold);
  }
  const auto n = static_cast<double>(report.folds.size());
  for (const auto& f : report.folds) {
    report.mean.accuracy += f.metrics.accuracy / n;
    report.mean.precision += f.metrics.precision / n;
    report.mean.recall += f.metrics.recall / n;
    report.mean.f1 += f.metrics.f1 / n;
    report.majority_baseline += f.majority_baseline / n;
  }
  return report;
}

double two_proportion_p_value(double p1, std::size_t n1, double p2, std::size_t n2) {
  TACTICS_CHECK(n1 > 0 && n2 > 0, "two-proportion test needs non-empty samples");
  const double pooled = (p1 * static_cast<double>(n1) + p2 * static_cast<double>(n2)) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  if (!(se > 0.0)) return p1 == p2 ? 1.0 : 0.0;
  const double z = (p1 - p2) / se;
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

ModelProvider fixed_provider(std::shared_ptr<const ModelBundle> bundle) {
  return [bundle](int) { return bundle; };
}

WalkForwardProvider::WalkForwardProvider(std::vector<MatchRecord> matches, std::vector<PlayerProfile> players,
                                         StyleTable styles, FitConfig config, int warmup_rounds, int refit_every)
    : matches_(std::move(matches)),
      players_(std::move(players)),
      styles_(std::move(styles)),
      config_(std::move(config)),
      warmup_(warmup_rounds),
      refit_every_(refit_every) {
  TACTICS_CHECK(warmup_rounds >= 1, "walk-forward: warmup must cover at least one round");
  TACTICS_CHECK(refit_every >= 1, "walk-forward: refit interval must be positive");
}

std::optional<int> WalkForwardProvider::cutoff(int round) const {
  if (round <= warmup_) return std::nullopt;
  return warmup_ + ((round - warmup_ - 1) / refit_every_) * refit_every_;
}

std::shared_ptr<const ModelBundle> WalkForwardProvider::operator()(int round) {
  const auto c = cutoff(round);
  if (!c) return nullptr;
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(*c);
  if (it != cache_.end()) return it->second;
  std::vector<MatchRecord> train;
  for (const auto& m : matches_) {
    if (m.round <= *c) train.push_back(m);
  }
  if (train.empty()) return nullptr;
  auto bundle = std::make_shared<const ModelBundle>(fit_bundle(train, players_, styles_, config_));
  cache_.emplace(*c, bundle);
  return bundle;
}

namespace {

std::vector<MatchRecord> by_round(const std::vector<MatchRecord>& matches) {
  std::vector<MatchRecord> sorted = matches;
  std::stable_sort(sorted.begin(), sorted.end(), [](const MatchRecord& a, const MatchRecord& b) { return a.round < b.round; });
  return sorted;
}

std::shared_ptr<const ModelBundle> models_for(const ModelProvider& provider, int round) {
  auto m = provider(round);
  if (m && m->trained_through_round >= round) {
    throw Error("walk-forward violation: models trained through round " + std::to_string(m->trained_through_round) +
                " consulted for round " + std::to_string(round));
  }
  return m;
}

void note_version(ReplayReport& r, const ModelBundle& b) {
  if (std::find(r.model_versions.begin(), r.model_versions.end(), b.version) == r.model_versions.end()) {
    r.model_versions.push_back(b.version);
    r.trained_through_rounds.push_back(b.trained_through_round);
  }
}

int side_result(const MatchRecord& m, Side side) {
  const int d = m.score(side) - m.score(opposite(side));
  return d > 0 ? 0 : d == 0 ? 1 : 2;
}

}  // namespace

ReplayReport replay_prematch(const std::vector<MatchRecord>& matches, const ModelProvider& provider, Approach approach,
                             const ReplayConfig& config) {
  ReplayReport report;
  report.stage = "prematch";
  report.approach = std::string(to_string(approach));
  report.matches = matches.size();
  const auto sorted = by_round(matches);

  std::shared_ptr<const ModelBundle> current;
  std::vector<MatchRecord> relabelled;
  for (std::size_t begin = 0; begin < sorted.size();) {
    const int round = sorted[begin].round;
    std::size_t end = begin;
    while (end < sorted.size() && sorted[end].round == round) ++end;
    const auto models = models_for(provider, round);
    if (models) {
      if (models != current) {
        current = models;
        relabelled = relabel_styles(sorted, models->prematch.clusters);
        note_version(report, *models);
      }
      const std::vector<MatchRecord> history(relabelled.begin(), relabelled.begin() + static_cast<long>(begin));
      const auto& pm = models->prematch;
      for (std::size_t i = begin; i < end; ++i) {
        const auto& m = relabelled[i];
        ++report.replayed_matches;
        for (Side side : {Side::kHome, Side::kAway}) {
          BayesianGameConfig game;
          game.models = &pm;
          game.our_team = m.team(side);
          game.opp_team = m.team(opposite(side));
          game.venue = side;
          game.history = history;
          game.exec = config.exec;
          const auto rec = recommend_prematch(game, approach);

          const auto table = build_payoff_table(pm.net, pm.strengths, pm.clusters.k, game.our_team, game.opp_team,
                                                {rec.choice, m.tactic(side)}, {m.tactic(opposite(side))}, side,
                                                Exec::kSerial);
          PrematchDecision d;
          d.round = round;
          d.team = game.our_team;
          d.opponent = game.opp_team;
          d.side = side;
          d.recommended = rec.choice;
          d.actual = m.tactic(side);
          d.close = closeness(rec.choice.formation, d.actual.formation);
          d.result = side_result(m, side);
          d.payoff_recommended = table.cell(0, 0).our_payoff();
          d.payoff_actual = table.cell(1, 0).our_payoff();
          d.win_recommended = table.cell(0, 0).ours.p_home;
          d.win_actual = table.cell(1, 0).ours.p_home;
          d.model_version = models->version;
          report.prematch.push_back(std::move(d));
        }
      }
    }
    begin = end;
  }
  report.decisions = report.prematch.size();
  return report;
}

namespace {

bool same_players(const SubstitutionAction& a, const SubstitutionAction& b) {
  std::set<PlayerId> ai, ao, bi, bo;
  for (const auto& [i, o] : a.swaps) {
    ai.insert(i);
    ao.insert(o);
  }
  for (const auto& [i, o] : b.swaps) {
    bi.insert(i);
    bo.insert(o);
  }
  return ai == bi && ao == bo;
}

bool position_similar(const SubstitutionAction& a, const SubstitutionAction& b, const Roster& roster) {
  if (a.size() != b.size()) return false;
  std::multiset<Position> pa, pb;
  for (const auto& [i, o] : a.swaps) pa.insert(roster.at(i).position);
  for (const auto& [i, o] : b.swaps) pb.insert(roster.at(i).position);
  return pa == pb;
}

}  // namespace

ReplayReport replay_inmatch(const std::vector<MatchRecord>& matches, const std::vector<PlayerProfile>& players,
                            const ModelProvider& provider, InMatchApproach approach, const ReplayConfig& config) {
  ReplayReport report;
  report.stage = "inmatch";
  report.approach = std::string(to_string(approach));
  report.matches = matches.size();
  const Roster roster = make_roster(players);
  const auto sorted = by_round(matches);
  const auto objective = objective_of(approach);

  std::map<std::pair<int, int>, HeatmapCell> heat;
  std::shared_ptr<const ModelBundle> current;
  std::vector<MatchRecord> relabelled;
  for (std::size_t idx = 0; idx < sorted.size(); ++idx) {
    const int round = sorted[idx].round;
    const auto models = models_for(provider, round);
    if (!models) continue;
    if (!models->bank) throw Error("replay_inmatch: model bundle has no transition bank");
    if (models != current) {
      current = models;
      relabelled = relabel_styles(sorted, models->prematch.clusters);
      note_version(report, *models);
    }
    const auto& bank = *models->bank;
    const auto& m = relabelled[idx];
    ++report.replayed_matches;

    // Decision points: each (minute, side) with at least one real substitution.
    std::vector<std::pair<double, Side>> points;
    for (const auto& s : m.substitutions) {
      std::pair<double, Side> p{s.minute, s.side};
      if (std::find(points.begin(), points.end(), p) == points.end()) points.push_back(p);
    }
    std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
      return a.first < b.first || (a.first == b.first && a.second == Side::kHome && b.second == Side::kAway);
    });
    for (const auto& [minute, side] : points) {
      GameState state;
      state.minute = minute;
      for (const auto& g : m.goals) {
        if (g.minute < minute) (g.side == Side::kHome ? state.home_goals : state.away_goals)++;
      }
      MatchStrategies strategies{strategy_at(m, Side::kHome, minute, roster, false),
                                 strategy_at(m, Side::kAway, minute, roster, false)};
      SubstitutionAction actual;
      for (const auto& s : m.substitutions) {
        if (s.minute == minute && s.side == side) actual.swaps.emplace_back(s.player_in, s.player_out);
      }
      const double remaining = std::max(0.0, config.clock.total() - minute);
      const auto choice = choose_action(bank, state, strategies, side, remaining, approach, config.exec);

      InMatchDecision d;
      d.round = round;
      d.team = m.team(side);
      d.side = side;
      d.minute = minute;
      d.state = state;
      d.actual = actual;
      d.recommended = choice.action;
      d.same = same_players(actual, choice.action);
      d.position_similar = position_similar(actual, choice.action, roster);
      d.payoff_actual = action_payoff(bank, state, actual, strategies, side, remaining, objective);
      d.payoff_recommended = choice.payoff;
      d.payoff_empty = choice.payoffs.front();
      d.model_version = models->version;
      report.inmatch.push_back(std::move(d));
    }

    for (const auto& row : transition_rows({m}, bank.strengths, roster, bank.spec, config.heatmap_row_step)) {
      const int h = std::min(row.state.home_goals, bank.scoreline_cap + 1);
      const int a = std::min(row.state.away_goals, bank.scoreline_cap + 1);
      auto& cell = heat[{h, a}];
      cell.home_goals = h;
      cell.away_goals = a;
      ++cell.rows;
      const auto& clf = bank.model_for(row.state.home_goals, row.state.away_goals);
      cell.correct += clf.predict(row.x) == static_cast<int>(row.label);
    }
  }
  for (const auto& [key, cell] : heat) report.heatmap.push_back(cell);
  report.decisions = report.inmatch.size();
  return report;
}

namespace {

json mean_or_null(double sum, std::size_t n) { return n == 0 ? json(nullptr) : json(sum / static_cast<double>(n)); }
json percent_or_null(std::size_t k, std::size_t n) {
  return n == 0 ? json(nullptr) : json(100.0 * static_cast<double>(k) / static_cast<double>(n));
}

json prematch_slice(const std::vector<const PrematchDecision*>& ds) {
  std::size_t close = 0;
  std::array<std::size_t, 3> results{};
  double delta = 0, pr = 0, pa = 0, wr = 0, wa = 0;
  for (const auto* d : ds) {
    if (d->close) {
      ++close;
      ++results[static_cast<std::size_t>(d->result)];
    }
    delta += d->payoff_recommended - d->payoff_actual;
    pr += d->payoff_recommended;
    pa += d->payoff_actual;
    wr += d->win_recommended;
    wa += d->win_actual;
  }
  const std::size_t n = ds.size();
  json j{{"decisions", n},
         {"close", close},
         {"closeness_rate", percent_or_null(close, n)},
         {"close_results",
          {{"win", percent_or_null(results[0], close)},
           {"draw", percent_or_null(results[1], close)},
           {"loss", percent_or_null(results[2], close)}}},
         {"mean_payoff_delta", mean_or_null(delta, n)},
         {"mean_payoff_recommended", mean_or_null(pr, n)},
         {"mean_payoff_actual", mean_or_null(pa, n)},
         {"mean_win_recommended", mean_or_null(wr, n)},
         {"mean_win_actual", mean_or_null(wa, n)}};
  if (n > 0) {
    j["win_boost_percent"] = wa > 0 ? json(100.0 * (wr - wa) / wa) : json(nullptr);
    j["p_value"] = two_proportion_p_value(wr / static_cast<double>(n), n, wa / static_cast<double>(n), n);
  } else {
    j["win_boost_percent"] = nullptr;
    j["p_value"] = nullptr;
  }
  return j;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string action_text(const SubstitutionAction& a) {
  std::string s;
  for (const auto& [in, out] : a.swaps) {
    if (!s.empty()) s += ';';
    s += in + ">" + out;
  }
  return s;
}

}  // namespace

json report_summary(const ReplayReport& r) {
  if (r.stage == "prematch") {
    std::vector<const PrematchDecision*> all, home, away;
    for (const auto& d : r.prematch) {
      all.push_back(&d);
      (d.side == Side::kHome ? home : away).push_back(&d);
    }
    json j = prematch_slice(all);
    j["home"] = prematch_slice(home);
    j["away"] = prematch_slice(away);
    j["close_results_basis"] = "per deciding side";
    return j;
  }
  std::size_t same = 0, similar = 0, dominated = 0;
  double pa = 0, pr = 0, pe = 0;
  for (const auto& d : r.inmatch) {
    same += d.same;
    similar += d.position_similar;
    dominated += d.payoff_recommended >= d.payoff_actual;
    pa += d.payoff_actual;
    pr += d.payoff_recommended;
    pe += d.payoff_empty;
  }
  const std::size_t n = r.inmatch.size();
  json j{{"decisions", n},
         {"same_decision_rate", percent_or_null(same, n)},
         {"position_similar_rate", percent_or_null(similar, n)},
         {"recommended_at_least_actual", dominated},
         {"mean_payoff_actual", mean_or_null(pa, n)},
         {"mean_payoff_recommended", mean_or_null(pr, n)},
         {"mean_payoff_empty", mean_or_null(pe, n)}};
  j["payoff_boost_percent"] = n > 0 && pa > 0 ? json(100.0 * (pr - pa) / pa) : json(nullptr);
  std::size_t rows = 0, correct = 0;
  for (const auto& c : r.heatmap) {
    rows += c.rows;
    correct += c.correct;
  }
  j["transition_accuracy"] = rows == 0 ? json(nullptr) : json(static_cast<double>(correct) / static_cast<double>(rows));
  return j;
}

json report_json(const ReplayReport& r) {
  return json{{"stage", r.stage},
              {"approach", r.approach},
              {"matches", r.matches},
              {"replayed_matches", r.replayed_matches},
              {"decisions", r.decisions},
              {"model_versions", r.model_versions},
              {"trained_through_rounds", r.trained_through_rounds},
              {"summary", report_summary(r)}};
}

std::string report_csv(const ReplayReport& r) {
  std::ostringstream out;
  if (r.stage == "prematch") {
    out << "round,team,opponent,side,recommended,actual,close,result,payoff_recommended,payoff_actual,"
           "win_recommended,win_actual,model_version\n";
    static const char* kResult[] = {"win", "draw", "loss"};
    for (const auto& d : r.prematch) {
      out << d.round << ',' << d.team << ',' << d.opponent << ',' << to_string(d.side) << ',' << d.recommended.label()
          << ',' << d.actual.label() << ',' << (d.close ? 1 : 0) << ',' << kResult[d.result] << ','
          << num(d.payoff_recommended) << ',' << num(d.payoff_actual) << ',' << num(d.win_recommended) << ','
          << num(d.win_actual) << ',' << d.model_version << '\n';
    }
  } else {
    out << "round,team,side,minute,home_goals,away_goals,actual,recommended,same,position_similar,payoff_actual,"
           "payoff_recommended,payoff_empty,model_version\n";
    for (const auto& d : r.inmatch) {
      out << d.round << ',' << d.team << ',' << to_string(d.side) << ',' << num(d.minute) << ',' << d.state.home_goals
          << ',' << d.state.away_goals << ',' << action_text(d.actual) << ',' << action_text(d.recommended) << ','
          << (d.same ? 1 : 0) << ',' << (d.position_similar ? 1 : 0) << ',' << num(d.payoff_actual) << ','
          << num(d.payoff_recommended) << ',' << num(d.payoff_empty) << ',' << d.model_version << '\n';
    }
  }
  return out.str();
}

std::string heatmap_csv(const ReplayReport& r) {
  std::ostringstream out;
  out << "home_goals,away_goals,rows,accuracy\n";
  for (const auto& c : r.heatmap) {
    out << c.home_goals << ',' << c.away_goals << ',' << c.rows << ','
        << (c.rows ? num(static_cast<double>(c.correct) / static_cast<double>(c.rows)) : std::string()) << '\n';
  }
  return out.str();
}

json crossval_json(const CrossvalReport& r) {
  auto metrics = [](const ClassificationMetrics& m) {
    return json{{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  };
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"metrics", metrics(f.metrics)},
                     {"majority_baseline", f.majority_baseline},
                     {"train_size", f.train_size},
                     {"test_size", f.test_size}});
  }
  return json{{"folds", folds},
              {"mean", metrics(r.mean)},
              {"majority_baseline", r.majority_baseline},
              {"flagged_classes", r.flagged_classes},
              {"seed", r.seed}};
}

}  // namespace tactics
