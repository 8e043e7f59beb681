#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tactics/bundle.hpp"

namespace tactics {

// Equal formations, or one player moved between two lines.
bool closeness(const Formation& recommended, const Formation& actual);

struct ClassificationMetrics {
  double accuracy = 0.0;
  // Macro averages over the classes present in the truth or the prediction.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

ClassificationMetrics classification_metrics(std::span<const int> truth, std::span<const int> predicted);

struct CrossvalConfig {
  int folds = 10;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

struct FoldResult {
  ClassificationMetrics metrics;
  double majority_baseline = 0.0;  // accuracy of the training fold's most frequent class
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

struct CrossvalReport {
  std::vector<FoldResult> folds;
  ClassificationMetrics mean;
  double majority_baseline = 0.0;
  // Classes with a single row, which cannot appear on both sides of a split.
  std::vector<int> flagged_classes;
  std::uint64_t seed = 0;
};

// Trains on the `train` row indices and returns one prediction per `test` index.
using FitPredict =
    std::function<std::vector<int>(const std::vector<std::size_t>& train, const std::vector<std::size_t>& test)>;

// `folds` repetitions of a seeded stratified shuffle-split. Every class keeps
// at least one training row.
CrossvalReport crossval_metrics(std::span<const int> labels, const FitPredict& fit_predict,
                                const CrossvalConfig& config = {});

// Two-sided p-value of the pooled two-proportion z-test.
double two_proportion_p_value(double p1, std::size_t n1, double p2, std::size_t n2);

// Models to consult for a round; nullptr when none are available yet.
using ModelProvider = std::function<std::shared_ptr<const ModelBundle>(int round)>;

ModelProvider fixed_provider(std::shared_ptr<const ModelBundle> bundle);

// Refits on every match before a cutoff. Rounds up to `warmup_rounds` get no
// models; afterwards the cutoff advances every `refit_every` rounds.
class WalkForwardProvider {
 public:
  WalkForwardProvider(std::vector<MatchRecord> matches, std::vector<PlayerProfile> players, StyleTable styles,
                      FitConfig config, int warmup_rounds, int refit_every);

  std::shared_ptr<const ModelBundle> operator()(int round);
  // Last training round for `round`, or nullopt during warmup.
  std::optional<int> cutoff(int round) const;
  std::size_t fits() const { return cache_.size(); }

 private:
  std::vector<MatchRecord> matches_;
  std::vector<PlayerProfile> players_;
  StyleTable styles_;
  FitConfig config_;
  int warmup_;
  int refit_every_;
  std::mutex mu_;
  std::map<int, std::shared_ptr<const ModelBundle>> cache_;
};

struct ReplayConfig {
  Exec exec = Exec::kParallel;
  MatchClock clock;
  double heatmap_row_step = 10.0;
};

struct PrematchDecision {
  int round = 0;
  TeamId team;
  TeamId opponent;
  Side side = Side::kHome;
  TacticChoice recommended;
  TacticChoice actual;
  bool close = false;
  int result = 0;  // 0 win, 1 draw, 2 loss from the deciding side
  double payoff_recommended = 0.0;
  double payoff_actual = 0.0;
  double win_recommended = 0.0;
  double win_actual = 0.0;
  std::string model_version;
};

struct InMatchDecision {
  int round = 0;
  TeamId team;
  Side side = Side::kHome;
  double minute = 0.0;
  GameState state;
  SubstitutionAction actual;
  SubstitutionAction recommended;
  bool same = false;
  bool position_similar = false;
  double payoff_actual = 0.0;
  double payoff_recommended = 0.0;
  double payoff_empty = 0.0;
  std::string model_version;
};

struct HeatmapCell {
  int home_goals = 0;
  int away_goals = 0;
  std::size_t rows = 0;
  std::size_t correct = 0;
};

struct ReplayReport {
  std::string stage;
  std::string approach;
  std::size_t matches = 0;
  std::size_t replayed_matches = 0;
  std::size_t decisions = 0;
  std::vector<std::string> model_versions;
  std::vector<int> trained_through_rounds;  // aligned with model_versions

  std::vector<PrematchDecision> prematch;
  std::vector<InMatchDecision> inmatch;
  std::vector<HeatmapCell> heatmap;
};

ReplayReport replay_prematch(const std::vector<MatchRecord>& matches, const ModelProvider& models, Approach approach,
                             const ReplayConfig& config = {});

ReplayReport replay_inmatch(const std::vector<MatchRecord>& matches, const std::vector<PlayerProfile>& players,
                            const ModelProvider& models, InMatchApproach approach, const ReplayConfig& config = {});

// Aggregates: closeness rates (overall and by venue), W/D/L among close
// decisions, payoff deltas and the win-probability z-test for the pre-match
// stage; same-decision and position-similar rates and mean payoffs for the
// in-match stage. Percentages are in [0, 100]; empty replays give nulls.
json report_summary(const ReplayReport& report);
json report_json(const ReplayReport& report);
std::string report_csv(const ReplayReport& report);
std::string heatmap_csv(const ReplayReport& report);
json crossval_json(const CrossvalReport& report);

}  // namespace tactics
