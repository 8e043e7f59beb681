#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tactics/inmatch.hpp"
#include "tactics/io.hpp"
#include "tactics/prematch.hpp"

namespace tactics {

struct FitConfig {
  std::uint64_t seed = 0;
  int k = 0;  // style count; 0 picks it with the elbow rule up to k_max
  int k_max = 8;
  KMeansConfig kmeans;
  StrengthFitConfig strength;
  RbfConfig formation{40, 0.0, 1e-3, false, 0, 3};
  NetConfig net;
  BankConfig bank;
  bool fit_bank = true;
  MatchClock clock;
};

// Everything the optimizers need, fitted on one training set.
struct ModelBundle {
  PrematchModels prematch;
  std::optional<StateModelBank> bank;
  // Highest round in the training set; consumers on round r require this < r.
  int trained_through_round = 0;
  std::size_t training_matches = 0;
  std::string version;
};

// Copy with every tactic's style replaced by the team's fitted cluster.
std::vector<MatchRecord> relabel_styles(const std::vector<MatchRecord>& matches, const StyleClusterSet& clusters);

std::vector<LabelledRow> payoff_training_rows(const std::vector<MatchRecord>& matches, const StrengthModel& strengths,
                                              int num_styles);

ModelBundle fit_bundle(const std::vector<MatchRecord>& matches, const std::vector<PlayerProfile>& players,
                       const StyleTable& styles, const FitConfig& config = {});

// 16 hex digits of FNV-1a over the serialized models.
std::string bundle_version(const ModelBundle& bundle);

void save_bundle(const std::filesystem::path& dir, const ModelBundle& bundle);
// Throws NotFound with "models not fitted" when the directory has no bundle.
ModelBundle load_bundle(const std::filesystem::path& dir);

}  // namespace tactics
