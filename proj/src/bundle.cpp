#include "tactics/bundle.hpp"

#include <algorithm>
#include <cstdio>

#include "tactics/error.hpp"
#include "tactics/league.hpp"
#include "tactics/rng.hpp"

namespace tactics {

std::vector<MatchRecord> relabel_styles(const std::vector<MatchRecord>& matches, const StyleClusterSet& clusters) {
  std::vector<MatchRecord> out = matches;
  for (auto& m : out) {
    m.home_tactic.style = clusters.style_of(m.home_team);
    m.away_tactic.style = clusters.style_of(m.away_team);
  }
  return out;
}

std::vector<LabelledRow> payoff_training_rows(const std::vector<MatchRecord>& matches, const StrengthModel& strengths,
                                              int num_styles) {
  std::vector<LabelledRow> rows;
  rows.reserve(matches.size());
  for (const auto& m : matches) {
    rows.push_back({encode_payoff_features(m.home_tactic, m.away_tactic, outcome_probs(strengths, m.home_team, m.away_team),
                                           num_styles),
                    static_cast<int>(m.result())});
  }
  return rows;
}

ModelBundle fit_bundle(const std::vector<MatchRecord>& matches, const std::vector<PlayerProfile>& players,
                       const StyleTable& styles, const FitConfig& config) {
  if (matches.empty()) throw Error("fit: no matches to fit on");
  ModelBundle b;
  auto& pm = b.prematch;

  const int k = config.k > 0 ? config.k
                             : elbow_select_k(styles, std::min<int>(config.k_max, static_cast<int>(styles.size())),
                                              derive_seed(config.seed, 10), config.kmeans);
  pm.clusters = kmeans(styles, k, derive_seed(config.seed, 10), config.kmeans);
  const auto relabelled = relabel_styles(matches, pm.clusters);

  pm.strengths = fit_strengths(relabelled, config.strength);

  RbfConfig formation_cfg = config.formation;
  formation_cfg.seed = derive_seed(config.seed, 11);
  const auto rows = formation_training_rows(relabelled, pm.clusters);
  formation_cfg.n_centers = std::min<int>(formation_cfg.n_centers, static_cast<int>(rows.size()));
  pm.formations = train_formation_classifier(rows, k, formation_cfg);

  NetConfig net_cfg = config.net;
  net_cfg.seed = derive_seed(config.seed, 12);
  pm.net = train_payoff_net(payoff_training_rows(relabelled, pm.strengths, k), net_cfg);

  if (config.fit_bank) {
    BankConfig bank_cfg = config.bank;
    bank_cfg.rbf.seed = derive_seed(config.seed, 13);
    b.bank = train_transition_bank(relabelled, pm.strengths, make_roster(players), k, config.clock, bank_cfg);
  }

  for (const auto& m : matches) b.trained_through_round = std::max(b.trained_through_round, m.round);
  b.training_matches = matches.size();
  b.version = bundle_version(b);
  return b;
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::string bundle_version(const ModelBundle& b) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  h = fnv1a(h, json(b.prematch.strengths).dump());
  h = fnv1a(h, json(b.prematch.clusters).dump());
  h = fnv1a(h, json(b.prematch.formations).dump());
  h = fnv1a(h, json(b.prematch.net).dump());
  if (b.bank) h = fnv1a(h, json(*b.bank).dump());
  h = fnv1a(h, std::to_string(b.trained_through_round));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_bundle(const std::filesystem::path& dir, const ModelBundle& b) {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "strengths.json", b.prematch.strengths);
  write_json_file(dir / "clusters.json", b.prematch.clusters);
  write_json_file(dir / "formation_model.json", b.prematch.formations);
  write_json_file(dir / "payoff_net.json", b.prematch.net);
  write_text_file(dir / "payoff_loss.csv", loss_log_csv(b.prematch.net));
  if (b.bank) write_json_file(dir / "transition_bank.json", *b.bank);
  write_json_file(dir / "manifest.json", json{{"version", b.version},
                                              {"trained_through_round", b.trained_through_round},
                                              {"training_matches", b.training_matches},
                                              {"num_styles", b.prematch.clusters.k},
                                              {"has_transition_bank", b.bank.has_value()}});
}

ModelBundle load_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "manifest.json")) {
    throw NotFound("models not fitted: no model bundle in " + dir.string() + " (run `tactics fit` first)");
  }
  const auto manifest = read_json_file(dir / "manifest.json");
  ModelBundle b;
  b.prematch.strengths = read_json_file(dir / "strengths.json").get<StrengthModel>();
  b.prematch.clusters = read_json_file(dir / "clusters.json").get<StyleClusterSet>();
  b.prematch.formations = read_json_file(dir / "formation_model.json").get<FormationClassifier>();
  b.prematch.net = read_json_file(dir / "payoff_net.json").get<PayoffNet>();
  if (manifest.at("has_transition_bank").get<bool>()) {
    b.bank = read_json_file(dir / "transition_bank.json").get<StateModelBank>();
  }
  b.trained_through_round = manifest.at("trained_through_round").get<int>();
  b.training_matches = manifest.at("training_matches").get<std::size_t>();
  b.version = manifest.at("version").get<std::string>();
  if (bundle_version(b) != b.version) {
    throw Error("model bundle in " + dir.string() + " does not match its manifest version");
  }
  return b;
}

}  // namespace tactics
