#pragma once

#include <array>
#include <optional>
#include <vector>

#include "tactics/clustering.hpp"
#include "tactics/domain.hpp"
#include "tactics/rbf.hpp"

namespace tactics {

inline constexpr int kHistoryLength = 5;

// The opponent's last five tactics against teams of one style cluster,
// oldest first. Missing history is nullopt (the `unknown` symbol), always in
// the leading slots.
struct HistoryWindow {
  std::array<std::optional<TacticChoice>, kHistoryLength> slots;

  friend bool operator==(const HistoryWindow&, const HistoryWindow&) = default;
};

// Window for `opponent` from `history` (any order; sorted by round, stable),
// keeping only matches whose adversary belongs to `our_style`.
HistoryWindow build_history_features(const std::vector<MatchRecord>& history, const TeamId& opponent, int our_style,
                                     const StyleClusterSet& clusters);

struct FormationRow {
  HistoryWindow window;
  Formation observed;
};

// One row per match and side: the window the side's opponent would have
// built before kickoff, labelled with the formation the side then used.
std::vector<FormationRow> formation_training_rows(const std::vector<MatchRecord>& matches,
                                                  const StyleClusterSet& clusters);

// Formation predictor p(formation | window). `vocab` holds the formations
// observed in training, in canonical order; window slots are encoded one-hot
// over vocab + unknown and styles + unknown.
struct FormationClassifier {
  RbfClassifier rbf;
  std::vector<Formation> vocab;
  int num_styles = 0;

  Point encode(const HistoryWindow& window) const;
};

using FormationDistribution = std::vector<std::pair<Formation, double>>;

FormationClassifier train_formation_classifier(const std::vector<FormationRow>& rows, int num_styles,
                                               const RbfConfig& config = {});

FormationDistribution predict_formation(const FormationClassifier& clf, const HistoryWindow& window);
// Same, on an already encoded window; throws on dimension mismatch.
FormationDistribution predict_formation(const FormationClassifier& clf, std::span<const double> encoded);

// Most probable formation, vocabulary order on ties.
Formation argmax_formation(const FormationDistribution& dist);

struct OppositionBelief {
  std::vector<std::pair<TacticChoice, double>> atoms;

  double total() const;
  // Atom with the largest mass; first atom on ties.
  const TacticChoice& most_likely() const;
  void validate(double tol = 1e-9) const;
};

// Point mass on the opponent's style (assign_style on `opponent_features`
// when given, else the fitted assignment) times the formation prediction.
OppositionBelief build_belief(const FormationClassifier& clf, const StyleClusterSet& clusters,
                              const std::vector<MatchRecord>& history, const TeamId& opponent, int our_style,
                              const std::optional<StyleFeatures>& opponent_features = std::nullopt);

void to_json(json& j, const FormationClassifier& c);
void from_json(const json& j, FormationClassifier& c);
void to_json(json& j, const OppositionBelief& b);

}  // namespace tactics
