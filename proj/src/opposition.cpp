#include "tactics/opposition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "tactics/error.hpp"

namespace tactics {

namespace {

std::vector<std::size_t> chronological_order(const std::vector<MatchRecord>& matches) {
  std::vector<std::size_t> order(matches.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return matches[a].round < matches[b].round; });
  return order;
}

int style_or_record(const StyleClusterSet& clusters, const MatchRecord& m, Side side) {
  auto it = clusters.assignments.find(m.team(side));
  return it != clusters.assignments.end() ? it->second : m.tactic(side).style;
}

HistoryWindow to_window(const std::deque<TacticChoice>& recent) {
  HistoryWindow w;
  const std::size_t pad = kHistoryLength - recent.size();
  for (std::size_t i = 0; i < recent.size(); ++i) w.slots[pad + i] = recent[i];
  return w;
}

}  // namespace

HistoryWindow build_history_features(const std::vector<MatchRecord>& history, const TeamId& opponent, int our_style,
                                     const StyleClusterSet& clusters) {
  const auto order = chronological_order(history);
  std::deque<TacticChoice> recent;
  for (auto it = order.rbegin(); it != order.rend() && recent.size() < kHistoryLength; ++it) {
    const auto& m = history[*it];
    auto side = m.side_of(opponent);
    if (!side) continue;
    if (style_or_record(clusters, m, opposite(*side)) != our_style) continue;
    recent.push_front(m.tactic(*side));
  }
  return to_window(recent);
}

std::vector<FormationRow> formation_training_rows(const std::vector<MatchRecord>& matches,
                                                  const StyleClusterSet& clusters) {
  std::map<std::pair<TeamId, int>, std::deque<TacticChoice>> recent;
  std::vector<FormationRow> rows;
  const auto order = chronological_order(matches);
  // Matches in the same round do not see each other.
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    const int round = matches[order[i]].round;
    while (j < order.size() && matches[order[j]].round == round) ++j;
    for (std::size_t t = i; t < j; ++t) {
      const auto& m = matches[order[t]];
      for (Side side : {Side::kHome, Side::kAway}) {
        const int adversary_style = style_or_record(clusters, m, opposite(side));
        rows.push_back({to_window(recent[{m.team(side), adversary_style}]), m.tactic(side).formation});
      }
    }
    for (std::size_t t = i; t < j; ++t) {
      const auto& m = matches[order[t]];
      for (Side side : {Side::kHome, Side::kAway}) {
        auto& q = recent[{m.team(side), style_or_record(clusters, m, opposite(side))}];
        q.push_back(m.tactic(side));
        if (q.size() > kHistoryLength) q.pop_front();
      }
    }
    i = j;
  }
  return rows;
}

Point FormationClassifier::encode(const HistoryWindow& window) const {
  const std::size_t f_width = vocab.size() + 1;
  const std::size_t s_width = static_cast<std::size_t>(num_styles) + 1;
  Point x(kHistoryLength * (f_width + s_width), 0.0);
  for (std::size_t slot = 0; slot < kHistoryLength; ++slot) {
    const std::size_t base = slot * (f_width + s_width);
    const auto& t = window.slots[slot];
    std::size_t f = vocab.size();
    std::size_t s = static_cast<std::size_t>(num_styles);
    if (t) {
      auto it = std::lower_bound(vocab.begin(), vocab.end(), t->formation);
      if (it != vocab.end() && *it == t->formation) f = static_cast<std::size_t>(it - vocab.begin());
      if (t->style >= 0 && t->style < num_styles) s = static_cast<std::size_t>(t->style);
    }
    x[base + f] = 1.0;
    x[base + f_width + s] = 1.0;
  }
  return x;
}

FormationClassifier train_formation_classifier(const std::vector<FormationRow>& rows, int num_styles,
                                               const RbfConfig& config) {
  if (rows.empty()) throw Error("train_formation_classifier: empty training set");
  TACTICS_CHECK(num_styles >= 1, "train_formation_classifier: need at least one style");
  FormationClassifier clf;
  clf.num_styles = num_styles;
  for (const auto& r : rows) clf.vocab.push_back(r.observed);
  std::sort(clf.vocab.begin(), clf.vocab.end());
  clf.vocab.erase(std::unique(clf.vocab.begin(), clf.vocab.end()), clf.vocab.end());

  std::vector<Point> inputs;
  std::vector<int> targets;
  inputs.reserve(rows.size());
  for (const auto& r : rows) {
    inputs.push_back(clf.encode(r.window));
    targets.push_back(static_cast<int>(std::lower_bound(clf.vocab.begin(), clf.vocab.end(), r.observed) -
                                       clf.vocab.begin()));
  }
  std::vector<std::string> labels;
  for (const auto& f : clf.vocab) labels.push_back(f.label());
  if (config.n_centers > static_cast<int>(rows.size())) {
    throw Error("train_formation_classifier: n_centers exceeds the number of rows");
  }
  clf.rbf = train_rbf(inputs, targets, std::move(labels), config);
  return clf;
}

FormationDistribution predict_formation(const FormationClassifier& clf, std::span<const double> encoded) {
  const auto p = clf.rbf.predict_proba(encoded);
  FormationDistribution out;
  out.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out.emplace_back(clf.vocab[i], p[i]);
  return out;
}

FormationDistribution predict_formation(const FormationClassifier& clf, const HistoryWindow& window) {
  const auto x = clf.encode(window);
  return predict_formation(clf, std::span<const double>(x));
}

Formation argmax_formation(const FormationDistribution& dist) {
  TACTICS_CHECK(!dist.empty(), "argmax_formation: empty distribution");
  std::size_t best = 0;
  for (std::size_t i = 1; i < dist.size(); ++i) {
    if (dist[i].second > dist[best].second) best = i;
  }
  return dist[best].first;
}

double OppositionBelief::total() const {
  double t = 0.0;
  for (const auto& [a, p] : atoms) t += p;
  return t;
}

const TacticChoice& OppositionBelief::most_likely() const {
  TACTICS_CHECK(!atoms.empty(), "belief has no atoms");
  std::size_t best = 0;
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i].second > atoms[best].second) best = i;
  }
  return atoms[best].first;
}

void OppositionBelief::validate(double tol) const {
  for (const auto& [a, p] : atoms) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error("belief mass must be non-negative");
  }
  if (std::abs(total() - 1.0) > tol) throw Error("belief does not sum to 1");
}

OppositionBelief build_belief(const FormationClassifier& clf, const StyleClusterSet& clusters,
                              const std::vector<MatchRecord>& history, const TeamId& opponent, int our_style,
                              const std::optional<StyleFeatures>& opponent_features) {
  const int style = opponent_features ? assign_style(clusters, *opponent_features) : clusters.style_of(opponent);
  const auto window = build_history_features(history, opponent, our_style, clusters);
  const auto dist = predict_formation(clf, window);
  OppositionBelief belief;
  for (const auto& [f, p] : dist) belief.atoms.push_back({TacticChoice{f, style, {}}, p});
  return belief;
}

void to_json(json& j, const FormationClassifier& c) {
  j = c.rbf;
  j["formations"] = c.vocab;
  j["num_styles"] = c.num_styles;
}

void from_json(const json& j, FormationClassifier& c) {
  c.rbf = j.get<RbfClassifier>();
  c.vocab = j.at("formations").get<std::vector<Formation>>();
  c.num_styles = j.at("num_styles").get<int>();
  if (c.vocab.size() != c.rbf.num_classes()) throw Error("formation classifier: vocabulary size mismatch");
}

void to_json(json& j, const OppositionBelief& b) {
  j = json::array();
  for (const auto& [t, p] : b.atoms) j.push_back({{"tactic", t}, {"p", p}});
}

}  // namespace tactics
