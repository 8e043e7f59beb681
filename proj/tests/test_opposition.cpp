#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "tactics/bundle.hpp"
#include "tactics/error.hpp"
#include "tactics/opposition.hpp"
#include "tactics/rbf.hpp"

using namespace tactics;
using namespace tactics::testing;

namespace {

Formation F(const char* s) { return Formation::parse(s); }

// Fitted clusters of a well-separated league, plus the league relabelled to them.
struct Fixture {
  League league;
  StyleClusterSet clusters;
  std::vector<MatchRecord> matches;
};

Fixture deterministic_league(HabitKind habit, std::uint64_t seed) {
  auto cfg = GeneratorConfig::preset("planted_habit");
  cfg.teams = 10;
  cfg.seasons = 2;
  cfg.seed = seed;
  cfg.habit = habit;
  cfg.habit_follow = 1.0;
  Fixture f{generate_league(cfg), {}, {}};
  f.clusters = kmeans(f.league.style_features, cfg.styles, 1);
  f.matches = relabel_styles(f.league.matches, f.clusters);
  return f;
}

FormationClassifier fit_classifier(const std::vector<FormationRow>& rows, int k, std::uint64_t seed = 3) {
  RbfConfig cfg{40, 0.0, 1e-3, false, seed, 3};
  cfg.n_centers = std::min<int>(cfg.n_centers, static_cast<int>(rows.size()));
  return train_formation_classifier(rows, k, cfg);
}

}  // namespace

TEST_CASE("window of an opponent without history is all unknown") {
  StyleClusterSet clusters;
  clusters.k = 2;
  const auto w = build_history_features({}, "T01", 0, clusters);
  for (const auto& s : w.slots) CHECK_FALSE(s.has_value());
}

TEST_CASE("constant history fills the window with one tactic") {
  const auto f = deterministic_league(HabitKind::kFavoritePerStyle, 2);
  const TeamId opp = "T03";
  for (int style = 0; style < f.clusters.k; ++style) {
    const auto w = build_history_features(f.matches, opp, style, f.clusters);
    // Ten teams over two seasons give at least five meetings with some styles.
    if (!w.slots[0]) continue;
    for (const auto& s : w.slots) {
      REQUIRE(s.has_value());
      CHECK(s->formation == w.slots[0]->formation);
    }
  }
}

TEST_CASE("window equals the scripted tail of an alternating opponent") {
  const auto f = deterministic_league(HabitKind::kAlternate, 4);
  auto sorted = f.matches;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.round < b.round; });
  for (const auto& opp : {"T01", "T05", "T09"}) {
    for (int style = 0; style < f.clusters.k; ++style) {
      std::vector<Formation> script;
      for (const auto& m : sorted) {
        const auto side = m.side_of(opp);
        if (side && f.clusters.style_of(m.team(opposite(*side))) == style) script.push_back(m.tactic(*side).formation);
      }
      const auto w = build_history_features(f.matches, opp, style, f.clusters);
      const std::size_t n = std::min<std::size_t>(script.size(), kHistoryLength);
      for (std::size_t i = 0; i < kHistoryLength; ++i) {
        const std::size_t pad = kHistoryLength - n;
        if (i < pad) {
          CHECK_FALSE(w.slots[i].has_value());
        } else {
          REQUIRE(w.slots[i].has_value());
          CHECK(w.slots[i]->formation == script[script.size() - n + (i - pad)]);
        }
      }
    }
  }
}

TEST_CASE("single-class training predicts that class everywhere") {
  std::vector<FormationRow> rows;
  HistoryWindow w;
  for (int i = 0; i < 10; ++i) {
    w.slots[i % kHistoryLength] = TacticChoice{all_formations()[static_cast<std::size_t>(i)], i % 2, ""};
    rows.push_back({w, F("4-4-2")});
  }
  const auto clf = fit_classifier(rows, 2);
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    HistoryWindow q;
    for (auto& s : q.slots) {
      if (uniform01(rng) < 0.7) s = TacticChoice{all_formations()[uniform_index(rng, 36)], static_cast<int>(uniform_index(rng, 2)), ""};
    }
    const auto d = predict_formation(clf, q);
    CHECK(argmax_formation(d) == F("4-4-2"));
  }
}

TEST_CASE("held-out accuracy on a deterministic-habit league") {
  const auto f = deterministic_league(HabitKind::kFavoritePerStyle, 6);
  const auto rows = formation_training_rows(f.matches, f.clusters);
  // First season trains, rows of the second season with a full window test.
  const std::size_t half = rows.size() / 2;
  const std::vector<FormationRow> train(rows.begin(), rows.begin() + static_cast<long>(half));
  const auto clf = fit_classifier(train, f.clusters.k);
  std::size_t n = 0, correct = 0;
  for (std::size_t i = half; i < rows.size(); ++i) {
    if (!rows[i].window.slots[0]) continue;
    ++n;
    correct += argmax_formation(predict_formation(clf, rows[i].window)) == rows[i].observed;
  }
  REQUIRE(n > 50);
  CHECK(static_cast<double>(correct) / static_cast<double>(n) >= 0.95);
}

TEST_CASE("predictions are distributions; training-row order does not matter") {
  const auto f = deterministic_league(HabitKind::kFavoritePerStyle, 8);
  auto rows = formation_training_rows(f.matches, f.clusters);
  const auto clf = fit_classifier(rows, f.clusters.k);
  Rng rng(12);
  shuffle(rows, rng);
  const auto clf2 = fit_classifier(rows, f.clusters.k);
  for (std::size_t i = 0; i < rows.size(); i += 7) {
    const auto a = predict_formation(clf, rows[i].window);
    const auto b = predict_formation(clf2, rows[i].window);
    double total = 0;
    REQUIRE(a.size() == b.size());
    for (std::size_t c = 0; c < a.size(); ++c) {
      total += a[c].second;
      CHECK(a[c].second >= 0.0);
      CHECK(std::fabs(a[c].second - b[c].second) < 1e-9);
    }
    CHECK(std::fabs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("a unanimous training window predicts its class; the all-unknown window follows its rows") {
  const auto f = deterministic_league(HabitKind::kFavoritePerStyle, 10);
  const auto rows = formation_training_rows(f.matches, f.clusters);
  const auto clf = fit_classifier(rows, f.clusters.k);
  const Point unknown = clf.encode(HistoryWindow{});
  // Brute force: labels of rows at the minimum distance from the unknown encoding.
  std::map<Formation, int> counts;
  double best = 1e300;
  for (const auto& r : rows) {
    const Point x = clf.encode(r.window);
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - unknown[i]) * (x[i] - unknown[i]);
    if (d < best - 1e-12) {
      best = d;
      counts.clear();
    }
    if (d <= best + 1e-12) ++counts[r.observed];
  }
  auto most = std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  CHECK(argmax_formation(predict_formation(clf, HistoryWindow{})) == most->first);

  std::map<std::vector<double>, std::map<Formation, int>> by_window;
  for (const auto& r : rows) ++by_window[clf.encode(r.window)][r.observed];
  int checked = 0;
  for (const auto& [x, labels] : by_window) {
    int total = 0;
    for (const auto& [fm, c] : labels) total += c;
    if (labels.size() != 1 || total < 3) continue;
    ++checked;
    CHECK(argmax_formation(predict_formation(clf, x)) == labels.begin()->first);
  }
  CHECK(checked > 5);
}

TEST_CASE("uniform formation prediction times a style point mass gives two atoms of 0.5") {
  HistoryWindow w;
  w.slots[4] = TacticChoice{F("4-4-2"), 0, ""};
  std::vector<FormationRow> rows{{w, F("4-4-2")}, {w, F("3-5-2")}};
  const auto clf = fit_classifier(rows, 2);
  StyleClusterSet clusters;
  clusters.k = 2;
  clusters.assignments = {{"A", 0}, {"B", 1}};
  MatchRecord m;
  m.round = 1;
  m.home_team = "B";
  m.away_team = "A";
  m.home_tactic = {F("4-4-2"), 1, ""};
  m.away_tactic = {F("4-4-2"), 0, ""};
  // B played 4-4-2 against style 0, so the window for "B vs style 0" equals w.
  const auto belief = build_belief(clf, clusters, {m}, "B", 0);
  REQUIRE(belief.atoms.size() == 2);
  for (const auto& [t, p] : belief.atoms) {
    CHECK(t.style == 1);
    CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(std::fabs(belief.total() - 1.0) < 1e-12);
}

TEST_CASE("deterministic opponent: belief concentrates on its scripted tactic") {
  const auto f = deterministic_league(HabitKind::kFavoritePerStyle, 12);
  const auto rows = formation_training_rows(f.matches, f.clusters);
  const auto clf = fit_classifier(rows, f.clusters.k);
  std::map<int, int> planted_of;  // fitted style -> planted style
  for (const auto& [id, s] : f.league.truth.styles) planted_of[f.clusters.style_of(id)] = s;
  int checked = 0;
  for (const auto& [opp, s] : f.league.truth.styles) {
    for (int our = 0; our < f.clusters.k; ++our) {
      if (!build_history_features(f.matches, opp, our, f.clusters).slots[0]) continue;
      const auto belief = build_belief(clf, f.clusters, f.matches, opp, our);
      const Formation scripted = f.league.truth.favorites.at(opp)[static_cast<std::size_t>(planted_of.at(our))];
      double mass = 0;
      for (const auto& [t, p] : belief.atoms) {
        if (t.formation == scripted && t.style == f.clusters.style_of(opp)) mass += p;
      }
      CHECK(mass >= 0.95);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("belief masses are normalized for random inputs") {
  const auto f = deterministic_league(HabitKind::kFavoritePerStyle, 14);
  auto cfg_rows = formation_training_rows(f.league.matches, f.clusters);
  const auto clf = fit_classifier(cfg_rows, f.clusters.k);
  Rng rng(99);
  std::vector<TeamId> teams;
  for (const auto& [id, s] : f.league.truth.styles) teams.push_back(id);
  for (int draw = 0; draw < 1000; ++draw) {
    const auto cut = uniform_index(rng, f.matches.size() + 1);
    const std::vector<MatchRecord> history(f.matches.begin(), f.matches.begin() + static_cast<long>(cut));
    std::optional<StyleFeatures> features;
    if (uniform01(rng) < 0.3) features = StyleFeatures{uniform(rng, 300, 500), uniform(rng, 8, 16), 1.3, 1.3, 17};
    const auto belief = build_belief(clf, f.clusters, history, teams[uniform_index(rng, teams.size())],
                                     static_cast<int>(uniform_index(rng, static_cast<std::size_t>(f.clusters.k))), features);
    for (const auto& [t, p] : belief.atoms) CHECK(p >= 0.0);
    CHECK(std::fabs(belief.total() - 1.0) < 1e-9);
  }
}

TEST_CASE("rbf classifier basics") {
  // Two well-separated blobs.
  std::vector<Point> xs;
  std::vector<int> ys;
  Rng rng(1);
  for (int i = 0; i < 40; ++i) {
    const int c = i % 2;
    xs.push_back({c * 4.0 + 0.3 * standard_normal(rng), 0.3 * standard_normal(rng)});
    ys.push_back(c);
  }
  const auto clf = train_rbf(xs, ys, {"left", "right"}, RbfConfig{8, 0.0, 1e-3, false, 5, 3});
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(clf.predict(xs[i]) == ys[i]);
  const auto p = clf.predict_proba(Point{2.0, 0.0});
  CHECK(std::fabs(p[0] + p[1] - 1.0) < 1e-12);
  const auto back = json(clf).get<RbfClassifier>();
  CHECK(back.predict_proba(xs[3]) == clf.predict_proba(xs[3]));
  CHECK_THROWS_AS(clf.predict_proba(Point{1.0}), Error);
}

TEST_CASE("softmax is shift invariant") {
  const std::vector<double> a{1.0, 2.0, -0.5}, b{101.0, 102.0, 99.5};
  const auto pa = softmax(a, 1.7), pb = softmax(b, 1.7);
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(pa[i] - pb[i]) < 1e-12);
}

TEST_CASE("a class without training rows gets probability zero") {
  std::vector<Point> xs;
  std::vector<int> ys;
  Rng rng(2);
  for (int i = 0; i < 30; ++i) {
    xs.push_back({standard_normal(rng), standard_normal(rng)});
    ys.push_back(i % 3 == 0 ? 2 : 0);
  }
  const auto clf = train_rbf(xs, ys, {"a", "b", "c"}, RbfConfig{6, 0.0, 1e-3, false, 1, 3});
  const auto back = json(clf).get<RbfClassifier>();
  for (int i = 0; i < 200; ++i) {
    const Point x{3 * standard_normal(rng), 3 * standard_normal(rng)};
    const auto p = clf.predict_proba(x);
    CHECK(p[1] == 0.0);
    CHECK(std::fabs(p[0] + p[2] - 1.0) < 1e-12);
    CHECK(back.predict_proba(x) == p);
  }
  const auto m = masked_softmax(std::vector<double>{1.0, 5.0, 2.0}, {true, false, true});
  CHECK(m[1] == 0.0);
  CHECK(m[2] == doctest::Approx(std::exp(1.0) / (1.0 + std::exp(1.0))));
}
