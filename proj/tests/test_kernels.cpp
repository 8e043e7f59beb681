#include <doctest.h>

#include <omp.h>

#include "support.hpp"

using namespace tactics;
using namespace tactics::testing;

// Each parallel kernel must reproduce its serial twin bit for bit at any
// thread count.

namespace {

template <class F>
void at_thread_counts(F&& f) {
  const int saved = omp_get_max_threads();
  for (int n : {1, 2, 3, 8}) {
    omp_set_num_threads(n);
    CAPTURE(n);
    f();
  }
  omp_set_num_threads(saved);
}

}  // namespace

TEST_CASE("k-means restarts") {
  Rng rng(5);
  std::vector<Point> pts;
  for (int i = 0; i < 200; ++i) pts.push_back({standard_normal(rng) + (i % 3) * 3.0, standard_normal(rng)});
  const std::vector<double> w(pts.size(), 1.0);
  const auto a = kernels::kmeans_restarts_serial(pts, w, 3, 9, 12, 100);
  at_thread_counts([&] {
    const auto b = kernels::kmeans_restarts_omp(pts, w, 3, 9, 12, 100);
    REQUIRE(a.size() == b.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
      CHECK(a[r].labels == b[r].labels);
      CHECK(a[r].centroids == b[r].centroids);
      CHECK(a[r].inertia_trace == b[r].inertia_trace);
    }
  });
}

TEST_CASE("payoff-net predictions") {
  NetConfig cfg;
  const auto net = init_payoff_net(12, cfg);
  Rng rng(6);
  std::vector<FeatureVector> xs(500, FeatureVector(12));
  for (auto& x : xs) for (auto& v : x) v = standard_normal(rng);
  const auto a = kernels::predict_outcomes_serial(net, xs);
  at_thread_counts([&] {
    const auto b = kernels::predict_outcomes_omp(net, xs);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].p_home == b[i].p_home);
      CHECK(a[i].p_draw == b[i].p_draw);
      CHECK(a[i].p_away == b[i].p_away);
    }
  });
}

TEST_CASE("match simulation") {
  const auto league = small_league("tactic_sensitive", 6, 1, 8);
  const auto roster = make_roster(league.players);
  const auto a = kernels::simulate_batch_serial(league.truth, roster, league.matches, 4);
  at_thread_counts([&] {
    const auto b = kernels::simulate_batch_omp(league.truth, roster, league.matches, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(json(a[i]) == json(b[i]));
  });
}

TEST_CASE("in-match action payoffs") {
  const auto league = small_league("well_separated", 6, 2, 9);
  FitConfig cfg;
  cfg.k = 2;
  const auto bundle = fit_bundle(league.matches, league.players, league.style_features, cfg);
  const auto roster = make_roster(league.players);
  const auto m = relabel_styles({league.matches.back()}, bundle.prematch.clusters).front();
  const MatchStrategies st{strategy_at(m, Side::kHome, 50.0, roster), strategy_at(m, Side::kAway, 50.0, roster)};
  const auto actions = legal_actions(st.home);
  for (auto objective : {Objective::kAdvance, Objective::kHold}) {
    const auto a = kernels::action_payoffs_serial(*bundle.bank, {0, 1, 50.0}, actions, st, Side::kHome, 44.0, objective);
    at_thread_counts([&] {
      CHECK(a == kernels::action_payoffs_omp(*bundle.bank, {0, 1, 50.0}, actions, st, Side::kHome, 44.0, objective));
    });
  }
}
