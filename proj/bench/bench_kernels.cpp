// Serial vs OpenMP timings for the four parallel kernels.

#include <benchmark/benchmark.h>

#include "tactics/bundle.hpp"
#include "tactics/clustering.hpp"
#include "tactics/inmatch.hpp"
#include "tactics/league.hpp"
#include "tactics/prematch.hpp"
#include "tactics/rng.hpp"

using namespace tactics;

namespace {

const League& league() {
  static const League l = [] {
    auto cfg = GeneratorConfig::preset("tactic_sensitive");
    cfg.seed = 1;
    return generate_league(cfg);
  }();
  return l;
}

const ModelBundle& bundle() {
  static const ModelBundle b = [] {
    FitConfig cfg;
    cfg.k = 4;
    const auto& l = league();
    return fit_bundle(l.matches, l.players, l.style_features, cfg);
  }();
  return b;
}

std::vector<Point> points(std::size_t n) {
  Rng rng(2);
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({standard_normal(rng), standard_normal(rng), standard_normal(rng)});
  return out;
}

template <bool Omp>
void BM_KMeansRestarts(benchmark::State& state) {
  const auto pts = points(static_cast<std::size_t>(state.range(0)));
  const std::vector<double> w(pts.size(), 1.0);
  for (auto _ : state) {
    auto r = Omp ? kernels::kmeans_restarts_omp(pts, w, 4, 3, 32, 100) : kernels::kmeans_restarts_serial(pts, w, 4, 3, 32, 100);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Omp>
void BM_PredictOutcomes(benchmark::State& state) {
  const auto& pm = bundle().prematch;
  std::vector<FeatureVector> xs;
  const auto fs = all_formations();
  for (std::size_t i = 0; i < 36 * 36; ++i) {
    xs.push_back(encode_payoff_features({fs[i % 36], 0, ""}, {fs[i / 36], 1, ""}, OutcomeDistribution{}, pm.clusters.k));
  }
  for (auto _ : state) {
    auto r = Omp ? kernels::predict_outcomes_omp(pm.net, xs) : kernels::predict_outcomes_serial(pm.net, xs);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Omp>
void BM_SimulateBatch(benchmark::State& state) {
  const auto& l = league();
  const auto roster = make_roster(l.players);
  for (auto _ : state) {
    auto r = Omp ? kernels::simulate_batch_omp(l.truth, roster, l.matches, 5)
                 : kernels::simulate_batch_serial(l.truth, roster, l.matches, 5);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(l.matches.size()));
}

template <bool Omp>
void BM_ActionPayoffs(benchmark::State& state) {
  const auto& b = bundle();
  const auto roster = make_roster(league().players);
  const auto m = relabel_styles({league().matches.front()}, b.prematch.clusters).front();
  const MatchStrategies st{strategy_at(m, Side::kHome, 60.0, roster), strategy_at(m, Side::kAway, 60.0, roster)};
  const auto actions = legal_actions(st.home);
  for (auto _ : state) {
    auto r = Omp ? kernels::action_payoffs_omp(*b.bank, {0, 0, 60.0}, actions, st, Side::kHome, 34.0, Objective::kAdvance)
                 : kernels::action_payoffs_serial(*b.bank, {0, 0, 60.0}, actions, st, Side::kHome, 34.0, Objective::kAdvance);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(BM_KMeansRestarts<false>)->Arg(200)->Arg(2000);
BENCHMARK(BM_KMeansRestarts<true>)->Arg(200)->Arg(2000);
BENCHMARK(BM_PredictOutcomes<false>);
BENCHMARK(BM_PredictOutcomes<true>);
BENCHMARK(BM_SimulateBatch<false>);
BENCHMARK(BM_SimulateBatch<true>);
BENCHMARK(BM_ActionPayoffs<false>);
BENCHMARK(BM_ActionPayoffs<true>);

BENCHMARK_MAIN();
