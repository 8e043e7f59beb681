#pragma once

// Shared fixtures and brute-force oracles for the unit tests and the
// acceptance binary.

#include <cmath>
#include <limits>
#include <vector>

#include "tactics/bundle.hpp"
#include "tactics/league.hpp"
#include "tactics/prematch.hpp"
#include "tactics/rng.hpp"

namespace tactics::testing {

inline OutcomeDistribution random_outcome(Rng& rng) {
  double a = exponential(rng, 1.0), b = exponential(rng, 1.0), c = exponential(rng, 1.0);
  const double s = a + b + c;
  return {a / s, b / s, 1.0 - a / s - b / s};
}

// Table over synthetic actions with random cells. The opponent's view is drawn
// independently of ours (a mirrored view makes the table constant-sum). With
// `ties`, some rows are copies of earlier rows.
inline PayoffTable random_table(Rng& rng, std::size_t n_ours, std::size_t n_opp, bool ties = false) {
  PayoffTable t;
  const auto fs = all_formations();
  for (std::size_t i = 0; i < n_ours; ++i) t.our_actions.push_back({fs[i % fs.size()], static_cast<int>(i / fs.size()), ""});
  for (std::size_t j = 0; j < n_opp; ++j) t.opp_actions.push_back({fs[j % fs.size()], static_cast<int>(j / fs.size()), ""});
  for (std::size_t i = 0; i < n_ours; ++i) {
    const bool copy = ties && i > 0 && uniform01(rng) < 0.3;
    const std::size_t src = copy ? uniform_index(rng, i) : i;
    for (std::size_t j = 0; j < n_opp; ++j) {
      if (copy) {
        t.cells.push_back(t.cells[src * n_opp + j]);
      } else {
        const auto d = random_outcome(rng);
        t.cells.push_back({d, random_outcome(rng)});
      }
    }
  }
  return t;
}

// Cell whose weighted payoffs are exactly (u_ours, u_opp), both in [0, 2].
inline PayoffCell cell_with_payoffs(double u_ours, double u_opp) {
  return {{u_ours / 2, 0.0, 1.0 - u_ours / 2}, {u_opp / 2, 0.0, 1.0 - u_opp / 2}};
}

inline std::vector<double> random_belief(Rng& rng, std::size_t n) {
  std::vector<double> b(n);
  for (auto& v : b) v = uniform01(rng) < 0.2 ? 0.0 : exponential(rng, 1.0);
  b[uniform_index(rng, n)] += 0.1;
  return b;
}

// Expected objective per our action, summed in long double straight from the
// outcome components.
enum class Criterion { kOwn, kOpponent, kDifference };

inline std::vector<long double> brute_objective(const PayoffTable& t, const std::vector<double>& belief, Criterion c) {
  long double total = 0;
  for (double b : belief) total += b;
  std::vector<long double> out;
  for (std::size_t i = 0; i < t.our_actions.size(); ++i) {
    long double s = 0;
    for (std::size_t j = 0; j < t.opp_actions.size(); ++j) {
      const auto& cell = t.cells[i * t.opp_actions.size() + j];
      const long double own = 2.0L * cell.ours.p_home + cell.ours.p_draw;
      const long double opp = 2.0L * cell.theirs.p_home + cell.theirs.p_draw;
      const long double v = c == Criterion::kOwn ? own : c == Criterion::kOpponent ? opp : own - opp;
      s += v * (belief[j] / total);
    }
    out.push_back(s);
  }
  return out;
}

// First index within `tol` of the optimum.
inline std::size_t brute_pick(const std::vector<long double>& v, bool maximize, long double tol = 1e-12L) {
  long double best = v[0];
  for (auto x : v) best = maximize ? std::max(best, x) : std::min(best, x);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::fabs(v[i] - best) <= tol) return i;
  }
  return 0;
}

// Independent double-Poisson grid: pmfs by the closed form, no recurrence.
inline OutcomeDistribution brute_poisson_grid(double lh, double la, int cap) {
  auto pmf = [](double lambda, int k) {
    if (lambda == 0.0) return k == 0 ? 1.0L : 0.0L;
    return std::exp(static_cast<long double>(k) * std::log(static_cast<long double>(lambda)) - lambda -
                    std::lgamma(static_cast<long double>(k) + 1.0L));
  };
  long double h = 0, d = 0, a = 0;
  for (int i = 0; i <= cap; ++i) {
    for (int j = 0; j <= cap; ++j) {
      const long double p = pmf(lh, i) * pmf(la, j);
      (i > j ? h : i == j ? d : a) += p;
    }
  }
  const long double s = h + d + a;
  return {static_cast<double>(h / s), static_cast<double>(d / s), static_cast<double>(a / s)};
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline League small_league(const std::string& preset, int teams, int seasons, std::uint64_t seed) {
  auto cfg = GeneratorConfig::preset(preset);
  cfg.teams = teams;
  cfg.seasons = seasons;
  cfg.seed = seed;
  return generate_league(cfg);
}

inline std::vector<int> planted_labels(const League& league) {
  std::vector<int> out;
  for (const auto& [team, f] : league.style_features) out.push_back(league.truth.styles.at(team));
  return out;
}

}  // namespace tactics::testing
