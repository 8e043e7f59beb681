#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tactics/error.hpp"
#include "tactics/strength.hpp"

using namespace tactics;
using namespace tactics::testing;

namespace {

MatchRecord fixture(const std::string& home, const std::string& away, int hs, int as, int round = 1) {
  MatchRecord m;
  m.round = round;
  m.home_team = home;
  m.away_team = away;
  m.home_score = hs;
  m.away_score = as;
  return m;
}

}  // namespace

TEST_CASE("poisson grid matches the brute-force double sum") {
  const auto d = poisson_outcome_grid(1.5, 1.0, 10);
  const auto ref = brute_poisson_grid(1.5, 1.0, 10);
  CHECK(std::fabs(d.p_home - ref.p_home) < 1e-12);
  CHECK(std::fabs(d.p_draw - ref.p_draw) < 1e-12);
  CHECK(std::fabs(d.p_away - ref.p_away) < 1e-12);

  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const double lh = uniform(rng, 0.0, 4.0), la = uniform(rng, 0.0, 4.0);
    const int cap = 5 + static_cast<int>(uniform_index(rng, 10));
    const auto a = poisson_outcome_grid(lh, la, cap);
    const auto b = brute_poisson_grid(lh, la, cap);
    CHECK(std::fabs(a.p_home - b.p_home) < 1e-12);
    CHECK(std::fabs(a.p_away - b.p_away) < 1e-12);
  }
}

TEST_CASE("degenerate and symmetric rates") {
  const auto zero = poisson_outcome_grid(0.0, 0.0, 10);
  CHECK(zero.p_draw == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(zero.p_home == 0.0);
  const auto sym = poisson_outcome_grid(1.3, 1.3, 10);
  CHECK(std::fabs(sym.p_home - sym.p_away) < 1e-15);
  CHECK_THROWS_AS(poisson_outcome_grid(-1.0, 1.0, 10), Error);
}

TEST_CASE("identical teams without home advantage are symmetric") {
  StrengthModel m;
  m.ratings["A"] = {1.2, 0.9};
  m.ratings["B"] = {1.2, 0.9};
  m.home_advantage = 1.0;
  const auto d = outcome_probs(m, "A", "B");
  CHECK(std::fabs(d.p_home - d.p_away) < 1e-15);
  CHECK_THROWS_AS(outcome_probs(m, "A", "Z"), NotFound);
}

TEST_CASE("outcome_probs is a distribution for random models") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    StrengthModel m;
    m.ratings["A"] = {std::exp(uniform(rng, -2, 2)), std::exp(uniform(rng, -2, 2))};
    m.ratings["B"] = {std::exp(uniform(rng, -2, 2)), std::exp(uniform(rng, -2, 2))};
    m.home_advantage = std::exp(uniform(rng, -1, 1));
    const auto d = outcome_probs(m, "A", "B");
    CHECK(std::fabs(d.sum() - 1.0) < 1e-9);
    CHECK(d.p_home >= 0.0);
    CHECK(d.p_away >= 0.0);
  }
}

TEST_CASE("gauge invariance: attack x c, defense / c") {
  Rng rng(8);
  StrengthModel m;
  for (const char* t : {"A", "B", "C"}) m.ratings[t] = {std::exp(uniform(rng, -1, 1)), std::exp(uniform(rng, -1, 1))};
  m.home_advantage = 1.3;
  StrengthModel scaled = m;
  for (auto& [t, r] : scaled.ratings) {
    r.attack *= 2.7;
    r.defense /= 2.7;
  }
  for (const char* h : {"A", "B", "C"}) {
    for (const char* a : {"A", "B", "C"}) {
      if (std::string(h) == a) continue;
      const auto x = outcome_probs(m, h, a), y = outcome_probs(scaled, h, a);
      CHECK(std::fabs(x.p_home - y.p_home) < 1e-9);
      CHECK(std::fabs(x.p_draw - y.p_draw) < 1e-9);
    }
  }
}

TEST_CASE("symmetric 1-1 round robin gives equal ratings") {
  std::vector<MatchRecord> ms;
  const std::vector<std::string> teams{"A", "B", "C", "D"};
  for (const auto& h : teams) {
    for (const auto& a : teams) {
      if (h != a) ms.push_back(fixture(h, a, 1, 1));
    }
  }
  const auto model = fit_strengths(ms);
  for (const auto& t : teams) {
    CHECK(model.rating(t).attack == doctest::Approx(model.rating("A").attack).epsilon(1e-9));
    CHECK(model.rating(t).defense == doctest::Approx(model.rating("A").defense).epsilon(1e-9));
  }
  CHECK(model.home_advantage == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("a repeated 3-0 is fitted as lambda_home ~ 3, lambda_away ~ 0") {
  std::vector<MatchRecord> ms(3, fixture("A", "B", 3, 0));
  StrengthFitConfig cfg;
  cfg.iterations = 5000;
  const auto model = fit_strengths(ms, cfg);
  const auto [lh, la] = model.expected_goals("A", "B");
  CHECK(lh == doctest::Approx(3.0).epsilon(0.05));
  CHECK(la < 0.1);
  CHECK(la > 0.0);  // the penalty keeps the log-rates finite
}

TEST_CASE("the penalized objective never decreases during fitting") {
  const auto league = small_league("well_separated", 10, 2, 21);
  std::vector<double> trace;
  StrengthFitConfig cfg;
  cfg.iterations = 300;
  fit_strengths(league.matches, cfg, &trace);
  REQUIRE(trace.size() == 301);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-12);
  CHECK(trace.back() > trace.front());
}

TEST_CASE("fitted log-ratings are centred") {
  const auto league = small_league("well_separated", 8, 2, 4);
  const auto model = fit_strengths(league.matches);
  double sa = 0;
  for (const auto& [t, r] : model.ratings) sa += std::log(r.attack);
  CHECK(std::fabs(sa) < 1e-9);
}

TEST_CASE("strength model JSON round trip") {
  const auto league = small_league("well_separated", 6, 1, 2);
  const auto model = fit_strengths(league.matches);
  const auto back = json(model).get<StrengthModel>();
  CHECK(json(back) == json(model));
  const auto d1 = outcome_probs(model, "T01", "T02"), d2 = outcome_probs(back, "T01", "T02");
  CHECK(d1.p_home == d2.p_home);
}
