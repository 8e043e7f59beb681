#include "tactics/domain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include "tactics/error.hpp"

namespace tactics {

std::string_view to_string(Side s) { return s == Side::kHome ? "home" : "away"; }

Side parse_side(std::string_view s) {
  if (s == "home") return Side::kHome;
  if (s == "away") return Side::kAway;
  throw Error("unknown side '" + std::string(s) + "'");
}

Formation Formation::parse(std::string_view text) {
  std::vector<int> bands;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dash = text.find('-', pos);
    if (dash == std::string_view::npos) dash = text.size();
    std::string_view part = text.substr(pos, dash - pos);
    int value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw Error("malformed formation '" + std::string(text) + "'");
    }
    bands.push_back(value);
    pos = dash + 1;
  }
  if (bands.size() < 3) throw Error("formation needs at least three lines: '" + std::string(text) + "'");
  Formation f;
  f.defenders = bands.front();
  f.forwards = bands.back();
  f.midfielders = 0;
  for (std::size_t i = 1; i + 1 < bands.size(); ++i) f.midfielders += bands[i];
  if (!f.valid()) throw Error("invalid formation '" + std::string(text) + "'");
  return f;
}

std::string Formation::label() const {
  return std::to_string(defenders) + "-" + std::to_string(midfielders) + "-" + std::to_string(forwards);
}

bool Formation::valid() const {
  return defenders >= 1 && midfielders >= 1 && forwards >= 1 &&
         defenders + midfielders + forwards == kOutfieldPlayers;
}

namespace {

std::array<Formation, kFormationCount> build_formations() {
  std::array<Formation, kFormationCount> out{};
  std::size_t i = 0;
  for (int d = 1; d <= 8; ++d) {
    for (int m = 1; d + m <= 9; ++m) {
      out[i++] = Formation{d, m, kOutfieldPlayers - d - m};
    }
  }
  return out;
}

const std::array<Formation, kFormationCount> kFormations = build_formations();

}  // namespace

std::span<const Formation> all_formations() { return kFormations; }

int formation_index(const Formation& f) {
  auto it = std::lower_bound(kFormations.begin(), kFormations.end(), f);
  if (it == kFormations.end() || *it != f) throw Error("invalid formation " + f.label());
  return static_cast<int>(it - kFormations.begin());
}

int formation_distance(const Formation& a, const Formation& b) {
  return std::abs(a.defenders - b.defenders) + std::abs(a.midfielders - b.midfielders) +
         std::abs(a.forwards - b.forwards);
}

void StyleFeatures::validate() const {
  for (double v : as_array()) {
    if (!std::isfinite(v) || v < 0.0) throw Error("style features must be finite and non-negative");
  }
}

std::string TacticChoice::label() const {
  return (formation_label.empty() ? formation.label() : formation_label) + "/S" + std::to_string(style);
}

void OutcomeDistribution::validate(double tol) const {
  for (double p : {p_home, p_draw, p_away}) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("outcome probability outside [0,1]");
  }
  if (std::abs(sum() - 1.0) > tol) throw Error("outcome distribution does not sum to 1");
}

std::string GameState::scoreline() const {
  return std::to_string(home_goals) + "-" + std::to_string(away_goals);
}

int goal_difference(const GameState& state, Side side) {
  const int diff = state.home_goals - state.away_goals;
  return side == Side::kHome ? diff : -diff;
}

std::string_view to_string(Position p) {
  switch (p) {
    case Position::kGK: return "GK";
    case Position::kDEF: return "DEF";
    case Position::kMID: return "MID";
    case Position::kFWD: return "FWD";
  }
  return "?";
}

Position parse_position(std::string_view s) {
  if (s == "GK") return Position::kGK;
  if (s == "DEF") return Position::kDEF;
  if (s == "MID") return Position::kMID;
  if (s == "FWD") return Position::kFWD;
  throw Error("unknown position '" + std::string(s) + "'");
}

void PlayerProfile::validate() const {
  if (id.empty()) throw Error("player id must be non-empty");
  if (!(contribution >= 0.0 && contribution <= 1.0)) {
    throw Error("player " + id + ": contribution outside [0,1]");
  }
}

MatchResult MatchRecord::result() const {
  if (home_score > away_score) return MatchResult::kHomeWin;
  if (home_score < away_score) return MatchResult::kAwayWin;
  return MatchResult::kDraw;
}

std::optional<Side> MatchRecord::side_of(const TeamId& team) const {
  if (team == home_team) return Side::kHome;
  if (team == away_team) return Side::kAway;
  return std::nullopt;
}

void validate_match(const MatchRecord& m) {
  const std::string where = "match round " + std::to_string(m.round) + " " + m.home_team + " v " + m.away_team + ": ";
  auto fail = [&](const std::string& what) { throw Error(where + what); };

  if (m.home_team.empty() || m.away_team.empty()) fail("empty team id");
  if (m.home_team == m.away_team) fail("team plays itself");
  if (!m.home_tactic.formation.valid() || !m.away_tactic.formation.valid()) fail("invalid formation");
  if (m.home_tactic.style < 0 || m.away_tactic.style < 0) fail("negative style index");

  int home = 0, away = 0;
  double last = 0.0;
  for (const auto& g : m.goals) {
    if (!std::isfinite(g.minute) || g.minute < 0.0) fail("goal minute out of range");
    if (g.minute < last) fail("goal events out of order");
    last = g.minute;
    (g.side == Side::kHome ? home : away)++;
  }
  if (home != m.home_score || away != m.away_score) {
    fail("final score " + std::to_string(m.home_score) + "-" + std::to_string(m.away_score) +
         " disagrees with goal events " + std::to_string(home) + "-" + std::to_string(away));
  }

  for (Side side : {Side::kHome, Side::kAway}) {
    const auto& lineup = m.lineup(side);
    const auto& bench = m.bench(side);
    if (lineup.size() != static_cast<std::size_t>(kLineupSize)) fail(std::string(to_string(side)) + " lineup must have 11 players");
    std::set<PlayerId> on_pitch(lineup.begin(), lineup.end());
    std::set<PlayerId> available(bench.begin(), bench.end());
    if (on_pitch.size() != lineup.size()) fail("duplicate player in lineup");
    for (const auto& b : bench) {
      if (on_pitch.count(b)) fail("player " + b + " both starting and on the bench");
    }
    int used = 0;
    double last_sub = 0.0;
    for (const auto& s : m.substitutions) {
      if (s.side != side) continue;
      if (s.minute < last_sub) fail("substitutions out of order");
      last_sub = s.minute;
      if (++used > kMaxSubstitutions) fail("more than 3 substitutions for " + std::string(to_string(side)));
      if (!available.erase(s.player_in)) fail("substitute " + s.player_in + " not on the bench");
      if (!on_pitch.erase(s.player_out)) fail("substituted player " + s.player_out + " not on the pitch");
      on_pitch.insert(s.player_in);
    }
  }
}

std::vector<PlayerId> lineup_at(const MatchRecord& m, Side side, double minute, bool inclusive) {
  std::vector<PlayerId> lineup = m.lineup(side);
  for (const auto& s : m.substitutions) {
    if (s.side != side) continue;
    if (s.minute > minute || (!inclusive && s.minute == minute)) continue;
    auto it = std::find(lineup.begin(), lineup.end(), s.player_out);
    if (it != lineup.end()) *it = s.player_in;
  }
  return lineup;
}

}  // namespace tactics
