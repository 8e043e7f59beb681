#include "tactics/io.hpp"

#include <fstream>
#include <sstream>

#include "tactics/error.hpp"

namespace tactics {

void to_json(json& j, const Formation& f) { j = f.label(); }
void from_json(const json& j, Formation& f) { f = Formation::parse(j.get<std::string>()); }

void to_json(json& j, const TacticChoice& t) {
  j = json{{"formation", t.formation_label.empty() ? t.formation.label() : t.formation_label},
           {"style", t.style}};
}

void from_json(const json& j, TacticChoice& t) {
  const auto text = j.at("formation").get<std::string>();
  t.formation = Formation::parse(text);
  t.formation_label = text == t.formation.label() ? std::string() : text;
  t.style = j.at("style").get<int>();
}

void to_json(json& j, const OutcomeDistribution& d) {
  j = json{{"p_home", d.p_home}, {"p_draw", d.p_draw}, {"p_away", d.p_away}};
}

void from_json(const json& j, OutcomeDistribution& d) {
  d.p_home = j.at("p_home").get<double>();
  d.p_draw = j.at("p_draw").get<double>();
  d.p_away = j.at("p_away").get<double>();
}

void to_json(json& j, const GameState& s) {
  j = json{{"home_goals", s.home_goals}, {"away_goals", s.away_goals}, {"minute", s.minute}};
}

void from_json(const json& j, GameState& s) {
  s.home_goals = j.at("home_goals").get<int>();
  s.away_goals = j.at("away_goals").get<int>();
  s.minute = j.at("minute").get<double>();
}

void to_json(json& j, const PlayerProfile& p) {
  j = json{{"id", p.id}, {"team_id", p.team}, {"position", std::string(to_string(p.position))},
           {"contribution", p.contribution}};
}

void from_json(const json& j, PlayerProfile& p) {
  p.id = j.at("id").get<std::string>();
  p.team = j.value("team_id", std::string());
  p.position = parse_position(j.at("position").get<std::string>());
  p.contribution = j.at("contribution").get<double>();
}

void to_json(json& j, const Substitution& s) {
  j = json{{"minute", s.minute}, {"side", std::string(to_string(s.side))},
           {"player_in", s.player_in}, {"player_out", s.player_out}};
}

void from_json(const json& j, Substitution& s) {
  s.minute = j.at("minute").get<double>();
  s.side = parse_side(j.at("side").get<std::string>());
  s.player_in = j.at("player_in").get<std::string>();
  s.player_out = j.at("player_out").get<std::string>();
}

void to_json(json& j, const MatchRecord& m) {
  json goals = json::array();
  for (const auto& g : m.goals) goals.push_back({{"minute", g.minute}, {"side", std::string(to_string(g.side))}});
  j = json{{"round", m.round},
           {"home_team", m.home_team},
           {"away_team", m.away_team},
           {"home_tactic", m.home_tactic},
           {"away_tactic", m.away_tactic},
           {"goals", goals},
           {"final_score", {{"home", m.home_score}, {"away", m.away_score}}},
           {"home_lineup", m.home_lineup},
           {"away_lineup", m.away_lineup},
           {"home_bench", m.home_bench},
           {"away_bench", m.away_bench},
           {"substitutions", m.substitutions}};
}

void from_json(const json& j, MatchRecord& m) {
  m.round = j.at("round").get<int>();
  m.home_team = j.at("home_team").get<std::string>();
  m.away_team = j.at("away_team").get<std::string>();
  m.home_tactic = j.at("home_tactic").get<TacticChoice>();
  m.away_tactic = j.at("away_tactic").get<TacticChoice>();
  m.goals.clear();
  for (const auto& g : j.at("goals")) {
    m.goals.push_back({g.at("minute").get<double>(), parse_side(g.at("side").get<std::string>())});
  }
  m.home_score = j.at("final_score").at("home").get<int>();
  m.away_score = j.at("final_score").at("away").get<int>();
  m.home_lineup = j.at("home_lineup").get<std::vector<PlayerId>>();
  m.away_lineup = j.at("away_lineup").get<std::vector<PlayerId>>();
  m.home_bench = j.value("home_bench", std::vector<PlayerId>{});
  m.away_bench = j.value("away_bench", std::vector<PlayerId>{});
  m.substitutions = j.value("substitutions", std::vector<Substitution>{});
}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

template <typename T, typename Check>
std::vector<T> read_jsonl(const std::filesystem::path& path, Check check) {
  auto in = open_in(path);
  std::vector<T> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      T value = json::parse(line).get<T>();
      check(value);
      out.push_back(std::move(value));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& rows) {
  auto out = open_out(path);
  for (const auto& r : rows) out << json(r).dump() << '\n';
}

}  // namespace

std::vector<MatchRecord> read_matches_jsonl(const std::filesystem::path& path) {
  return read_jsonl<MatchRecord>(path, [](const MatchRecord& m) { validate_match(m); });
}

void write_matches_jsonl(const std::filesystem::path& path, const std::vector<MatchRecord>& matches) {
  write_jsonl(path, matches);
}

std::vector<PlayerProfile> read_players_jsonl(const std::filesystem::path& path) {
  return read_jsonl<PlayerProfile>(path, [](const PlayerProfile& p) { p.validate(); });
}

void write_players_jsonl(const std::filesystem::path& path, const std::vector<PlayerProfile>& players) {
  write_jsonl(path, players);
}

static constexpr const char* kStyleHeader = "team_id,passes,shots,goals_for,goals_against,tackles";

StyleTable read_style_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty style CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kStyleHeader) throw Error(path.string() + ": unexpected header '" + line + "'");
  StyleTable rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw Error(path.string() + ":" + std::to_string(lineno) + ": expected 6 columns");
    std::array<double, kStyleFeatureCount> values{};
    try {
      for (int i = 0; i < kStyleFeatureCount; ++i) values[i] = std::stod(cells[i + 1]);
    } catch (const std::exception&) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": non-numeric feature");
    }
    auto features = StyleFeatures::from_array(values);
    features.validate();
    rows.emplace_back(cells[0], features);
  }
  return rows;
}

void write_style_csv(const std::filesystem::path& path, const StyleTable& rows) {
  auto out = open_out(path);
  out << kStyleHeader << '\n';
  for (const auto& [team, f] : rows) {
    out << team;
    for (double v : f.as_array()) out << ',' << json(v).dump();
    out << '\n';
  }
}

json read_json_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tactics
