#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "tactics/domain.hpp"

namespace tactics {

using json = nlohmann::json;

void to_json(json& j, const Formation& f);
void from_json(const json& j, Formation& f);
void to_json(json& j, const TacticChoice& t);
void from_json(const json& j, TacticChoice& t);
void to_json(json& j, const OutcomeDistribution& d);
void from_json(const json& j, OutcomeDistribution& d);
void to_json(json& j, const GameState& s);
void from_json(const json& j, GameState& s);
void to_json(json& j, const PlayerProfile& p);
void from_json(const json& j, PlayerProfile& p);
void to_json(json& j, const MatchRecord& m);
void from_json(const json& j, MatchRecord& m);
void to_json(json& j, const Substitution& s);
void from_json(const json& j, Substitution& s);

// One MatchRecord per line. Every record is validated on load; the first
// violation aborts with the line number in the diagnostic.
std::vector<MatchRecord> read_matches_jsonl(const std::filesystem::path& path);
void write_matches_jsonl(const std::filesystem::path& path, const std::vector<MatchRecord>& matches);

std::vector<PlayerProfile> read_players_jsonl(const std::filesystem::path& path);
void write_players_jsonl(const std::filesystem::path& path, const std::vector<PlayerProfile>& players);

// CSV with header `team_id,passes,shots,goals_for,goals_against,tackles`.
using StyleTable = std::vector<std::pair<TeamId, StyleFeatures>>;
StyleTable read_style_csv(const std::filesystem::path& path);
void write_style_csv(const std::filesystem::path& path, const StyleTable& rows);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace tactics
