#include "tactics/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <sstream>

#include "tactics/error.hpp"
#include "tactics/league.hpp"

namespace tactics {

namespace {

InMatchStrategy initial_strategy(const SessionFixture& f, Side side, const Roster& roster) {
  InMatchStrategy s;
  s.team = side == Side::kHome ? f.home_team : f.away_team;
  s.tactic = side == Side::kHome ? f.home_tactic : f.away_tactic;
  auto profile = [&](const PlayerId& id) {
    auto it = roster.find(id);
    if (it == roster.end()) throw IllegalEvent("player '" + id + "' is not in the roster");
    if (it->second.team != s.team) throw IllegalEvent("player '" + id + "' does not play for " + s.team);
    return it->second;
  };
  for (const auto& id : side == Side::kHome ? f.home_lineup : f.away_lineup) s.lineup.push_back(profile(id));
  for (const auto& id : side == Side::kHome ? f.home_bench : f.away_bench) s.bench.push_back(profile(id));
  s.subs_remaining = kMaxSubstitutions;
  try {
    s.validate();
  } catch (const Error& e) {
    throw IllegalEvent(e.what());
  }
  return s;
}

std::string_view event_name(SessionEvent::Type t) {
  switch (t) {
    case SessionEvent::Type::kGoal: return "goal";
    case SessionEvent::Type::kMinute: return "minute";
    case SessionEvent::Type::kSubstitution: return "substitution";
  }
  return "?";
}

}  // namespace

SessionState start_session(std::string id, const SessionFixture& fixture, const Roster& roster) {
  if (fixture.home_team == fixture.away_team) throw IllegalEvent("a team cannot play itself");
  SessionState s;
  s.id = std::move(id);
  s.fixture = fixture;
  s.strategies.home = initial_strategy(fixture, Side::kHome, roster);
  s.strategies.away = initial_strategy(fixture, Side::kAway, roster);
  return s;
}

SessionState apply_event(const SessionState& session, const SessionEvent& event, const MatchClock& clock) {
  if (!(event.minute >= session.state.minute)) {
    throw IllegalEvent("event at minute " + std::to_string(event.minute) + " precedes the current minute " +
                       std::to_string(session.state.minute));
  }
  if (event.minute > clock.total()) throw IllegalEvent("event after full time");
  SessionState next = session;
  SessionEvent resolved = event;
  switch (event.type) {
    case SessionEvent::Type::kGoal:
      (event.side == Side::kHome ? next.state.home_goals : next.state.away_goals)++;
      break;
    case SessionEvent::Type::kMinute:
      resolved.swaps.clear();
      break;
    case SessionEvent::Type::kSubstitution: {
      auto& strategy = next.strategies.side(event.side);
      if (event.swaps.empty()) throw IllegalEvent("substitution event without players");
      if (static_cast<int>(event.swaps.size()) > strategy.subs_remaining) {
        throw IllegalEvent(std::to_string(event.swaps.size()) + " substitutions requested with " +
                           std::to_string(strategy.subs_remaining) + " remaining");
      }
      const auto unpaired = std::count_if(event.swaps.begin(), event.swaps.end(),
                                          [](const auto& s) { return s.second.empty(); });
      SubstitutionAction action{event.swaps};
      try {
        if (unpaired == static_cast<long>(event.swaps.size())) {
          action = assign_outgoing(action, strategy);
        } else if (unpaired != 0) {
          throw IllegalEvent("either name every outgoing player or none");
        }
        strategy = apply_action(strategy, action);
      } catch (const IllegalEvent&) {
        throw;
      } catch (const Error& e) {
        throw IllegalEvent(e.what());
      }
      resolved.swaps = action.swaps;
      break;
    }
  }
  next.state.minute = event.minute;
  next.log.push_back(resolved);
  ++next.version;
  return next;
}

SessionState replay_session(std::string id, const SessionFixture& fixture, const std::vector<SessionEvent>& log,
                            const Roster& roster, const MatchClock& clock) {
  SessionState s = start_session(std::move(id), fixture, roster);
  for (const auto& e : log) s = apply_event(s, e, clock);
  return s;
}

void to_json(json& j, const SessionEvent& e) {
  j = json{{"type", std::string(event_name(e.type))}, {"minute", e.minute}};
  if (e.type != SessionEvent::Type::kMinute) j["side"] = std::string(to_string(e.side));
  if (e.type == SessionEvent::Type::kSubstitution) {
    json swaps = json::array();
    for (const auto& [in, out] : e.swaps) swaps.push_back({{"player_in", in}, {"player_out", out}});
    j["swaps"] = swaps;
  }
}

void from_json(const json& j, SessionEvent& e) {
  if (!j.is_object()) throw IllegalEvent("event must be a JSON object");
  const auto type = j.at("type").get<std::string>();
  if (type == "goal") {
    e.type = SessionEvent::Type::kGoal;
  } else if (type == "minute") {
    e.type = SessionEvent::Type::kMinute;
  } else if (type == "substitution") {
    e.type = SessionEvent::Type::kSubstitution;
  } else {
    throw IllegalEvent("unknown event type '" + type + "'");
  }
  e.minute = j.at("minute").get<double>();
  e.side = j.contains("side") ? parse_side(j.at("side").get<std::string>()) : Side::kHome;
  if (e.type != SessionEvent::Type::kMinute && !j.contains("side")) throw IllegalEvent(type + " event needs a side");
  e.swaps.clear();
  if (e.type == SessionEvent::Type::kSubstitution) {
    for (const auto& s : j.at("swaps")) {
      e.swaps.emplace_back(s.at("player_in").get<std::string>(), s.value("player_out", std::string()));
    }
  }
}

void to_json(json& j, const SessionFixture& f) {
  j = json{{"round", f.round},
           {"home_team", f.home_team},
           {"away_team", f.away_team},
           {"home_tactic", f.home_tactic},
           {"away_tactic", f.away_tactic},
           {"home_lineup", f.home_lineup},
           {"away_lineup", f.away_lineup},
           {"home_bench", f.home_bench},
           {"away_bench", f.away_bench}};
}

void from_json(const json& j, SessionFixture& f) {
  f.round = j.value("round", 0);
  j.at("home_team").get_to(f.home_team);
  j.at("away_team").get_to(f.away_team);
  j.at("home_tactic").get_to(f.home_tactic);
  j.at("away_tactic").get_to(f.away_tactic);
  j.at("home_lineup").get_to(f.home_lineup);
  j.at("away_lineup").get_to(f.away_lineup);
  j.at("home_bench").get_to(f.home_bench);
  j.at("away_bench").get_to(f.away_bench);
}

json session_json(const SessionState& s) {
  return json{{"id", s.id},
              {"version", s.version},
              {"fixture", s.fixture},
              {"state", s.state},
              {"home", s.strategies.home},
              {"away", s.strategies.away},
              {"events", s.log}};
}

TacticsService::TacticsService(ServiceContext context) : ctx_(std::move(context)) {
  roster_ = make_roster(ctx_.players);
  relabelled_history_ = relabel_styles(ctx_.history, ctx_.bundle.prematch.clusters);
  std::stable_sort(relabelled_history_.begin(), relabelled_history_.end(),
                   [](const MatchRecord& a, const MatchRecord& b) { return a.round < b.round; });
}

namespace {

std::string query_value(const std::multimap<std::string, std::string>& q, const std::string& key,
                        const std::string& fallback) {
  auto it = q.find(key);
  return it == q.end() ? fallback : it->second;
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed JSON body: ") + e.what());
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

}  // namespace

json TacticsService::create_session(const json& body) {
  SessionFixture f;
  try {
    f.round = body.value("round", 0);
    f.home_team = body.at("home_team").get<std::string>();
    f.away_team = body.at("away_team").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(std::string("session fixture: ") + e.what());
  }
  const auto& clusters = ctx_.bundle.prematch.clusters;
  for (Side side : {Side::kHome, Side::kAway}) {
    const std::string prefix = side == Side::kHome ? "home" : "away";
    const TeamId& team = side == Side::kHome ? f.home_team : f.away_team;
    TacticChoice tactic;
    const json t = body.value(prefix + "_tactic", json::object());
    tactic.formation = Formation::parse(t.value("formation", std::string("4-4-2")));
    tactic.style = t.contains("style") ? t.at("style").get<int>() : clusters.style_of(team);
    if (tactic.style < 0 || tactic.style >= clusters.k) throw IllegalEvent("style out of range");
    std::vector<PlayerId> lineup, bench;
    if (body.contains(prefix + "_lineup")) {
      lineup = body.at(prefix + "_lineup").get<std::vector<PlayerId>>();
      bench = body.value(prefix + "_bench", std::vector<PlayerId>{});
    } else {
      std::vector<PlayerProfile> squad;
      for (const auto& p : ctx_.players) {
        if (p.team == team) squad.push_back(p);
      }
      if (squad.empty()) throw NotFound("team '" + team + "' has no players");
      std::tie(lineup, bench) = select_lineup(squad, tactic.formation);
    }
    (side == Side::kHome ? f.home_tactic : f.away_tactic) = tactic;
    (side == Side::kHome ? f.home_lineup : f.away_lineup) = lineup;
    (side == Side::kHome ? f.home_bench : f.away_bench) = bench;
  }
  std::lock_guard<std::mutex> lock(mu_);
  const std::string id = "s" + std::to_string(next_id_);
  SessionState s = start_session(id, f, roster_);
  ++next_id_;
  sessions_.emplace(id, s);
  return session_json(s);
}

SessionState TacticsService::snapshot(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
  return it->second;
}

json TacticsService::post_event(const std::string& id, const json& body) {
  SessionEvent event;
  try {
    event = body.get<SessionEvent>();
  } catch (const json::exception& e) {
    throw IllegalEvent(std::string("malformed event: ") + e.what());
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
  if (body.contains("expected_version") && body.at("expected_version").get<int>() != it->second.version) {
    throw StaleVersion("session " + id + " is at version " + std::to_string(it->second.version) + ", not " +
                       std::to_string(body.at("expected_version").get<int>()));
  }
  it->second = apply_event(it->second, event, ctx_.clock);
  return session_json(it->second);
}

json TacticsService::prematch(const std::string& id, const std::multimap<std::string, std::string>& query) const {
  const SessionState s = snapshot(id);
  const Side side = parse_side(query_value(query, "side", "home"));
  const Approach approach = parse_approach(query_value(query, "approach", "best_response"));
  BayesianGameConfig game;
  game.models = &ctx_.bundle.prematch;
  game.our_team = side == Side::kHome ? s.fixture.home_team : s.fixture.away_team;
  game.opp_team = side == Side::kHome ? s.fixture.away_team : s.fixture.home_team;
  game.venue = side;
  for (const auto& m : relabelled_history_) {
    if (s.fixture.round <= 0 || m.round < s.fixture.round) game.history.push_back(m);
  }
  game.exec = ctx_.exec;
  json out = recommendation_json(recommend_prematch(game, approach), ctx_.bundle.version);
  out["session"] = s.id;
  out["version"] = s.version;
  out["side"] = std::string(to_string(side));
  return out;
}

json TacticsService::actions(const std::string& id, const std::multimap<std::string, std::string>& query) const {
  SessionState s = snapshot(id);
  if (!ctx_.bundle.bank) throw NotFound("model bundle has no transition bank");
  const Side side = parse_side(query_value(query, "side", "home"));
  const InMatchApproach approach = parse_inmatch_approach(query_value(query, "approach", "aggressive"));
  const std::string hypothetical = query_value(query, "hypothetical", "");
  const bool what_if = !hypothetical.empty();
  if (what_if) {
    const json events = parse_body(hypothetical);
    if (!events.is_array()) throw IllegalEvent("hypothetical must be a JSON array of events");
    for (const auto& e : events) {
      try {
        s = apply_event(s, e.get<SessionEvent>(), ctx_.clock);
      } catch (const json::exception& ex) {
        throw IllegalEvent(std::string("malformed hypothetical event: ") + ex.what());
      }
    }
  }
  const double remaining = std::max(0.0, ctx_.clock.total() - s.state.minute);
  const auto choice = choose_action(*ctx_.bundle.bank, s.state, s.strategies, side, remaining, approach, ctx_.exec);
  json out = action_choice_json(choice, approach, ctx_.bundle.version);
  out["session"] = s.id;
  out["version"] = s.version;
  out["side"] = std::string(to_string(side));
  out["state"] = s.state;
  out["hypothetical"] = what_if;
  return out;
}

json TacticsService::models() const {
  return json{{"model_version", ctx_.bundle.version},
              {"trained_through_round", ctx_.bundle.trained_through_round},
              {"training_matches", ctx_.bundle.training_matches},
              {"num_styles", ctx_.bundle.prematch.clusters.k},
              {"has_transition_bank", ctx_.bundle.bank.has_value()}};
}

Response TacticsService::handle(const std::string& method, const std::string& path,
                                const std::multimap<std::string, std::string>& query, const std::string& body) {
  Response r;
  try {
    const auto parts = split_path(path);
    auto route = [&](const std::string& want_method, std::size_t size, const char* last) {
      return method == want_method && parts.size() == size && (last == nullptr || parts.back() == last);
    };
    if (parts.empty()) {
      r = {404, {{"error", "unknown route"}}};
    } else if (parts[0] == "models" && route("GET", 1, nullptr)) {
      r.body = models();
    } else if (parts[0] != "sessions") {
      r = {404, {{"error", "unknown route " + path}}};
    } else if (route("POST", 1, nullptr)) {
      r = {201, create_session(parse_body(body))};
    } else if (route("GET", 2, nullptr)) {
      r.body = session_json(snapshot(parts[1]));
    } else if (route("POST", 3, "events")) {
      r.body = post_event(parts[1], parse_body(body));
    } else if (route("GET", 3, "prematch")) {
      r.body = prematch(parts[1], query);
    } else if (route("GET", 3, "actions") || route("POST", 3, "actions")) {
      auto q = query;
      if (method == "POST") {
        const json b = parse_body(body);
        if (b.contains("hypothetical")) q.emplace("hypothetical", b.at("hypothetical").dump());
      }
      r.body = actions(parts[1], q);
    } else {
      r = {404, {{"error", "unknown route " + method + " " + path}}};
    }
  } catch (const NotFound& e) {
    r = {404, {{"error", e.what()}}};
  } catch (const IllegalEvent& e) {
    r = {422, {{"error", e.what()}}};
  } catch (const StaleVersion& e) {
    r = {409, {{"error", e.what()}}};
  } catch (const Error& e) {
    r = {400, {{"error", e.what()}}};
  } catch (const std::exception& e) {
    r = {500, {{"error", e.what()}}};
  }
  if (r.body.is_object()) r.body["model_version"] = ctx_.bundle.version;
  return r;
}

HttpServer::HttpServer(TacticsService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = service_.handle(req.method, req.path, req.params, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server_->Get(".*", forward);
  server_->Post(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  if (!server_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace tactics
