#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tactics/bundle.hpp"
#include "tactics/error.hpp"
#include "tactics/inmatch.hpp"

namespace httplib {
class Server;
}

namespace tactics {

// An event the session state machine rejects (HTTP 422).
class IllegalEvent : public Error {
 public:
  using Error::Error;
};

// Optimistic-concurrency failure (HTTP 409).
class StaleVersion : public Error {
 public:
  using Error::Error;
};

struct SessionFixture {
  int round = 0;
  TeamId home_team;
  TeamId away_team;
  TacticChoice home_tactic;
  TacticChoice away_tactic;
  std::vector<PlayerId> home_lineup;
  std::vector<PlayerId> away_lineup;
  std::vector<PlayerId> home_bench;
  std::vector<PlayerId> away_bench;
};

struct SessionEvent {
  enum class Type { kGoal, kMinute, kSubstitution };
  Type type = Type::kMinute;
  Side side = Side::kHome;
  double minute = 0.0;
  // (player_in, player_out); an empty player_out is filled by the pairing rule.
  std::vector<std::pair<PlayerId, PlayerId>> swaps;
};

struct SessionState {
  std::string id;
  SessionFixture fixture;
  std::vector<SessionEvent> log;
  GameState state;
  MatchStrategies strategies;
  int version = 0;  // number of events applied
};

SessionState start_session(std::string id, const SessionFixture& fixture, const Roster& roster);
// Next state, or IllegalEvent. The input is left untouched.
SessionState apply_event(const SessionState& session, const SessionEvent& event, const MatchClock& clock);
SessionState replay_session(std::string id, const SessionFixture& fixture, const std::vector<SessionEvent>& log,
                            const Roster& roster, const MatchClock& clock);

void to_json(json& j, const SessionEvent& e);
void from_json(const json& j, SessionEvent& e);
void to_json(json& j, const SessionFixture& f);
void from_json(const json& j, SessionFixture& f);
json session_json(const SessionState& s);

struct ServiceContext {
  ModelBundle bundle;
  std::vector<PlayerProfile> players;
  std::vector<MatchRecord> history;  // recorded matches, used for opponent windows
  MatchClock clock;
  Exec exec = Exec::kParallel;
};

struct Response {
  int status = 200;
  json body;
};

// Request handling without the socket layer, so routes are testable in-process.
class TacticsService {
 public:
  explicit TacticsService(ServiceContext context);

  Response handle(const std::string& method, const std::string& path, const std::multimap<std::string, std::string>& query,
                  const std::string& body);

  const std::string& model_version() const { return ctx_.bundle.version; }

 private:
  json create_session(const json& body);
  SessionState snapshot(const std::string& id) const;
  json post_event(const std::string& id, const json& body);
  json prematch(const std::string& id, const std::multimap<std::string, std::string>& query) const;
  json actions(const std::string& id, const std::multimap<std::string, std::string>& query) const;
  json models() const;

  ServiceContext ctx_;
  Roster roster_;
  std::vector<MatchRecord> relabelled_history_;
  mutable std::mutex mu_;
  std::map<std::string, SessionState> sessions_;
  std::uint64_t next_id_ = 1;
};

// cpp-httplib front end; every route forwards to TacticsService::handle.
class HttpServer {
 public:
  explicit HttpServer(TacticsService& service);
  ~HttpServer();
  // Returns the bound port; 0 asks for any free port.
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void stop();

 private:
  TacticsService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace tactics
