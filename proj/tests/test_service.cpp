#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "support.hpp"
#include "tactics/service.hpp"

using namespace tactics;
using namespace tactics::testing;

namespace {

struct Fixture {
  League league;
  ServiceContext ctx;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out{small_league("well_separated", 6, 2, 21), {}};
    FitConfig cfg;
    cfg.seed = 4;
    out.ctx.bundle = fit_bundle(out.league.matches, out.league.players, out.league.style_features, cfg);
    out.ctx.players = out.league.players;
    out.ctx.history = out.league.matches;
    out.ctx.clock = out.league.truth.config.clock;
    return out;
  }();
  return f;
}

using Query = std::multimap<std::string, std::string>;

Response call(TacticsService& svc, const std::string& method, const std::string& path, const json& body = nullptr,
              const Query& q = {}) {
  return svc.handle(method, path, q, body.is_null() ? "" : body.dump());
}

std::string new_session(TacticsService& svc, int round = 0) {
  const auto r = call(svc, "POST", "/sessions", {{"home_team", "T01"}, {"away_team", "T02"}, {"round", round}});
  REQUIRE(r.status == 201);
  return r.body.at("id").get<std::string>();
}

json goal(Side side, double minute) {
  return {{"type", "goal"}, {"side", std::string(to_string(side))}, {"minute", minute}};
}

}  // namespace

TEST_CASE("a fresh session lists 64 actions and every response carries the model version") {
  TacticsService svc(fixture().ctx);
  const auto id = new_session(svc);
  const auto r = call(svc, "GET", "/sessions/" + id + "/actions");
  REQUIRE(r.status == 200);
  CHECK(r.body.at("actions").size() == 64);
  CHECK(r.body.at("model_version") == svc.model_version());
  CHECK(call(svc, "GET", "/models").body.at("model_version") == svc.model_version());
  CHECK(call(svc, "GET", "/sessions/nope").body.at("model_version") == svc.model_version());
  CHECK(call(svc, "GET", "/models").body.at("has_transition_bank") == true);
}

TEST_CASE("a home goal moves the session to 1-0 and the actions use that state") {
  TacticsService svc(fixture().ctx);
  const auto id = new_session(svc);
  const auto r = call(svc, "POST", "/sessions/" + id + "/events", goal(Side::kHome, 12.0));
  REQUIRE(r.status == 200);
  CHECK(r.body.at("state").at("home_goals") == 1);
  CHECK(r.body.at("state").at("away_goals") == 0);
  CHECK(r.body.at("version") == 1);

  const auto a = call(svc, "GET", "/sessions/" + id + "/actions", nullptr, {{"approach", "reserved"}});
  const auto& ctx = fixture().ctx;
  const auto s = replay_session(id, json(r.body.at("fixture")).get<SessionFixture>(),
                                {json(goal(Side::kHome, 12.0)).get<SessionEvent>()}, make_roster(ctx.players), ctx.clock);
  const auto lib = choose_action(*ctx.bundle.bank, {1, 0, 12.0}, s.strategies, Side::kHome, ctx.clock.total() - 12.0,
                                 InMatchApproach::kReserved);
  auto expected = action_choice_json(lib, InMatchApproach::kReserved, svc.model_version());
  auto got = a.body;
  for (auto key : {"session", "version", "side", "state", "hypothetical"}) got.erase(key);
  CHECK(got == expected);
}

TEST_CASE("error contract: 404, 409 and 422") {
  TacticsService svc(fixture().ctx);
  CHECK(call(svc, "GET", "/sessions/s999").status == 404);
  CHECK(call(svc, "POST", "/sessions/s999/events", goal(Side::kHome, 1)).status == 404);
  CHECK(call(svc, "GET", "/nowhere").status == 404);
  CHECK(call(svc, "POST", "/sessions", {{"home_team", "T01"}, {"away_team", "X"}}).status == 404);

  const auto id = new_session(svc);
  auto stale = goal(Side::kAway, 5.0);
  stale["expected_version"] = 0;
  CHECK(call(svc, "POST", "/sessions/" + id + "/events", stale).status == 200);
  // Same expectation again: another writer already moved the session on.
  CHECK(call(svc, "POST", "/sessions/" + id + "/events", stale).status == 409);
  CHECK(call(svc, "POST", "/sessions/" + id + "/events", goal(Side::kAway, 2.0)).status == 422);
  CHECK(call(svc, "POST", "/sessions/" + id + "/events", json{{"type", "penalty"}, {"minute", 9}}).status == 422);

  const auto session = call(svc, "GET", "/sessions/" + id).body;
  const auto bench = session.at("home").at("bench");
  REQUIRE(bench.size() >= 4);
  auto sub = [&](int i, double minute) {
    return json{{"type", "substitution"},
                {"side", "home"},
                {"minute", minute},
                {"swaps", json::array({{{"player_in", bench[i].at("id")}}})}};
  };
  for (int i = 0; i < 3; ++i) CHECK(call(svc, "POST", "/sessions/" + id + "/events", sub(i, 50.0 + i)).status == 200);
  const auto fourth = call(svc, "POST", "/sessions/" + id + "/events", sub(3, 60.0));
  CHECK(fourth.status == 422);
  CHECK(call(svc, "GET", "/sessions/" + id).body.at("version") == 4);
}

TEST_CASE("recommendations are pure functions of state and models") {
  TacticsService svc(fixture().ctx);
  const auto id = new_session(svc, 5);
  for (auto path : {"/actions", "/prematch"}) {
    const auto a = call(svc, "GET", "/sessions/" + id + path, nullptr, {{"side", "away"}});
    const auto b = call(svc, "GET", "/sessions/" + id + path, nullptr, {{"side", "away"}});
    REQUIRE(a.status == 200);
    CHECK(a.body.dump() == b.body.dump());
  }
}

TEST_CASE("the pre-match payload equals the library recommendation") {
  TacticsService svc(fixture().ctx);
  const auto id = new_session(svc, 6);
  const auto r = call(svc, "GET", "/sessions/" + id + "/prematch", nullptr, {{"approach", "minmax"}, {"side", "away"}});
  REQUIRE(r.status == 200);
  const auto& ctx = fixture().ctx;
  BayesianGameConfig game;
  game.models = &ctx.bundle.prematch;
  game.our_team = "T02";
  game.opp_team = "T01";
  game.venue = Side::kAway;
  for (const auto& m : relabel_styles(ctx.history, ctx.bundle.prematch.clusters)) {
    if (m.round < 6) game.history.push_back(m);
  }
  auto got = r.body;
  for (auto key : {"session", "version", "side"}) got.erase(key);
  CHECK(got == recommendation_json(recommend_prematch(game, Approach::kMinmax), svc.model_version()));
}

TEST_CASE("hypothetical events leave the session untouched") {
  TacticsService svc(fixture().ctx);
  const auto id = new_session(svc);
  call(svc, "POST", "/sessions/" + id + "/events", goal(Side::kHome, 30.0));
  const auto before = call(svc, "GET", "/sessions/" + id).body.dump();
  const json what_if = json::array({goal(Side::kAway, 40.0), goal(Side::kAway, 41.0)});
  const auto r = call(svc, "POST", "/sessions/" + id + "/actions", {{"hypothetical", what_if}});
  REQUIRE(r.status == 200);
  CHECK(r.body.at("hypothetical") == true);
  CHECK(r.body.at("state").at("away_goals") == 2);
  const auto q = call(svc, "GET", "/sessions/" + id + "/actions", nullptr, {{"hypothetical", what_if.dump()}});
  CHECK(q.body.dump() == r.body.dump());
  CHECK(call(svc, "GET", "/sessions/" + id).body.dump() == before);
  CHECK(call(svc, "POST", "/sessions/" + id + "/actions", {{"hypothetical", json::array({goal(Side::kAway, 1.0)})}})
            .status == 422);
  CHECK(call(svc, "GET", "/sessions/" + id).body.dump() == before);
}

TEST_CASE("the event log replays to the current state") {
  TacticsService svc(fixture().ctx);
  const auto id = new_session(svc);
  const auto home_bench = call(svc, "GET", "/sessions/" + id).body.at("home").at("bench");
  const json events = json::array({goal(Side::kAway, 3.0),
                                   {{"type", "minute"}, {"minute", 20.0}},
                                   {{"type", "substitution"},
                                    {"side", "home"},
                                    {"minute", 55.0},
                                    {"swaps", json::array({{{"player_in", home_bench[0].at("id")}},
                                                           {{"player_in", home_bench[1].at("id")}}})}},
                                   goal(Side::kHome, 70.0)});
  for (const auto& e : events) REQUIRE(call(svc, "POST", "/sessions/" + id + "/events", e).status == 200);
  const auto live = call(svc, "GET", "/sessions/" + id).body;
  // The stored log carries the resolved outgoing players.
  const auto log = live.at("events").get<std::vector<SessionEvent>>();
  CHECK(log[2].swaps[0].second != "");
  const auto& ctx = fixture().ctx;
  const auto replayed = replay_session(id, live.at("fixture").get<SessionFixture>(), log, make_roster(ctx.players), ctx.clock);
  auto body = session_json(replayed);
  body["model_version"] = svc.model_version();
  CHECK(body == live);
}

TEST_CASE("the HTTP front end serves the same payloads over a socket") {
  TacticsService svc(fixture().ctx);
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread t([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  for (int i = 0; i < 100 && !client.Get("/models"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  const auto created = client.Post("/sessions", json{{"home_team", "T03"}, {"away_team", "T04"}}.dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto id = json::parse(created->body).at("id").get<std::string>();
  const auto posted = client.Post("/sessions/" + id + "/events", goal(Side::kHome, 10).dump(), "application/json");
  REQUIRE(posted);
  CHECK(json::parse(posted->body).at("state").at("home_goals") == 1);
  const auto actions = client.Get("/sessions/" + id + "/actions?approach=aggressive&side=away");
  REQUIRE(actions);
  CHECK(actions->status == 200);
  CHECK(json::parse(actions->body) ==
        svc.handle("GET", "/sessions/" + id + "/actions", {{"approach", "aggressive"}, {"side", "away"}}, "").body);
  const auto missing = client.Get("/sessions/zzz");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  server.stop();
  t.join();
}
