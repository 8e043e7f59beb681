// tactics: command-line front end for league generation, fitting, pre-match
// recommendation, walk-forward replay, simulation and the HTTP service.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "tactics/bundle.hpp"
#include "tactics/error.hpp"
#include "tactics/harness.hpp"
#include "tactics/io.hpp"
#include "tactics/league.hpp"
#include "tactics/service.hpp"

namespace fs = std::filesystem;
using namespace tactics;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string data_dir = "data";
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--data-dir", c.data_dir, "Dataset directory")->envname("TACTICS_DATA_DIR");
  cmd->add_option("--out", c.out, "Output path");
}

struct Dataset {
  std::vector<MatchRecord> matches;
  std::vector<PlayerProfile> players;
  StyleTable styles;
};

Dataset load_dataset(const fs::path& dir) {
  if (!fs::exists(dir / "matches.jsonl")) {
    throw NotFound("no dataset in " + dir.string() + " (run `tactics gen` first)");
  }
  Dataset d;
  d.matches = read_matches_jsonl(dir / "matches.jsonl");
  d.players = read_players_jsonl(dir / "players.jsonl");
  d.styles = read_style_csv(dir / "style_features.csv");
  return d;
}

fs::path models_dir(const Common& c, const std::string& explicit_dir) {
  return explicit_dir.empty() ? fs::path(c.data_dir) / "models" : fs::path(explicit_dir);
}

// JSON to --out when given, stdout otherwise.
void emit(const Common& c, const json& j) {
  if (c.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(c.out, j);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactical decision support for football matches"};
  app.require_subcommand(1);

  // gen
  Common gen_c;
  std::string preset = "well_separated";
  std::optional<int> teams, seasons, styles;
  std::optional<std::string> separation;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic league");
  add_common(gen, gen_c);
  gen->add_option("--preset", preset, "Generator preset")
      ->check(CLI::IsMember({"well_separated", "homogeneous", "tactic_sensitive", "planted_habit",
                             "contribution_sensitive", "degenerate_away"}));
  gen->add_option("--teams", teams, "Number of teams")->check(CLI::Range(2, 99));
  gen->add_option("--seasons", seasons, "Double round robins")->check(CLI::PositiveNumber);
  gen->add_option("--styles", styles, "Planted style count")->check(CLI::PositiveNumber);
  gen->add_option("--separation", separation, "Style separation")
      ->check(CLI::IsMember({"well_separated", "moderate", "overlapping"}));

  // fit
  Common fit_c;
  int fit_k = 0;
  std::optional<int> through_round;
  bool no_bank = false;
  auto* fit = app.add_subcommand("fit", "Fit strengths, clusters, formation model, payoff net and transition bank");
  add_common(fit, fit_c);
  fit->add_option("--k", fit_k, "Style count (0 = elbow rule)")->check(CLI::NonNegativeNumber);
  fit->add_option("--through-round", through_round, "Train on rounds up to this one only");
  fit->add_flag("--no-bank", no_bank, "Skip the in-match transition bank");

  // recommend
  Common rec_c;
  std::string rec_home, rec_away, rec_side = "home", rec_approach = "best", rec_models;
  std::optional<int> rec_round;
  auto* rec = app.add_subcommand("recommend", "Pre-match tactic recommendation");
  add_common(rec, rec_c);
  rec->add_option("--home", rec_home, "Home team")->required();
  rec->add_option("--away", rec_away, "Away team")->required();
  rec->add_option("--side", rec_side, "Side to advise")->check(CLI::IsMember({"home", "away"}));
  rec->add_option("--approach", rec_approach, "Optimization criterion")
      ->check(CLI::IsMember({"best", "spiteful", "minmax"}));
  rec->add_option("--round", rec_round, "Fixture round; opponent history uses earlier rounds");
  rec->add_option("--models", rec_models, "Model bundle directory (default DATA_DIR/models)");

  // replay
  Common rep_c;
  std::string stage = "prematch", rep_approach;
  int warmup = -1, refit_every = 8;
  bool heatmap = false;
  auto* rep = app.add_subcommand("replay", "Walk-forward replay of recorded matches");
  add_common(rep, rep_c);
  rep->add_option("--stage", stage, "Decision stage")->check(CLI::IsMember({"prematch", "inmatch"}));
  rep->add_option("--approach", rep_approach, "best|spiteful|minmax, or aggressive|reserved for inmatch");
  rep->add_option("--warmup", warmup, "Rounds without models (default: one leg)");
  rep->add_option("--refit-every", refit_every, "Rounds between refits")->check(CLI::PositiveNumber);
  rep->add_flag("--heatmap", heatmap, "Also write the per-scoreline transition accuracy grid");

  // serve
  Common srv_c;
  int port = 8080;
  std::string host = "127.0.0.1", srv_models;
  auto* srv = app.add_subcommand("serve", "Serve the HTTP API");
  add_common(srv, srv_c);
  srv->add_option("--port", port, "TCP port (0 = any)")->check(CLI::Range(0, 65535));
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--models", srv_models, "Model bundle directory (default DATA_DIR/models)");

  // simulate
  Common sim_c;
  std::string sim_home, sim_away, sim_home_f = "4-4-2", sim_away_f = "4-4-2";
  int runs = 1000;
  auto* sim = app.add_subcommand("simulate", "Simulate a fixture under the planted ground truth");
  add_common(sim, sim_c);
  sim->add_option("--home", sim_home, "Home team")->required();
  sim->add_option("--away", sim_away, "Away team")->required();
  sim->add_option("--home-formation", sim_home_f, "Home formation");
  sim->add_option("--away-formation", sim_away_f, "Away formation");
  sim->add_option("--runs", runs, "Replicates")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) {
      auto cfg = GeneratorConfig::preset(preset);
      cfg.seed = gen_c.seed;
      if (teams) cfg.teams = *teams;
      if (seasons) cfg.seasons = *seasons;
      if (styles) cfg.styles = *styles;
      if (separation) cfg.separation = parse_separation(*separation);
      const League league = generate_league(cfg);
      const fs::path out = gen_c.out.empty() ? fs::path(gen_c.data_dir) : fs::path(gen_c.out);
      fs::create_directories(out);
      write_matches_jsonl(out / "matches.jsonl", league.matches);
      write_players_jsonl(out / "players.jsonl", league.players);
      write_style_csv(out / "style_features.csv", league.style_features);
      write_json_file(out / "truth.json", league.truth);
      std::cout << "wrote " << league.matches.size() << " matches, " << league.players.size() << " players to "
                << out.string() << "\n";
    } else if (fit->parsed()) {
      Dataset d = load_dataset(fit_c.data_dir);
      if (through_round) {
        std::erase_if(d.matches, [&](const MatchRecord& m) { return m.round > *through_round; });
      }
      FitConfig cfg;
      cfg.seed = fit_c.seed;
      cfg.k = fit_k;
      cfg.fit_bank = !no_bank;
      const ModelBundle b = fit_bundle(d.matches, d.players, d.styles, cfg);
      const fs::path out = models_dir(fit_c, fit_c.out);
      save_bundle(out, b);
      std::cout << "fitted " << b.prematch.clusters.k << " styles on " << b.training_matches
                << " matches; model version " << b.version << " in " << out.string() << "\n";
    } else if (rec->parsed()) {
      const ModelBundle b = load_bundle(models_dir(rec_c, rec_models));
      const Dataset d = load_dataset(rec_c.data_dir);
      const Side side = parse_side(rec_side);
      BayesianGameConfig game;
      game.models = &b.prematch;
      game.our_team = side == Side::kHome ? rec_home : rec_away;
      game.opp_team = side == Side::kHome ? rec_away : rec_home;
      game.venue = side;
      for (const auto& m : relabel_styles(d.matches, b.prematch.clusters)) {
        if (!rec_round || m.round < *rec_round) game.history.push_back(m);
      }
      json j = recommendation_json(recommend_prematch(game, parse_approach(rec_approach)), b.version);
      j["side"] = rec_side;
      emit(rec_c, j);
    } else if (rep->parsed()) {
      const Dataset d = load_dataset(rep_c.data_dir);
      std::map<TeamId, int> seen;
      for (const auto& m : d.matches) seen[m.home_team] = 0;
      const int leg = std::max<int>(1, static_cast<int>(seen.size()) - 1);
      FitConfig cfg;
      cfg.seed = rep_c.seed;
      cfg.fit_bank = stage == "inmatch";
      auto provider = std::make_shared<WalkForwardProvider>(d.matches, d.players, d.styles, cfg,
                                                            warmup >= 0 ? warmup : leg, refit_every);
      ModelProvider models = [provider](int round) { return (*provider)(round); };
      ReplayReport report;
      if (stage == "prematch") {
        report = replay_prematch(d.matches, models, parse_approach(rep_approach.empty() ? "best" : rep_approach));
      } else {
        report = replay_inmatch(d.matches, d.players, models,
                                parse_inmatch_approach(rep_approach.empty() ? "aggressive" : rep_approach));
      }
      const fs::path out = rep_c.out.empty() ? fs::path(rep_c.data_dir) / ("replay_" + stage) : fs::path(rep_c.out);
      fs::create_directories(out);
      write_json_file(out / "report.json", report_json(report));
      write_text_file(out / "report.csv", report_csv(report));
      if (heatmap) write_text_file(out / "heatmap.csv", heatmap_csv(report));
      std::cout << report_summary(report).dump(2) << "\n";
    } else if (srv->parsed()) {
      ServiceContext ctx;
      ctx.bundle = load_bundle(models_dir(srv_c, srv_models));
      const Dataset d = load_dataset(srv_c.data_dir);
      ctx.players = d.players;
      ctx.history = d.matches;
      TacticsService service(std::move(ctx));
      HttpServer server(service);
      const int bound = server.bind(host, port);
      std::cout << "listening on http://" << host << ":" << bound << " (model " << service.model_version() << ")"
                << std::endl;
      server.listen();
    } else if (sim->parsed()) {
      const fs::path dir = sim_c.data_dir;
      if (!fs::exists(dir / "truth.json")) throw NotFound("no ground truth in " + dir.string());
      const GroundTruth truth = read_json_file(dir / "truth.json").get<GroundTruth>();
      const auto players = read_players_jsonl(dir / "players.jsonl");
      const Roster roster = make_roster(players);
      MatchRecord fixture;
      fixture.round = 1;
      fixture.home_team = sim_home;
      fixture.away_team = sim_away;
      for (Side side : {Side::kHome, Side::kAway}) {
        const TeamId& team = fixture.team(side);
        auto it = truth.styles.find(team);
        if (it == truth.styles.end()) throw NotFound("unknown team '" + team + "'");
        TacticChoice t;
        t.formation = Formation::parse(side == Side::kHome ? sim_home_f : sim_away_f);
        t.style = it->second;
        std::vector<PlayerProfile> squad;
        for (const auto& p : players) {
          if (p.team == team) squad.push_back(p);
        }
        auto [lineup, bench] = select_lineup(squad, t.formation);
        (side == Side::kHome ? fixture.home_tactic : fixture.away_tactic) = t;
        (side == Side::kHome ? fixture.home_lineup : fixture.away_lineup) = lineup;
        (side == Side::kHome ? fixture.home_bench : fixture.away_bench) = bench;
      }
      const std::vector<MatchRecord> fixtures(static_cast<std::size_t>(runs), fixture);
      const auto played = simulate_batch(truth, roster, fixtures, sim_c.seed);
      double counts[3] = {0, 0, 0};
      double goals_h = 0, goals_a = 0;
      for (const auto& m : played) {
        counts[static_cast<int>(m.result())] += 1;
        goals_h += m.home_score;
        goals_a += m.away_score;
      }
      json j{{"home", sim_home},
             {"away", sim_away},
             {"home_tactic", fixture.home_tactic},
             {"away_tactic", fixture.away_tactic},
             {"runs", runs},
             {"empirical", OutcomeDistribution{counts[0] / runs, counts[1] / runs, counts[2] / runs}},
             {"mean_home_goals", goals_h / runs},
             {"mean_away_goals", goals_a / runs}};
      if (truth.config.homogeneous()) {
        j["analytic"] = analytic_outcome_probs(truth, sim_home, sim_away, fixture.home_tactic, fixture.away_tactic);
      }
      emit(sim_c, j);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
