// hmi: batch trials, paired comparisons, log replay and the live gateway.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <boost/asio/signal_set.hpp>

#include "CLI11.hpp"

#include "hmi/gateway/server.hpp"
#include "hmi/harness/config.hpp"
#include "hmi/harness/experiment.hpp"
#include "hmi/harness/replay.hpp"
#include "hmi/harness/trial.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hmi::ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw hmi::RuntimeFailure("failed writing '" + path + "'");
}

struct Common {
  std::string scenario;
  std::string params;
  std::string criticality = hmi::bundled_data_path("criticality.ahp");
  std::vector<std::string> set;

  void add_to(CLI::App* cmd, bool scenario_required = true) {
    cmd->add_option("--scenario", scenario, "scenario map file")->required(scenario_required)->check(CLI::ExistingFile);
    cmd->add_option("--params", params, "parameter file with optional [operator.<kind>] sections")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", set, "parameter override name=value (repeatable)");
    cmd->add_option("--criticality", criticality, "AHP criticality matrix ordering the switcher tiers")
        ->capture_default_str();
  }

  hmi::ParamsFile params_file() const { return params.empty() ? hmi::ParamsFile{} : hmi::load_params_file(params); }

  std::shared_ptr<const hmi::World> world(const hmi::ParamsFile& file) const {
    return hmi::load_world(scenario, file, set, hmi::load_tier_order(criticality));
  }
};

hmi::ControllerKind controller_from(const std::string& name) {
  const auto c = hmi::parse_controller(name);
  if (!c) throw hmi::ConfigError("controller must be 'emics' or 'hieremics'");
  return *c;
}

int cmd_run(const Common& common, const std::string& controller, const std::string& op, std::uint64_t seed,
            const std::string& out, const std::string& log) {
  const auto file = common.params_file();
  const auto world = common.world(file);
  const auto setup = hmi::resolve_operator(op, world->scenario.params, file, common.set);
  hmi::TrialConfig cfg{common.scenario, controller_from(controller), setup.script, seed, setup.params,
                       hmi::LOA::Teleoperation, {}};
  const auto result = hmi::run_trial(world, cfg);
  const std::string metrics = hmi::to_json(result.metrics).dump(2) + "\n";
  if (out.empty()) std::cout << metrics;
  else write_file(out, metrics);
  if (!log.empty()) write_file(log, result.log);
  return 0;
}

int cmd_compare(const Common& common, const std::string& operators, std::uint64_t n_seeds, std::uint64_t first_seed,
                const std::string& out, std::string json_out, const std::string& logs_dir, unsigned threads) {
  const auto file = common.params_file();
  hmi::ExperimentSpec spec;
  spec.world = common.world(file);
  spec.scenario_label = common.scenario;
  spec.params_file = file;
  spec.cli_overrides = common.set;
  spec.seeds = hmi::seed_range(n_seeds, first_seed);
  spec.keep_logs = !logs_dir.empty();
  spec.threads = threads;
  std::istringstream ops(operators);
  for (std::string o; std::getline(ops, o, ',');)
    if (!hmi::detail::trim(o).empty()) spec.operators.push_back(hmi::detail::trim(o));

  const auto result = hmi::run_experiment(spec);
  const auto reports = result.reports();
  write_file(out, hmi::report_csv(reports));
  if (json_out.empty()) json_out = std::filesystem::path(out).replace_extension(".json").string();
  write_file(json_out, hmi::report_json(reports).dump(2) + "\n");
  for (const auto& rep : reports) {
    if (!rep.label.empty()) std::cout << "[" << rep.label << "]\n";
    for (const auto& row : rep.rows) std::cout << hmi::format_row(row) << "\n";
  }
  if (spec.keep_logs) {
    std::filesystem::create_directories(logs_dir);
    for (const auto& r : result.per_operator) {
      auto dump = [&](const std::vector<hmi::TrialResult>& trials, const char* ctrl) {
        for (const auto& t : trials)
          write_file((std::filesystem::path(logs_dir) /
                      (r.op + "_" + ctrl + "_" + std::to_string(t.metrics.seed) + ".jsonl"))
                         .string(),
                     t.log);
      };
      dump(r.emics, "emics");
      dump(r.hier, "hieremics");
    }
  }
  return 0;
}

int cmd_validate(const Common& common) {
  const auto file = common.params_file();
  const auto world = common.world(file);
  const auto& sc = world->scenario;
  const auto& g = sc.grid;
  std::cout << "grid " << g.width() << " x " << g.height() << " cells at " << g.resolution() << " m\n";
  std::cout << "start (" << sc.start.x << ", " << sc.start.y << ")\n";
  for (std::size_t i = 0; i < sc.goals.size(); ++i) {
    const auto& goal = sc.goals[i];
    std::cout << "goal " << goal.id << " " << hmi::to_string(goal.kind) << " (" << goal.position.x << ", "
              << goal.position.y << ")";
    if (goal.aoi) std::cout << " aoi " << *goal.aoi;
    std::cout << " path " << world->fields[i].distance_from(sc.start.position()) << " m\n";
  }
  for (const auto& r : world->regions)
    std::cout << "aoi " << r.id << " region (" << r.lo.x << ", " << r.lo.y << ")-(" << r.hi.x << ", " << r.hi.y
              << ")\n";
  const auto pr = hmi::ahp::priority_weights(hmi::ahp::parse_matrix(hmi::read_text_file(common.criticality)));
  std::cout << "tiers";
  for (auto t : world->tier_order) std::cout << " " << hmi::kTierNames[static_cast<std::size_t>(t)];
  std::cout << " (CR " << pr.consistency.cr << ")\nok\n";
  return 0;
}

int cmd_replay(const std::string& path) {
  const auto r = hmi::replay(hmi::read_text_file(path));
  std::cout << "recomputed " << hmi::to_json(r.recomputed).dump() << "\n";
  std::cout << "recorded   " << hmi::to_json(r.recorded).dump() << "\n";
  if (!r.matches()) {
    std::cerr << "hmi: replayed metrics differ from the recorded ones\n";
    return kExitRuntime;
  }
  std::cout << "match\n";
  return 0;
}

int cmd_serve(const Common& common, unsigned short port, const std::string& controller, std::uint64_t seed,
              const std::string& log) {
  const auto file = common.params_file();
  const auto world = common.world(file);
  hmi::gateway::SessionConfig cfg{common.scenario, controller_from(controller), seed, world->scenario.params};
  int trial_no = 0;
  auto sink = [&](const std::string& text) {
    if (log.empty()) return;
    const std::string path = trial_no == 0 ? log : log + "." + std::to_string(trial_no);
    ++trial_no;
    try {
      write_file(path, text);
      std::cerr << "hmi: session log written to " << path << "\n";
    } catch (const std::exception& e) {
      std::cerr << "hmi: " << e.what() << "\n";
    }
  };

  boost::asio::io_context io;
  hmi::gateway::Server server(io, {boost::asio::ip::tcp::v4(), port},
                              [&] { return std::make_unique<hmi::gateway::Session>(world, cfg, sink); });
  server.start();
  boost::asio::signal_set signals(io, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code&, int) {
    server.stop();
    io.stop();
  });
  std::cerr << "hmi: serving " << common.scenario << " (" << controller << ") on ws://0.0.0.0:" << server.port()
            << "\n";
  io.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-initiative teleoperation simulator: EMICS vs HierEMICS"};
  app.require_subcommand(1);

  Common run_c, cmp_c, val_c, srv_c;
  std::string controller = "hieremics", op = "compliant", out, log, operators, json_out, logs_dir;
  std::uint64_t seed = 1, n_seeds = 20, first_seed = 1;
  unsigned threads = 0;
  unsigned short port = 8765;

  auto* run = app.add_subcommand("run", "run one trial");
  run_c.add_to(run);
  run->add_option("--controller", controller, "emics or hieremics")->required();
  run->add_option("--operator", op, "operator kind, e.g. conflict-prone+distracted")->required();
  run->add_option("--seed", seed, "trial seed")->required();
  run->add_option("--out", out, "metrics JSON file (default stdout)");
  run->add_option("--log", log, "event log JSONL file");

  auto* cmp = app.add_subcommand("compare", "paired EMICS/HierEMICS experiment");
  cmp_c.add_to(cmp);
  cmp->add_option("--operators", operators, "comma-separated operator kinds")->required();
  cmp->add_option("--seeds", n_seeds, "number of paired seeds")->required()->check(CLI::PositiveNumber);
  cmp->add_option("--first-seed", first_seed, "first seed of the range")->capture_default_str();
  cmp->add_option("--out", out, "report CSV file")->required();
  cmp->add_option("--json", json_out, "report JSON file (default: CSV path with .json)");
  cmp->add_option("--logs", logs_dir, "directory for per-trial event logs");
  cmp->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* val = app.add_subcommand("validate", "check a scenario and print its layout");
  val_c.add_to(val);

  std::string replay_log;
  auto* rep = app.add_subcommand("replay", "recompute metrics from an event log");
  rep->add_option("--log", replay_log, "event log JSONL file")->required()->check(CLI::ExistingFile);

  auto* srv = app.add_subcommand("serve", "live websocket session");
  srv_c.add_to(srv);
  srv->add_option("--port", port, "TCP port")->capture_default_str();
  srv->add_option("--controller", controller, "emics or hieremics")->capture_default_str();
  srv->add_option("--seed", seed, "seed recorded for the session")->capture_default_str();
  srv->add_option("--log", log, "session log JSONL file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_c, controller, op, seed, out, log);
    if (*cmp) return cmd_compare(cmp_c, operators, n_seeds, first_seed, out, json_out, logs_dir, threads);
    if (*val) return cmd_validate(val_c);
    if (*rep) return cmd_replay(replay_log);
    if (*srv) return cmd_serve(srv_c, port, controller, seed, log);
  } catch (const hmi::ConfigError& e) {
    std::cerr << "hmi: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "hmi: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
