// Command-line front end: run one scheme, compare both, validate a scenario,
// or recompute metrics from a saved event trace.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aftcs/aftcs.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBadPath = 2;
constexpr int kExitBadConfig = 3;
constexpr int kExitWriteFailure = 4;
constexpr int kExitMismatch = 5;

aftcs::ScenarioConfig load_or_exit(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    std::cerr << "error: config file not found: " << path << "\n";
    std::exit(kExitBadPath);
  }
  try {
    return aftcs::load_scenario_file(path);
  } catch (const aftcs::ConfigError& e) {
    std::cerr << "error: invalid scenario: " << e.what() << "\n";
    std::exit(kExitBadConfig);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot load scenario: " << e.what() << "\n";
    std::exit(kExitBadConfig);
  }
}

std::vector<aftcs::SensorId> sensor_ids(const aftcs::ScenarioConfig& cfg) {
  std::vector<aftcs::SensorId> ids;
  for (const auto& s : cfg.sensors) ids.push_back(s.spec.id);
  return ids;
}

int do_run(const std::string& config_path, const std::string& scheme_str, std::uint64_t seed,
           const std::string& out_dir) {
  const aftcs::ScenarioConfig cfg = load_or_exit(config_path);
  aftcs::SchemeKind scheme;
  try {
    scheme = aftcs::scheme_from_name(scheme_str);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
  const aftcs::RunResult run = aftcs::run_scenario(cfg, scheme, seed);
  const aftcs::MetricsReport report = aftcs::compute_metrics(run, aftcs::periods_of(cfg));
  try {
    aftcs::write_run_outputs(out_dir, run, report, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitWriteFailure;
  }
  std::cout << "wrote " << out_dir << " (" << run.trace.size() << " events)\n";
  return kExitOk;
}

int do_compare(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
  const aftcs::ScenarioConfig cfg = load_or_exit(config_path);
  const auto periods = aftcs::periods_of(cfg);
  const aftcs::RunResult run_a = aftcs::run_scenario(cfg, aftcs::SchemeKind::aftcs, seed);
  const aftcs::RunResult run_b =
      aftcs::run_scenario(cfg, aftcs::SchemeKind::fixed_priority_baseline, seed);
  const aftcs::MetricsReport rep_a = aftcs::compute_metrics(run_a, periods);
  const aftcs::MetricsReport rep_b = aftcs::compute_metrics(run_b, periods);
  aftcs::ComparisonTable table;
  try {
    table = aftcs::compare_runs(rep_a, rep_b, sensor_ids(cfg));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  }
  try {
    namespace fs = std::filesystem;
    aftcs::write_run_outputs(fs::path(out_dir) / "aftcs", run_a, rep_a, cfg);
    aftcs::write_run_outputs(fs::path(out_dir) / "baseline", run_b, rep_b, cfg);
    aftcs::write_file(fs::path(out_dir) / "comparison.csv", aftcs::comparison_csv(table, cfg));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitWriteFailure;
  }
  std::cout << "wrote " << out_dir << "/comparison.csv (" << table.rows.size() << " rows)\n";
  return kExitOk;
}

int do_validate(const std::string& config_path) {
  const aftcs::ScenarioConfig cfg = load_or_exit(config_path);
  std::cout << cfg.name << ": ok (" << cfg.sensors.size() << " sensors, "
            << cfg.schedule.size() << " periods, " << cfg.duration_s << " s)\n";
  return kExitOk;
}

int do_replay(const std::string& trace_path, const std::string& config_path,
              const std::string& out_dir) {
  if (!std::filesystem::exists(trace_path)) {
    std::cerr << "error: trace file not found: " << trace_path << "\n";
    return kExitBadPath;
  }
  std::ifstream in(trace_path);
  std::vector<aftcs::TraceEvent> events;
  try {
    events = aftcs::parse_trace(in);
  } catch (const std::exception& e) {
    std::cerr << "error: malformed trace: " << e.what() << "\n";
    return kExitBadConfig;
  }
  if (config_path.empty()) {
    std::cout << "parsed " << events.size() << " events\n";
    return kExitOk;
  }
  const aftcs::ScenarioConfig cfg = load_or_exit(config_path);
  const aftcs::MetricsReport report = aftcs::compute_metrics(events, aftcs::periods_of(cfg));
  if (out_dir.empty()) {
    std::cout << aftcs::metrics_csv(report, cfg);
    return kExitOk;
  }
  try {
    std::filesystem::create_directories(out_dir);
    aftcs::write_file(std::filesystem::path(out_dir) / "metrics.csv",
                      aftcs::metrics_csv(report, cfg));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitWriteFailure;
  }
  std::cout << "wrote " << out_dir << "/metrics.csv\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AFTCS body-sensor-network reservation simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", scheme = "aftcs", trace_path;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "simulate one scheme and write reports");
  run->add_option("--config", config_path, "scenario file")->required();
  run->add_option("--scheme", scheme, "aftcs | baseline");
  run->add_option("--seed", seed, "root random seed");
  run->add_option("--out", out_dir, "output directory");

  auto* compare = app.add_subcommand("compare", "run both schemes and diff them");
  compare->add_option("--config", config_path, "scenario file")->required();
  compare->add_option("--seed", seed, "root random seed");
  compare->add_option("--out", out_dir, "output directory");

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("--config", config_path, "scenario file")->required();

  auto* replay = app.add_subcommand("replay", "recompute metrics from an event trace");
  replay->add_option("--trace", trace_path, "events.jsonl produced by run")->required();
  replay->add_option("--config", config_path, "scenario file (for period boundaries)");
  replay->add_option("--out", out_dir, "output directory");
  replay->parse_complete_callback([&] {});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return do_run(config_path, scheme, seed, out_dir);
    if (compare->parsed()) return do_compare(config_path, seed, out_dir);
    if (validate->parsed()) return do_validate(config_path);
    if (replay->parsed())
      return do_replay(trace_path, config_path, replay->count("--out") ? out_dir : "");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
