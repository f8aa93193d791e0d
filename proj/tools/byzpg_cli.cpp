#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "byzpg/conformance.hpp"
#include "byzpg/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, std::int64_t seed, int runs, const std::string& out) {
  byzpg::ExperimentConfig cfg = byzpg::load_config(config_path);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (runs > 0) cfg.runs = runs;
  if (!out.empty()) cfg.out_dir = out;
  if (const char* env_out = std::getenv("BYZPG_OUT_DIR"); env_out && out.empty())
    cfg.out_dir = env_out;
  byzpg::validate(cfg);

  std::cout << "running " << cfg.runs << " run(s), base seed " << cfg.seed << " -> "
            << cfg.out_dir << std::endl;
  byzpg::ExperimentResult result = byzpg::run_experiment(cfg);
  byzpg::write_experiment_outputs(cfg, result);

  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const auto& recs = result.runs[r].records;
    if (recs.empty()) continue;
    const auto& last = recs.back();
    std::cout << "  run " << r << ": iterations=" << result.runs[r].completed_rounds
              << " traj/agent=" << last.traj_per_agent
              << " final mean honest return=" << last.mean_honest_return << "\n";
  }
  std::cout << "wrote " << (std::filesystem::path(cfg.out_dir) / "metrics.csv").string() << " and "
            << (std::filesystem::path(cfg.out_dir) / "summary.csv").string() << std::endl;
  return 0;
}

int cmd_conformance(const std::string& suite, std::uint64_t seed, int trials) {
  if (suite == "aggregation") {
    const auto report = byzpg::aggregation_conformance(seed, trials);
    std::cout << byzpg::format_report(report);
    return report.pass ? 0 : 1;
  }
  if (suite == "agreement") {
    const auto report = byzpg::agreement_conformance(seed, trials);
    std::cout << byzpg::format_report(report);
    return report.pass ? 0 : 1;
  }
  if (suite == "estimators") {
    const auto report = byzpg::estimator_conformance(seed, trials > 0 ? trials : 200000);
    std::cout << byzpg::format_report(report);
    return report.pass ? 0 : 1;
  }
  std::cerr << "unknown suite '" << suite << "' (expected aggregation, agreement or estimators)\n";
  return 2;
}

int cmd_replay(const std::string& ref) {
  std::string message;
  const bool ok = byzpg::replay(ref, &message);
  std::cout << message << std::endl;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"byzpg: Byzantine fault-tolerant federated policy-gradient simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite, replay_ref;
  std::int64_t seed = -1;
  int runs = 0;
  int trials = 0;
  std::uint64_t conf_seed = 1;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--seed", seed, "override the base seed");
  run->add_option("--runs", runs, "override the run count");
  run->add_option("--out", out_dir, "output directory (or env BYZPG_OUT_DIR)");

  auto* conf = app.add_subcommand("conformance", "run a Monte-Carlo conformance suite");
  conf->add_option("suite", suite, "aggregation | agreement | estimators")->required();
  conf->add_option("--seed", conf_seed, "harness seed");
  conf->add_option("--trials", trials, "trial count (suite default when omitted)");

  auto* rep = app.add_subcommand("replay", "re-run one recorded run and verify its rows");
  rep->add_option("ref", replay_ref, "reference like out/metrics.csv#0")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) return cmd_run(config_path, seed, runs, out_dir);
    if (app.got_subcommand(conf))
      return cmd_conformance(suite, conf_seed, trials > 0 ? trials : (suite == "estimators" ? 200000 : 1000));
    if (app.got_subcommand(rep)) return cmd_replay(replay_ref);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << std::endl;
    return 1;
  }
  return 2;
}
