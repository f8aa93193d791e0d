#include <cstdio>
#include <filesystem>
#include <fstream>

#include "byzpg/experiment.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace byzpg;

namespace {

std::string chain_config_json(int runs, int iterations, const char* extra = "") {
  const ChainOracleSpec chain = byzpg::testing::test_chain();
  std::string chain_json =
      R"({"states":3,"actions":2,"horizon":3,"discount":0.9,"reward_bound":1.0,)"
      R"("init":[0.6,0.3,0.1],)"
      R"("transition":[[[0.7,0.2,0.1],[0.1,0.6,0.3]],[[0.3,0.5,0.2],[0.2,0.2,0.6]],[[0.5,0.4,0.1],[0.05,0.15,0.8]]],)"
      R"("reward":[[0.1,0.3],[0.5,0.2],[0.8,1.0]]})";
  (void)chain;
  std::string json = R"({"env":{"kind":"chain","chain":)" + chain_json + R"(},)" +
                     R"("policy":{"architecture":"linear","hidden":[]},)" +
                     R"("algorithm":{"kind":"dec_byz_pg","agents":4,"N":6,"B":2,"p":0.5,)" +
                     R"("eta":0.05,"T":)" + std::to_string(iterations) +
                     R"(,"optimizer":"plain_ascent"},)" + R"("runs":)" + std::to_string(runs) +
                     std::string(extra) + "}";
  return json;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("an empty config yields the full default profile") {
  const ExperimentConfig cfg = parse_config("");
  CHECK(cfg.env.kind == EnvConfig::Kind::cartpole);
  CHECK(cfg.env.horizon == 500);
  CHECK(cfg.env.discount == 0.999);
  CHECK(cfg.policy.hidden_sizes == std::vector<int>{16, 16});
  CHECK(cfg.policy.hidden_activation == Activation::relu);
  CHECK(cfg.policy.output_activation == OutputActivation::tanh);
  CHECK(cfg.algo.large_batch == 50);
  CHECK(cfg.algo.small_batch == 4);
  CHECK(cfg.algo.switch_prob == 0.2);
  CHECK(cfg.algo.step_size == 5e-3);
  CHECK(cfg.algo.optimizer == OptimizerKind::adam);
  CHECK(cfg.algo.estimator == EstimatorKind::gpomdp);
  CHECK(cfg.runs == 10);
}

TEST_CASE("the decentralized byzantine cap rejects f = 7 of K = 13") {
  const std::string json =
      R"({"algorithm":{"kind":"dec_byz_pg","agents":13},"adversary":{"attack":"avg_zero","f":7}})";
  CHECK_THROWS_WITH_AS(parse_config(json), doctest::Contains("adversary.f"),
                       std::invalid_argument);
}

TEST_CASE("the centralized cap is looser: f = 6 of K = 13 passes centrally") {
  const std::string json =
      R"({"algorithm":{"kind":"byz_pg","agents":13},"adversary":{"attack":"avg_zero","f":6}})";
  const ExperimentConfig cfg = parse_config(json);
  CHECK(cfg.adversary.byzantine_count == 6);
  CHECK(cfg.aggregator.alpha == doctest::Approx(6.0 / 13.0));
  CHECK(cfg.aggregator.alpha_max == 0.5);
}

TEST_CASE("derived fields: alpha from f/K, agreement subset size from alpha_bar") {
  const std::string json =
      R"({"algorithm":{"kind":"dec_byz_pg","agents":13},"adversary":{"attack":"large_noise","f":3}})";
  const ExperimentConfig cfg = parse_config(json);
  CHECK(cfg.aggregator.alpha == doctest::Approx(3.0 / 13.0));
  CHECK(cfg.aggregator.alpha_max == 0.25);
  CHECK(cfg.agreement.alpha_bar == doctest::Approx(3.0 / 13.0 + 0.01));
  CHECK(cfg.agreement.subset_size == 10);
}

TEST_CASE("gda tolerates fewer byzantine agents than mda") {
  const std::string ok =
      R"({"algorithm":{"kind":"dec_byz_pg","agents":7},"agreement":{"kind":"gda"},"adversary":{"f":1}})";
  CHECK(parse_config(ok).agreement.kind == AgreementKind::gda);
  const std::string bad =
      R"({"algorithm":{"kind":"dec_byz_pg","agents":13},"agreement":{"kind":"gda"},"adversary":{"f":3}})";
  CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("alpha_bar"), std::invalid_argument);
}

TEST_CASE("unknown keys are named in the error") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"algorithn":{}})"), doctest::Contains("algorithn"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"algorithm":{"kin":"page_pg"}})"),
                       doctest::Contains("algorithm.kin"), std::invalid_argument);
}

TEST_CASE("explicit overrides survive a save/load round trip") {
  ExperimentConfig cfg = parse_config(R"({"algorithm":{"N":123,"agents":3}})");
  CHECK(cfg.algo.large_batch == 123);
  const std::string json = config_to_json(cfg);
  ExperimentConfig back = parse_config(json);
  CHECK(back.algo.large_batch == 123);
  CHECK(config_to_json(back) == json);
}

TEST_CASE("invalid knobs name their field") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"algorithm":{"p":0.0}})"), doctest::Contains("algorithm.p"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"algorithm":{"B":80}})"), doctest::Contains("algorithm.B"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"algorithm":{"kind":"page_pg","agents":4}})"),
                       doctest::Contains("agents"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"env":{"discount":1.5}})"),
                       doctest::Contains("env.discount"), std::invalid_argument);
}

TEST_CASE("experiments are deterministic: identical CSV bytes") {
  const ExperimentConfig cfg = parse_config(chain_config_json(2, 8));
  const ExperimentResult r1 = run_experiment(cfg, 2);
  const ExperimentResult r2 = run_experiment(cfg, 1);  // parallelism must not matter
  CHECK(metrics_csv_text(cfg, r1) == metrics_csv_text(cfg, r2));
  CHECK(r1.runs.size() == 2);
}

TEST_CASE("run_count one: the summary reduces to the single run") {
  const ExperimentConfig cfg = parse_config(chain_config_json(1, 8));
  const ExperimentResult r = run_experiment(cfg);
  const std::string summary = summary_csv_text(r, 10);
  CHECK(summary.find("traj_per_agent,mean_return,std_return,runs") != std::string::npos);
  // with one run every std column entry is zero
  std::istringstream in(summary);
  std::string line;
  std::getline(in, line);  // comment
  std::getline(in, line);  // header
  int rows = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto c3 = line.find(',', c2 + 1);
    CHECK(line.substr(c2 + 1, c3 - c2 - 1) == "0");
    ++rows;
  }
  CHECK(rows > 0);
}

TEST_CASE("replay verifies a recorded run byte for byte") {
  ExperimentConfig cfg = parse_config(chain_config_json(2, 6));
  const auto dir = std::filesystem::temp_directory_path() / "byzpg_replay_test";
  std::filesystem::remove_all(dir);
  cfg.out_dir = dir.string();
  const ExperimentResult result = run_experiment(cfg);
  write_experiment_outputs(cfg, result);
  std::string message;
  CHECK(replay((dir / "metrics.csv").string() + "#1", &message));
  INFO(message);
  CHECK(message.find("identical") != std::string::npos);
  CHECK(!replay((dir / "metrics.csv").string() + "#9", &message));
  std::filesystem::remove_all(dir);
}

TEST_CASE("chain table file loading feeds an experiment") {
  const auto path = std::filesystem::temp_directory_path() / "byzpg_chain_test.txt";
  {
    std::ofstream out(path);
    out << chain_spec_to_text(byzpg::testing::test_chain());
  }
  const std::string json = R"({"env":{"kind":"chain","chain_table":")" + path.string() +
                           R"("},"policy":{"architecture":"linear","hidden":[]},)" +
                           R"("algorithm":{"kind":"page_pg","agents":1,"N":4,"B":2,"T":3},"runs":1})";
  const ExperimentConfig cfg = parse_config(json);
  CHECK(cfg.policy.input_dim == 3);
  CHECK(cfg.policy.action_count == 2);
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.runs[0].completed_rounds == 3);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
