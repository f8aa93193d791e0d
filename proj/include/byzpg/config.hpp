#pragma once

#include <memory>
#include <optional>
#include <string>

#include "byzpg/algorithms.hpp"

namespace byzpg {

struct EnvConfig {
  enum class Kind { cartpole, chain };
  Kind kind = Kind::cartpole;
  int horizon = 500;
  double discount = 0.999;
  std::string chain_table;                      // path to the tabular spec
  std::optional<ChainOracleSpec> chain_inline;  // takes precedence over the path
};

/// Full declarative description of one experiment. Defaults follow the
/// CartPole profile (MLP 16x16 ReLU with tanh output, Adam 5e-3, gamma 0.999,
/// H 500, B 4, N 50, p 0.2).
struct ExperimentConfig {
  EnvConfig env;
  PolicySpec policy;
  AlgoConfig algo;
  AggregatorConfig aggregator;
  AgreementConfig agreement;
  AdversaryConfig adversary;
  int runs = 10;
  std::uint64_t seed = 1;
  int metric_every = 1;
  std::string out_dir = "out";
  long long max_traj_per_agent = 0;
  bool track_checkpoints = false;
};

ExperimentConfig default_config();

/// Parse from a JSON file; an empty file yields the full default profile.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

/// Cross-field validation; fills derived fields (aggregator alpha/alpha_max
/// from the Byzantine count and algorithm mode, agreement subset size).
/// Throws std::invalid_argument naming the offending field.
void validate(ExperimentConfig& config);

std::shared_ptr<const Environment> make_environment(const EnvConfig& config);
EngineInputs make_engine_inputs(const ExperimentConfig& config, std::uint64_t root_seed);

}  // namespace byzpg
