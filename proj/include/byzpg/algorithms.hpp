#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "byzpg/adversary.hpp"
#include "byzpg/agreement.hpp"
#include "byzpg/env.hpp"
#include "byzpg/estimators.hpp"
#include "byzpg/policy.hpp"
#include "byzpg/robust_agg.hpp"

namespace byzpg {

enum class AlgorithmKind { page_pg, fed_page_pg, dec_page_pg, byz_pg, dec_byz_pg };
enum class OptimizerKind { plain_ascent, adam };

const char* algorithm_kind_name(AlgorithmKind kind);

bool is_decentralized(AlgorithmKind kind);
bool is_centralized_federation(AlgorithmKind kind);  // byz_pg, fed_page_pg

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  ParamVector m;
  ParamVector v;
  long long step = 0;
};

struct AlgoConfig {
  AlgorithmKind algorithm = AlgorithmKind::dec_byz_pg;
  int agents = 5;          // K
  int large_batch = 50;    // N
  int small_batch = 4;     // B
  double switch_prob = 0.2;
  double step_size = 5e-3;
  int iterations = 200;    // T
  OptimizerKind optimizer = OptimizerKind::adam;
  AdamParams adam;
  EstimatorKind estimator = EstimatorKind::gpomdp;
  BaselineConfig baseline;
};

struct IterationRecord {
  int iteration = 0;
  int coin = 0;  // c_t
  long long traj_per_agent = 0;
  double mean_honest_return = 0.0;
  double mean_honest_return_disc = 0.0;
  std::vector<double> honest_returns;
  double max_importance_weight = 0.0;  // 0 when no small branch ran
  double honest_diameter = 0.0;
};

struct RunResult {
  std::vector<IterationRecord> records;
  std::vector<std::vector<ParamVector>> checkpoints;  // [t][agent], checkpoints[0] = theta0
  std::vector<ParamVector> final_thetas;
  int completed_rounds = 0;
  int output_round = 0;                  // T_hat in [1, completed_rounds], 0 when untracked
  std::vector<ParamVector> output_thetas;
};

struct EngineInputs {
  std::shared_ptr<const Environment> env;
  PolicySpec policy;
  AlgoConfig algo;
  AggregatorConfig aggregator;
  AgreementConfig agreement;
  AdversaryConfig adversary;
  std::uint64_t root_seed = 1;
  int metric_every = 1;
  long long max_traj_per_agent = 0;  // 0 = no budget cap
  bool track_checkpoints = false;
};

/// One deterministic run of the configured algorithm over the simulated
/// synchronous round network. Round structure:
///   common coin -> local sampling/estimates -> broadcast through adversary ->
///   aggregation -> parameter update -> (decentralized) averaging agreement.
class Engine {
 public:
  explicit Engine(EngineInputs inputs);
  ~Engine();

  void step();
  RunResult run();  // iterates to T or the trajectory budget, then finalizes

  int round() const;
  const std::vector<ParamVector>& thetas() const;     // one entry per local state holder
  const std::vector<ParamVector>& realized() const;   // decentralized realized estimates
  const ParamVector& stored_v() const;                // page_pg / centralized v_{t-1}
  long long traj_per_agent() const;
  Adversary& adversary();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult run_single(EngineInputs inputs);

/// theta_{T_hat} per agent, as recorded by a checkpoint-tracking run.
std::vector<ParamVector> select_output(const RunResult& result);

/// Fraction of agents whose exact gradient norm (by enumeration) is <= eps.
double evaluate_stationarity(const ChainOracleSpec& oracle, const PolicySpec& policy,
                             const std::vector<ParamVector>& thetas, double eps);

}  // namespace byzpg
