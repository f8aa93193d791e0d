#pragma once

#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "byzpg/policy.hpp"
#include "byzpg/rng.hpp"
#include "byzpg/vec.hpp"

namespace byzpg {

struct MdpSpec {
  int state_dim = 0;
  int action_count = 0;
  int horizon = 0;
  double discount = 0.0;      // in (0,1)
  double reward_bound = 0.0;  // rewards lie in [0, reward_bound]
};

struct TrajStep {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  double behavior_log_prob = 0.0;  // log prob under the policy that sampled the action
};

/// Fixed-horizon episode. After entering a terminal state the final state is
/// repeated with zero reward up to the horizon; the policy keeps acting on the
/// frozen state so estimator formulas run over all H steps.
struct Trajectory {
  std::vector<TrajStep> steps;
  std::optional<int> truncated_at;  // step index at which the absorbing state was entered

  double raw_return() const;
  double discounted_return(double gamma) const;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual const MdpSpec& spec() const = 0;
  virtual std::vector<double> reset(RngStream& rng) const = 0;
  /// Returns (next_state, reward, terminal). The stream drives stochastic
  /// transitions; deterministic environments ignore it.
  virtual std::tuple<std::vector<double>, double, bool> step(const std::vector<double>& state,
                                                             int action, RngStream& rng) const = 0;
};

struct CartPoleParams {
  double gravity = 9.8;
  double masscart = 1.0;
  double masspole = 0.1;
  double half_length = 0.5;
  double force_mag = 10.0;
  double dt = 0.02;
  double angle_limit = 12.0 * 3.14159265358979323846 / 180.0;
  double position_limit = 2.4;
};

/// Classic cart-pole with semi-implicit Euler integration (velocities updated
/// first, positions with the new velocities). Reward 1.0 for each step taken
/// from a live state. Initial state uniform in [-0.05, 0.05]^4.
class CartPoleEnv : public Environment {
 public:
  CartPoleEnv(int horizon, double discount, CartPoleParams params = {});
  const MdpSpec& spec() const override { return spec_; }
  const CartPoleParams& params() const { return params_; }
  std::vector<double> reset(RngStream& rng) const override;
  std::tuple<std::vector<double>, double, bool> step(const std::vector<double>& state, int action,
                                                     RngStream& rng) const override;

 private:
  MdpSpec spec_;
  CartPoleParams params_;
};

/// Deterministic cart-pole transition (the dynamics need no randomness).
std::tuple<std::vector<double>, double, bool> cartpole_step(const std::vector<double>& state,
                                                            int action,
                                                            const CartPoleParams& params = {});

/// Small fully-enumerable MDP given by dense tables; the ground-truth
/// environment for exact-gradient checks.
struct ChainOracleSpec {
  int n_states = 0;
  int n_actions = 0;
  int horizon = 0;
  double discount = 0.0;
  double reward_bound = 0.0;
  std::vector<double> init_dist;                           // [s]
  std::vector<std::vector<std::vector<double>>> transition;  // [s][a][s']
  std::vector<std::vector<double>> reward;                 // [s][a]

  void validate() const;  // throws std::invalid_argument naming the field
};

inline constexpr long long kEnumerationCap = 1000000;

/// Number of distinct (s0,a0,...,s_{H-1},a_{H-1}) sequences.
long long chain_trajectory_count(const ChainOracleSpec& spec);

/// Parses the plain-text tabular format (see configs/chain_3x2.txt).
ChainOracleSpec load_chain_spec(const std::string& path);
ChainOracleSpec parse_chain_spec(std::istream& in);
std::string chain_spec_to_text(const ChainOracleSpec& spec);

/// States are presented to policies as one-hot vectors.
class ChainEnv : public Environment {
 public:
  explicit ChainEnv(ChainOracleSpec spec);
  const MdpSpec& spec() const override { return mdp_; }
  const ChainOracleSpec& oracle() const { return oracle_; }
  std::vector<double> reset(RngStream& rng) const override;
  std::tuple<std::vector<double>, double, bool> step(const std::vector<double>& state, int action,
                                                     RngStream& rng) const override;
  int state_index(const std::vector<double>& state) const;

 private:
  ChainOracleSpec oracle_;
  MdpSpec mdp_;
};

/// Samples one fixed-horizon episode. With uniform_actions the behavior policy
/// is uniform over actions (log prob -log A recorded), while states and
/// rewards still come from the environment.
Trajectory sample_trajectory(const Environment& env, const PolicySpec& policy,
                             const ParamVector& theta, RngStream& rng,
                             bool uniform_actions = false);

/// Exact J(theta) by exhaustive enumeration of the trajectory space.
double enumerate_expected_return(const ChainOracleSpec& spec, const PolicySpec& policy,
                                 const ParamVector& theta);

/// Exact gradient of J: sum over trajectories of p(tau) * score(tau) * R(tau).
ParamVector enumerate_exact_gradient(const ChainOracleSpec& spec, const PolicySpec& policy,
                                     const ParamVector& theta);

/// Exact state-visit marginals p(s_h = s), indexed [h][s].
std::vector<std::vector<double>> enumerate_state_visit(const ChainOracleSpec& spec,
                                                       const PolicySpec& policy,
                                                       const ParamVector& theta);

}  // namespace byzpg
