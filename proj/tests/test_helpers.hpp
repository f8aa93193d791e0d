#pragma once

#include "byzpg/env.hpp"
#include "byzpg/policy.hpp"

namespace byzpg::testing {

// 3-state / 2-action chain used across the test suites
inline ChainOracleSpec test_chain() {
  ChainOracleSpec c;
  c.n_states = 3;
  c.n_actions = 2;
  c.horizon = 3;
  c.discount = 0.9;
  c.reward_bound = 1.0;
  c.init_dist = {0.6, 0.3, 0.1};
  c.transition = {
      {{0.7, 0.2, 0.1}, {0.1, 0.6, 0.3}},
      {{0.3, 0.5, 0.2}, {0.2, 0.2, 0.6}},
      {{0.5, 0.4, 0.1}, {0.05, 0.15, 0.8}},
  };
  c.reward = {{0.1, 0.3}, {0.5, 0.2}, {0.8, 1.0}};
  return c;
}

inline PolicySpec chain_policy(const ChainOracleSpec& c) {
  PolicySpec p;
  p.architecture = PolicyArch::linear;
  p.input_dim = c.n_states;
  p.action_count = c.n_actions;
  return p;
}

inline PolicySpec mlp_policy(int input_dim, int actions, OutputActivation out = OutputActivation::tanh) {
  PolicySpec p;
  p.architecture = PolicyArch::mlp;
  p.hidden_sizes = {8, 8};
  p.hidden_activation = Activation::relu;
  p.output_activation = out;
  p.input_dim = input_dim;
  p.action_count = actions;
  return p;
}

}  // namespace byzpg::testing
