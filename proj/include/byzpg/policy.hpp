#pragma once

#include <vector>

#include "byzpg/rng.hpp"
#include "byzpg/vec.hpp"

namespace byzpg {

enum class PolicyArch { linear, mlp };
enum class Activation { relu, tanh };
enum class OutputActivation { identity, tanh };

/// Categorical (softmax) policy over a discrete action set. Linear, or an MLP
/// with at most two hidden layers; gradients are computed by manual
/// reverse-mode differentiation.
struct PolicySpec {
  PolicyArch architecture = PolicyArch::linear;
  std::vector<int> hidden_sizes;
  Activation hidden_activation = Activation::relu;
  OutputActivation output_activation = OutputActivation::identity;
  int input_dim = 0;
  int action_count = 0;
};

int param_count(const PolicySpec& spec);

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
ParamVector init_params(const PolicySpec& spec, RngStream& rng);

/// log pi_theta(.|s); logsumexp of the result is 0 up to rounding.
std::vector<double> action_log_probs(const PolicySpec& spec, const ParamVector& theta,
                                     const std::vector<double>& state);

/// Draws an action from pi_theta(.|s); stores log pi_theta(a|s) when
/// log_prob_out is non-null.
int sample_action(const PolicySpec& spec, const ParamVector& theta,
                  const std::vector<double>& state, RngStream& rng, double* log_prob_out);

/// Score function: d/dtheta log pi_theta(a|s), all d components.
ParamVector log_prob_gradient(const PolicySpec& spec, const ParamVector& theta,
                              const std::vector<double>& state, int action);

}  // namespace byzpg
