#include <cmath>

#include "byzpg/policy.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace byzpg;

namespace {

ParamVector random_theta(const PolicySpec& spec, std::uint64_t seed, double scale = 1.0) {
  RngStream rng(seed);
  ParamVector theta(static_cast<std::size_t>(param_count(spec)));
  for (double& x : theta) x = rng.uniform(-scale, scale);
  return theta;
}

std::vector<double> random_state(int dim, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> s(static_cast<std::size_t>(dim));
  for (double& x : s) x = rng.uniform(-1.0, 1.0);
  return s;
}

}  // namespace

TEST_SUITE("policy") {

TEST_CASE("parameter counts match the layer layout") {
  PolicySpec lin;
  lin.architecture = PolicyArch::linear;
  lin.input_dim = 3;
  lin.action_count = 2;
  CHECK(param_count(lin) == 2 * 3 + 2);

  PolicySpec mlp = byzpg::testing::mlp_policy(4, 2);
  mlp.hidden_sizes = {16, 16};
  CHECK(param_count(mlp) == (16 * 4 + 16) + (16 * 16 + 16) + (2 * 16 + 2));
}

TEST_CASE("all-zero parameters give the uniform policy") {
  PolicySpec lin;
  lin.architecture = PolicyArch::linear;
  lin.input_dim = 5;
  lin.action_count = 4;
  ParamVector theta(static_cast<std::size_t>(param_count(lin)), 0.0);
  const auto lp = action_log_probs(lin, theta, random_state(5, 1));
  for (double v : lp) CHECK(v == doctest::Approx(-std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("log probs normalize: logsumexp is zero") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PolicySpec spec = seed % 2 == 0 ? byzpg::testing::mlp_policy(4, 3)
                                    : byzpg::testing::chain_policy(byzpg::testing::test_chain());
    const auto lp = action_log_probs(spec, random_theta(spec, seed + 10, 2.0),
                                     random_state(spec.input_dim, seed + 50));
    double sum = 0.0;
    for (double v : lp) sum += std::exp(v);
    CHECK(std::abs(std::log(sum)) <= 1e-10);
  }
}

TEST_CASE("adding a constant to every logit leaves log probs unchanged") {
  PolicySpec lin;
  lin.architecture = PolicyArch::linear;
  lin.input_dim = 3;
  lin.action_count = 3;
  ParamVector theta = random_theta(lin, 3);
  const auto state = random_state(3, 4);
  const auto lp1 = action_log_probs(lin, theta, state);
  // biases are the last action_count entries; shifting them all shifts every logit
  ParamVector shifted = theta;
  for (int a = 0; a < 3; ++a) shifted[static_cast<std::size_t>(9 + a)] += 2.5;
  const auto lp2 = action_log_probs(lin, shifted, state);
  for (int a = 0; a < 3; ++a)
    CHECK(lp1[static_cast<std::size_t>(a)] == doctest::Approx(lp2[static_cast<std::size_t>(a)]).epsilon(1e-12));
}

TEST_CASE("hand-evaluated softmax: logits (1, -1)") {
  PolicySpec lin;
  lin.architecture = PolicyArch::linear;
  lin.input_dim = 1;
  lin.action_count = 2;
  // W = [[1], [-1]], b = 0, state = (1) -> logits (1, -1)
  ParamVector theta = {1.0, -1.0, 0.0, 0.0};
  const auto lp = action_log_probs(lin, theta, {1.0});
  const double expect0 = -std::log(1.0 + std::exp(-2.0));
  const double expect1 = -2.0 - std::log(1.0 + std::exp(-2.0));
  CHECK(lp[0] == doctest::Approx(expect0).epsilon(1e-12));
  CHECK(lp[1] == doctest::Approx(expect1).epsilon(1e-12));
}

TEST_CASE("score identity: expected score is the zero vector") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PolicySpec spec = seed % 2 == 0 ? byzpg::testing::mlp_policy(3, 4)
                                    : byzpg::testing::chain_policy(byzpg::testing::test_chain());
    const ParamVector theta = random_theta(spec, seed + 20, 1.5);
    const auto state = random_state(spec.input_dim, seed + 70);
    const auto lp = action_log_probs(spec, theta, state);
    ParamVector acc(theta.size(), 0.0);
    for (int a = 0; a < spec.action_count; ++a) {
      vec_axpy(acc, std::exp(lp[static_cast<std::size_t>(a)]), log_prob_gradient(spec, theta, state, a));
    }
    for (double v : acc) CHECK(std::abs(v) <= 1e-8);
  }
}

TEST_CASE("gradient matches central finite differences") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PolicySpec spec = seed % 2 == 0 ? byzpg::testing::mlp_policy(4, 3)
                                    : byzpg::testing::chain_policy(byzpg::testing::test_chain());
    ParamVector theta = random_theta(spec, seed + 30);
    const auto state = random_state(spec.input_dim, seed + 90);
    RngStream arng(seed + 130);
    const int action = arng.uniform_int(spec.action_count);
    const ParamVector grad = log_prob_gradient(spec, theta, state, action);
    const double h = 1e-5;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      ParamVector lo = theta, hi = theta;
      lo[i] -= h;
      hi[i] += h;
      const double fd = (action_log_probs(spec, hi, state)[static_cast<std::size_t>(action)] -
                         action_log_probs(spec, lo, state)[static_cast<std::size_t>(action)]) /
                        (2 * h);
      CHECK(std::abs(fd - grad[i]) <= 1e-5 * std::max(1.0, std::abs(grad[i])));
    }
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("a structurally deterministic action has an exactly zero score") {
  PolicySpec lin;
  lin.architecture = PolicyArch::linear;
  lin.input_dim = 2;
  lin.action_count = 2;
  // logit gap 2000: the other action's probability underflows to exactly 0
  ParamVector theta = {1000.0, 1000.0, -1000.0, -1000.0, 0.0, 0.0};
  const std::vector<double> state = {1.0, 1.0};
  const auto lp = action_log_probs(lin, theta, state);
  CHECK(lp[0] == 0.0);
  const ParamVector grad = log_prob_gradient(lin, theta, state, 0);
  for (double v : grad) CHECK(v == 0.0);
}

TEST_CASE("initialization: weights bounded by 1/sqrt(fan_in), biases zero") {
  PolicySpec mlp = byzpg::testing::mlp_policy(4, 2);
  mlp.hidden_sizes = {16, 16};
  RngStream rng(9);
  const ParamVector theta = init_params(mlp, rng);
  CHECK(static_cast<int>(theta.size()) == param_count(mlp));
  // first layer weights
  for (int i = 0; i < 16 * 4; ++i) CHECK(std::abs(theta[static_cast<std::size_t>(i)]) <= 0.5);
  // first layer biases
  for (int i = 16 * 4; i < 16 * 4 + 16; ++i) CHECK(theta[static_cast<std::size_t>(i)] == 0.0);
  // identical seeds produce identical initializations
  RngStream r2(9);
  CHECK(init_params(mlp, r2) == theta);
}

TEST_CASE("sampling follows the recorded log probs") {
  PolicySpec spec = byzpg::testing::chain_policy(byzpg::testing::test_chain());
  const ParamVector theta = random_theta(spec, 40);
  const std::vector<double> state = {1.0, 0.0, 0.0};
  const auto lp = action_log_probs(spec, theta, state);
  RngStream rng(50);
  int counts[2] = {0, 0};
  for (int i = 0; i < 20000; ++i) {
    double recorded = 0.0;
    const int a = sample_action(spec, theta, state, rng, &recorded);
    CHECK(recorded == lp[static_cast<std::size_t>(a)]);
    ++counts[a];
  }
  const double p0 = std::exp(lp[0]);
  const double se = std::sqrt(p0 * (1 - p0) / 20000);
  CHECK(std::abs(counts[0] / 20000.0 - p0) <= 3 * se);
}

TEST_CASE("dimension mismatches are configuration errors") {
  PolicySpec lin;
  lin.architecture = PolicyArch::linear;
  lin.input_dim = 3;
  lin.action_count = 2;
  ParamVector theta(static_cast<std::size_t>(param_count(lin)), 0.0);
  CHECK_THROWS_AS(action_log_probs(lin, theta, {1.0}), std::invalid_argument);
  ParamVector shorter(theta.size() - 1, 0.0);
  CHECK_THROWS_AS(action_log_probs(lin, shorter, {1.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(log_prob_gradient(lin, theta, {1.0, 0.0, 0.0}, 5), std::invalid_argument);
}

}  // TEST_SUITE
