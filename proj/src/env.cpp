#include "byzpg/env.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "byzpg/runtime.hpp"

namespace byzpg {

double Trajectory::raw_return() const {
  double s = 0.0;
  for (const auto& st : steps) s += st.reward;
  return s;
}

double Trajectory::discounted_return(double gamma) const {
  double s = 0.0;
  double g = 1.0;
  for (const auto& st : steps) {
    s += g * st.reward;
    g *= gamma;
  }
  return s;
}

CartPoleEnv::CartPoleEnv(int horizon, double discount, CartPoleParams params)
    : params_(params) {
  spec_ = MdpSpec{4, 2, horizon, discount, 1.0};
}

std::vector<double> CartPoleEnv::reset(RngStream& rng) const {
  std::vector<double> s(4);
  for (double& x : s) x = rng.uniform(-0.05, 0.05);
  return s;
}

std::tuple<std::vector<double>, double, bool> CartPoleEnv::step(const std::vector<double>& state,
                                                                int action, RngStream&) const {
  return cartpole_step(state, action, params_);
}

std::tuple<std::vector<double>, double, bool> cartpole_step(const std::vector<double>& state,
                                                            int action,
                                                            const CartPoleParams& p) {
  if (!vec_all_finite(state)) throw std::runtime_error("cartpole: non-finite state");
  const double x = state[0], x_dot = state[1], theta = state[2], theta_dot = state[3];
  const double total_mass = p.masscart + p.masspole;
  const double polemass_length = p.masspole * p.half_length;
  const double force = action == 1 ? p.force_mag : -p.force_mag;
  const double cos_th = std::cos(theta);
  const double sin_th = std::sin(theta);

  const double temp = (force + polemass_length * theta_dot * theta_dot * sin_th) / total_mass;
  const double theta_acc = (p.gravity * sin_th - cos_th * temp) /
                           (p.half_length * (4.0 / 3.0 - p.masspole * cos_th * cos_th / total_mass));
  const double x_acc = temp - polemass_length * theta_acc * cos_th / total_mass;

  // semi-implicit Euler: velocities first, positions with the new velocities
  const double x_dot2 = x_dot + p.dt * x_acc;
  const double x2 = x + p.dt * x_dot2;
  const double theta_dot2 = theta_dot + p.dt * theta_acc;
  const double theta2 = theta + p.dt * theta_dot2;

  const bool terminal = std::abs(x2) > p.position_limit || std::abs(theta2) > p.angle_limit;
  return {{x2, x_dot2, theta2, theta_dot2}, 1.0, terminal};
}

void ChainOracleSpec::validate() const {
  if (n_states < 1) throw std::invalid_argument("chain: n_states must be positive");
  if (n_actions < 1) throw std::invalid_argument("chain: n_actions must be positive");
  if (horizon < 1) throw std::invalid_argument("chain: horizon must be positive");
  if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("chain: discount must be in (0,1)");
  if (!(reward_bound > 0.0)) throw std::invalid_argument("chain: reward_bound must be positive");
  if (static_cast<int>(init_dist.size()) != n_states)
    throw std::invalid_argument("chain: init row must have n_states entries");
  double isum = 0.0;
  for (double v : init_dist) {
    if (v < 0.0) throw std::invalid_argument("chain: init entries must be nonnegative");
    isum += v;
  }
  if (std::abs(isum - 1.0) > 1e-12) throw std::invalid_argument("chain: init row must sum to 1");
  if (static_cast<int>(transition.size()) != n_states ||
      static_cast<int>(reward.size()) != n_states)
    throw std::invalid_argument("chain: transition/reward tables must cover all states");
  for (int s = 0; s < n_states; ++s) {
    if (static_cast<int>(transition[s].size()) != n_actions ||
        static_cast<int>(reward[s].size()) != n_actions)
      throw std::invalid_argument("chain: transition/reward tables must cover all actions");
    for (int a = 0; a < n_actions; ++a) {
      if (static_cast<int>(transition[s][a].size()) != n_states)
        throw std::invalid_argument("chain: transition row must have n_states entries");
      double rsum = 0.0;
      for (double v : transition[s][a]) {
        if (v < 0.0) throw std::invalid_argument("chain: transition entries must be nonnegative");
        rsum += v;
      }
      if (std::abs(rsum - 1.0) > 1e-12)
        throw std::invalid_argument("chain: transition row must sum to 1 within 1e-12");
      if (reward[s][a] < 0.0 || reward[s][a] > reward_bound)
        throw std::invalid_argument("chain: reward entries must lie in [0, reward_bound]");
    }
  }
}

long long chain_trajectory_count(const ChainOracleSpec& spec) {
  long long count = 1;
  const long long per_step = static_cast<long long>(spec.n_states) * spec.n_actions;
  for (int h = 0; h < spec.horizon; ++h) {
    if (count > kEnumerationCap / per_step + 1) return kEnumerationCap + 1;
    count *= per_step;
  }
  return count;
}

ChainOracleSpec parse_chain_spec(std::istream& in) {
  ChainOracleSpec spec;
  bool have_states = false, have_actions = false;
  std::string line;
  auto need_tables = [&]() {
    if (!have_states || !have_actions)
      throw std::invalid_argument("chain table: states/actions must come before rows");
    if (spec.transition.empty()) {
      spec.transition.assign(static_cast<std::size_t>(spec.n_states),
                             std::vector<std::vector<double>>(
                                 static_cast<std::size_t>(spec.n_actions),
                                 std::vector<double>(static_cast<std::size_t>(spec.n_states), -1.0)));
      spec.reward.assign(static_cast<std::size_t>(spec.n_states),
                         std::vector<double>(static_cast<std::size_t>(spec.n_actions), -1.0));
    }
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "states") {
      ls >> spec.n_states;
      have_states = true;
    } else if (key == "actions") {
      ls >> spec.n_actions;
      have_actions = true;
    } else if (key == "horizon") {
      ls >> spec.horizon;
    } else if (key == "discount") {
      ls >> spec.discount;
    } else if (key == "reward_bound") {
      ls >> spec.reward_bound;
    } else if (key == "init") {
      if (!have_states) throw std::invalid_argument("chain table: init before states");
      spec.init_dist.assign(static_cast<std::size_t>(spec.n_states), 0.0);
      for (double& v : spec.init_dist) {
        if (!(ls >> v)) throw std::invalid_argument("chain table: short init row");
      }
    } else if (key == "P") {
      need_tables();
      int s = 0, a = 0;
      if (!(ls >> s >> a)) throw std::invalid_argument("chain table: P row needs state and action");
      if (s < 0 || s >= spec.n_states || a < 0 || a >= spec.n_actions)
        throw std::invalid_argument("chain table: P row index out of range");
      for (int sp = 0; sp < spec.n_states; ++sp) {
        if (!(ls >> spec.transition[s][a][sp]))
          throw std::invalid_argument("chain table: short P row");
      }
    } else if (key == "R") {
      need_tables();
      int s = 0, a = 0;
      if (!(ls >> s >> a)) throw std::invalid_argument("chain table: R row needs state and action");
      if (s < 0 || s >= spec.n_states || a < 0 || a >= spec.n_actions)
        throw std::invalid_argument("chain table: R row index out of range");
      if (!(ls >> spec.reward[s][a])) throw std::invalid_argument("chain table: short R row");
    } else {
      throw std::invalid_argument("chain table: unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

ChainOracleSpec load_chain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("chain table: cannot open '" + path + "'");
  return parse_chain_spec(in);
}

std::string chain_spec_to_text(const ChainOracleSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "states " << spec.n_states << "\n"
      << "actions " << spec.n_actions << "\n"
      << "horizon " << spec.horizon << "\n"
      << "discount " << spec.discount << "\n"
      << "reward_bound " << spec.reward_bound << "\n"
      << "init";
  for (double v : spec.init_dist) out << ' ' << v;
  out << "\n";
  for (int s = 0; s < spec.n_states; ++s) {
    for (int a = 0; a < spec.n_actions; ++a) {
      out << "P " << s << ' ' << a;
      for (double v : spec.transition[s][a]) out << ' ' << v;
      out << "\n";
    }
  }
  for (int s = 0; s < spec.n_states; ++s) {
    for (int a = 0; a < spec.n_actions; ++a) {
      out << "R " << s << ' ' << a << ' ' << spec.reward[s][a] << "\n";
    }
  }
  return out.str();
}

ChainEnv::ChainEnv(ChainOracleSpec spec) : oracle_(std::move(spec)) {
  oracle_.validate();
  mdp_ = MdpSpec{oracle_.n_states, oracle_.n_actions, oracle_.horizon, oracle_.discount,
                 oracle_.reward_bound};
}

std::vector<double> ChainEnv::reset(RngStream& rng) const {
  const double u = rng.uniform01();
  double cum = 0.0;
  int s = oracle_.n_states - 1;
  for (int i = 0; i < oracle_.n_states; ++i) {
    cum += oracle_.init_dist[static_cast<std::size_t>(i)];
    if (u < cum) {
      s = i;
      break;
    }
  }
  std::vector<double> one_hot(static_cast<std::size_t>(oracle_.n_states), 0.0);
  one_hot[static_cast<std::size_t>(s)] = 1.0;
  return one_hot;
}

int ChainEnv::state_index(const std::vector<double>& state) const {
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 1.0) return static_cast<int>(i);
  }
  throw std::runtime_error("chain: state is not one-hot");
}

namespace {

int chain_next_state(const ChainOracleSpec& spec, int s, int a, double u) {
  double cum = 0.0;
  for (int sp = 0; sp < spec.n_states; ++sp) {
    cum += spec.transition[s][a][sp];
    if (u < cum) return sp;
  }
  return spec.n_states - 1;
}

}  // namespace

std::tuple<std::vector<double>, double, bool> ChainEnv::step(const std::vector<double>& state,
                                                             int action, RngStream& rng) const {
  const int s = state_index(state);
  const double reward = oracle_.reward[s][action];
  const int sp = chain_next_state(oracle_, s, action, rng.uniform01());
  std::vector<double> next(state.size(), 0.0);
  next[static_cast<std::size_t>(sp)] = 1.0;
  return {std::move(next), reward, false};
}

Trajectory sample_trajectory(const Environment& env, const PolicySpec& policy,
                             const ParamVector& theta, RngStream& rng, bool uniform_actions) {
  const MdpSpec& mdp = env.spec();
  Trajectory tau;
  tau.steps.reserve(static_cast<std::size_t>(mdp.horizon));
  std::vector<double> state = env.reset(rng);
  bool terminated = false;
  const double uniform_lp = -std::log(static_cast<double>(mdp.action_count));
  for (int h = 0; h < mdp.horizon; ++h) {
    int action;
    double lp;
    if (uniform_actions) {
      action = rng.uniform_int(mdp.action_count);
      lp = uniform_lp;
    } else {
      action = sample_action(policy, theta, state, rng, &lp);
    }
    if (terminated) {
      // absorbing state: frozen state, zero reward, policy still acts
      tau.steps.push_back({state, action, 0.0, lp});
      continue;
    }
    auto [next, reward, done] = env.step(state, action, rng);
    tau.steps.push_back({state, action, reward, lp});
    state = std::move(next);
    if (done) {
      terminated = true;
      tau.truncated_at = h + 1;
    }
  }
  return tau;
}

namespace {

struct Enumerator {
  const ChainOracleSpec& spec;
  const PolicySpec& policy;
  const ParamVector& theta;
  int dim;
  // cached per-state policy quantities
  std::vector<std::vector<double>> log_probs;     // [s][a]
  std::vector<std::vector<ParamVector>> scores;   // [s][a]

  double j_value = 0.0;
  ParamVector grad;
  std::vector<std::vector<double>> visit;  // [h][s]

  Enumerator(const ChainOracleSpec& sp, const PolicySpec& po, const ParamVector& th)
      : spec(sp), policy(po), theta(th), dim(param_count(po)), grad(static_cast<std::size_t>(dim), 0.0) {
    if (chain_trajectory_count(sp) > kEnumerationCap)
      throw std::invalid_argument("chain: trajectory space exceeds the enumeration cap");
    log_probs.resize(static_cast<std::size_t>(sp.n_states));
    scores.resize(static_cast<std::size_t>(sp.n_states));
    for (int s = 0; s < sp.n_states; ++s) {
      std::vector<double> one_hot(static_cast<std::size_t>(sp.n_states), 0.0);
      one_hot[static_cast<std::size_t>(s)] = 1.0;
      log_probs[s] = action_log_probs(po, th, one_hot);
      scores[s].reserve(static_cast<std::size_t>(sp.n_actions));
      for (int a = 0; a < sp.n_actions; ++a) {
        scores[s].push_back(log_prob_gradient(po, th, one_hot, a));
      }
    }
    visit.assign(static_cast<std::size_t>(sp.horizon),
                 std::vector<double>(static_cast<std::size_t>(sp.n_states), 0.0));
  }

  void recurse(int h, int s, double prob, ParamVector& score_sum, double disc_reward) {
    if (h == spec.horizon) {
      j_value += prob * disc_reward;
      vec_axpy(grad, prob * disc_reward, score_sum);
      return;
    }
    visit[h][s] += prob;
    const double gamma_h = std::pow(spec.discount, h);
    for (int a = 0; a < spec.n_actions; ++a) {
      const double pa = std::exp(log_probs[s][a]);
      if (pa == 0.0) continue;
      const auto& sc = scores[s][a];
      for (int i = 0; i < dim; ++i) score_sum[static_cast<std::size_t>(i)] += sc[static_cast<std::size_t>(i)];
      const double r = disc_reward + gamma_h * spec.reward[s][a];
      for (int sp = 0; sp < spec.n_states; ++sp) {
        const double pt = spec.transition[s][a][sp];
        if (pt == 0.0) continue;
        recurse(h + 1, sp, prob * pa * pt, score_sum, r);
      }
      for (int i = 0; i < dim; ++i) score_sum[static_cast<std::size_t>(i)] -= sc[static_cast<std::size_t>(i)];
    }
  }

  void run() {
    ParamVector score_sum(static_cast<std::size_t>(dim), 0.0);
    for (int s0 = 0; s0 < spec.n_states; ++s0) {
      const double p0 = spec.init_dist[static_cast<std::size_t>(s0)];
      if (p0 == 0.0) continue;
      recurse(0, s0, p0, score_sum, 0.0);
    }
  }
};

}  // namespace

double enumerate_expected_return(const ChainOracleSpec& spec, const PolicySpec& policy,
                                 const ParamVector& theta) {
  Enumerator e(spec, policy, theta);
  e.run();
  return e.j_value;
}

ParamVector enumerate_exact_gradient(const ChainOracleSpec& spec, const PolicySpec& policy,
                                     const ParamVector& theta) {
  Enumerator e(spec, policy, theta);
  e.run();
  return e.grad;
}

std::vector<std::vector<double>> enumerate_state_visit(const ChainOracleSpec& spec,
                                                       const PolicySpec& policy,
                                                       const ParamVector& theta) {
  Enumerator e(spec, policy, theta);
  e.run();
  return e.visit;
}

}  // namespace byzpg
