#include "byzpg/algorithms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "byzpg/runtime.hpp"

namespace byzpg {

const char* algorithm_kind_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::page_pg: return "page_pg";
    case AlgorithmKind::fed_page_pg: return "fed_page_pg";
    case AlgorithmKind::dec_page_pg: return "dec_page_pg";
    case AlgorithmKind::byz_pg: return "byz_pg";
    case AlgorithmKind::dec_byz_pg: return "dec_byz_pg";
  }
  return "?";
}

bool is_decentralized(AlgorithmKind kind) {
  return kind == AlgorithmKind::dec_page_pg || kind == AlgorithmKind::dec_byz_pg;
}

bool is_centralized_federation(AlgorithmKind kind) {
  return kind == AlgorithmKind::byz_pg || kind == AlgorithmKind::fed_page_pg;
}

namespace {

constexpr int kServer = 0;

ParamVector optimizer_step(const AlgoConfig& cfg, AdamState& adam, const ParamVector& theta,
                           const ParamVector& v) {
  const std::size_t d = theta.size();
  ParamVector next(d);
  if (cfg.optimizer == OptimizerKind::plain_ascent) {
    for (std::size_t i = 0; i < d; ++i) next[i] = theta[i] + cfg.step_size * v[i];
    return next;
  }
  if (adam.m.empty()) {
    adam.m.assign(d, 0.0);
    adam.v.assign(d, 0.0);
  }
  adam.step += 1;
  const AdamParams& p = cfg.adam;
  const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(adam.step));
  for (std::size_t i = 0; i < d; ++i) {
    adam.m[i] = p.beta1 * adam.m[i] + (1.0 - p.beta1) * v[i];
    adam.v[i] = p.beta2 * adam.v[i] + (1.0 - p.beta2) * v[i] * v[i];
    const double mh = adam.m[i] / bc1;
    const double vh = adam.v[i] / bc2;
    next[i] = theta[i] + cfg.step_size * mh / (std::sqrt(vh) + p.eps);
  }
  return next;
}

}  // namespace

struct Engine::Impl {
  EngineInputs in;
  int K = 1;
  std::size_t d = 0;
  CommonCoin coin;
  Adversary adversary;
  // local states; centralized families keep a single entry (the server view)
  std::vector<ParamVector> theta;
  std::vector<ParamVector> theta_prev;
  std::vector<ParamVector> realized_v;  // decentralized recursive term
  ParamVector stored_v;                 // page_pg / centralized v_{t-1}
  std::vector<AdamState> adam;
  int t = 0;
  std::vector<long long> traj_count;
  RunResult result;

  explicit Impl(EngineInputs inputs)
      : in(std::move(inputs)),
        K(in.algo.agents),
        coin(in.root_seed),
        adversary(in.adversary, in.algo.agents, in.root_seed,
                  is_centralized_federation(in.algo.algorithm) ? kServer : -1) {
    if (!in.env) throw std::invalid_argument("engine: environment is required");
    if (K < 1) throw std::invalid_argument("engine: agents must be >= 1");
    if (in.algo.algorithm == AlgorithmKind::page_pg && K != 1)
      throw std::invalid_argument("engine: page_pg is single-agent (agents must be 1)");
    d = static_cast<std::size_t>(param_count(in.policy));

    RngStream init_rng = agent_stream(in.root_seed, kCommonAgent, kPurposeInit, 0);
    ParamVector theta0 = init_params(in.policy, init_rng);
    const int holders = is_decentralized(in.algo.algorithm) ? K : 1;
    theta.assign(static_cast<std::size_t>(holders), theta0);
    theta_prev = theta;
    realized_v.assign(static_cast<std::size_t>(holders), ParamVector(d, 0.0));
    stored_v.assign(d, 0.0);
    adam.resize(static_cast<std::size_t>(holders));
    traj_count.assign(static_cast<std::size_t>(K), 0);
    if (in.track_checkpoints) result.checkpoints.push_back(theta);
  }

  RngStream sample_stream(int agent) const {
    return agent_stream(in.root_seed, static_cast<std::uint32_t>(agent), kPurposeSample,
                        static_cast<std::uint32_t>(t));
  }

  RngStream bucket_stream() const {
    return agent_stream(in.root_seed, kCommonAgent, kPurposeBucketing,
                        static_cast<std::uint32_t>(t));
  }

  std::vector<Trajectory> sample_batch(int agent, const ParamVector& at_theta, int count,
                                       bool uniform_actions, RngStream& rng) {
    std::vector<Trajectory> batch;
    batch.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      batch.push_back(sample_trajectory(*in.env, in.policy, at_theta, rng, uniform_actions));
    }
    traj_count[static_cast<std::size_t>(agent)] += count;
    return batch;
  }

  static double batch_raw_return(const std::vector<Trajectory>& batch) {
    double s = 0.0;
    for (const auto& tau : batch) s += tau.raw_return();
    return s / static_cast<double>(batch.size());
  }

  double batch_disc_return(const std::vector<Trajectory>& batch) const {
    double s = 0.0;
    for (const auto& tau : batch) s += tau.discounted_return(in.env->spec().discount);
    return s / static_cast<double>(batch.size());
  }

  void record(int c, const std::vector<int>& honest, const std::vector<double>& agent_returns,
              const std::vector<double>& agent_disc_returns, double max_iw) {
    IterationRecord rec;
    rec.iteration = t;
    rec.coin = c;
    rec.traj_per_agent = traj_count[0];
    rec.max_importance_weight = max_iw;
    double sum = 0.0, dsum = 0.0;
    int n = 0;
    for (int h : honest) {
      const double r = agent_returns[static_cast<std::size_t>(h)];
      if (std::isnan(r)) continue;  // agent did not sample this round
      rec.honest_returns.push_back(r);
      sum += r;
      dsum += agent_disc_returns[static_cast<std::size_t>(h)];
      ++n;
    }
    rec.mean_honest_return = n > 0 ? sum / n : 0.0;
    rec.mean_honest_return_disc = n > 0 ? dsum / n : 0.0;
    if (is_decentralized(in.algo.algorithm)) {
      rec.honest_diameter = max_pairwise_distance(theta, honest);
    }
    result.records.push_back(std::move(rec));
  }

  void step() {
    const AlgoConfig& algo = in.algo;
    const double gamma = in.env->spec().discount;
    const int c = coin.bernoulli(algo.switch_prob);
    const bool large = (c == 1) || (t == 0);
    const auto honest = adversary.honest_set(t);
    const bool corrupt_sampling = adversary.corrupts_sampling();

    std::vector<double> agent_returns(static_cast<std::size_t>(K),
                                      std::numeric_limits<double>::quiet_NaN());
    std::vector<double> agent_disc(static_cast<std::size_t>(K), 0.0);
    double max_iw = 0.0;

    if (is_decentralized(algo.algorithm)) {
      const int M = large ? algo.large_batch : algo.small_batch;
      std::vector<ParamVector> payloads(static_cast<std::size_t>(K));
      for (int k = 0; k < K; ++k) {
        RngStream rng = sample_stream(k);
        const bool uniform = corrupt_sampling && adversary.is_byzantine(k, t);
        const auto batch = sample_batch(k, theta[static_cast<std::size_t>(k)], M, uniform, rng);
        agent_returns[static_cast<std::size_t>(k)] = batch_raw_return(batch);
        agent_disc[static_cast<std::size_t>(k)] = batch_disc_return(batch);
        if (large) {
          payloads[static_cast<std::size_t>(k)] =
              batch_mean_estimate(batch, algo.estimator, in.policy,
                                  theta[static_cast<std::size_t>(k)], gamma, algo.baseline)
                  .vector;
        } else {
          double iw = 0.0;
          payloads[static_cast<std::size_t>(k)] = page_small_combine(
              batch, in.policy, theta[static_cast<std::size_t>(k)],
              theta_prev[static_cast<std::size_t>(k)], realized_v[static_cast<std::size_t>(k)],
              algo.estimator, gamma, algo.baseline, &iw);
          if (!adversary.is_byzantine(k, t)) max_iw = std::max(max_iw, iw);
        }
        if (!adversary.is_byzantine(k, t))
          ensure_finite(payloads[static_cast<std::size_t>(k)], t, k, "gradient estimate");
      }

      RoundMailbox mailboxes = adversary.build_mailboxes(payloads, t, 0);
      std::vector<ParamVector> theta_tilde(static_cast<std::size_t>(K));
      std::vector<ParamVector> v(static_cast<std::size_t>(K));
      for (int k = 0; k < K; ++k) {
        RngStream brng = bucket_stream();  // identical stream at every honest agent
        v[static_cast<std::size_t>(k)] = robust_aggregate(
            mailboxes.per_recipient[static_cast<std::size_t>(k)], in.aggregator, brng);
        theta_tilde[static_cast<std::size_t>(k)] =
            optimizer_step(algo, adam[static_cast<std::size_t>(k)],
                           theta[static_cast<std::size_t>(k)], v[static_cast<std::size_t>(k)]);
      }

      std::vector<ParamVector> theta_next =
          run_agreement(theta_tilde, adversary, in.agreement, t);

      const double inv_eta = 1.0 / algo.step_size;
      for (int k = 0; k < K; ++k) {
        auto& rv = realized_v[static_cast<std::size_t>(k)];
        const auto& tn = theta_next[static_cast<std::size_t>(k)];
        if (algo.optimizer == OptimizerKind::plain_ascent) {
          // realized update (theta_next - theta)/eta, written as the applied v
          // plus the agreement displacement so an untouched agreement round
          // reproduces v bit for bit
          const auto& tt = theta_tilde[static_cast<std::size_t>(k)];
          rv = v[static_cast<std::size_t>(k)];
          for (std::size_t i = 0; i < d; ++i) rv[i] += (tn[i] - tt[i]) * inv_eta;
        } else {
          const auto& tc = theta[static_cast<std::size_t>(k)];
          for (std::size_t i = 0; i < d; ++i) rv[i] = (tn[i] - tc[i]) * inv_eta;
        }
        if (!adversary.is_byzantine(k, t)) ensure_finite(tn, t, k, "parameters");
      }
      theta_prev = std::move(theta);
      theta = std::move(theta_next);
    } else if (is_centralized_federation(algo.algorithm)) {
      ParamVector v;
      if (large) {
        std::vector<ParamVector> payloads(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
          RngStream rng = sample_stream(k);
          const bool uniform = corrupt_sampling && adversary.is_byzantine(k, t);
          const auto batch = sample_batch(k, theta[0], algo.large_batch, uniform, rng);
          agent_returns[static_cast<std::size_t>(k)] = batch_raw_return(batch);
          agent_disc[static_cast<std::size_t>(k)] = batch_disc_return(batch);
          payloads[static_cast<std::size_t>(k)] =
              batch_mean_estimate(batch, algo.estimator, in.policy, theta[0], gamma, algo.baseline)
                  .vector;
          if (!adversary.is_byzantine(k, t))
            ensure_finite(payloads[static_cast<std::size_t>(k)], t, k, "gradient estimate");
        }
        const auto mailbox = adversary.build_mailbox_for(kServer, payloads, t, 0);
        RngStream brng = bucket_stream();
        v = robust_aggregate(mailbox, in.aggregator, brng);
      } else {
        // the server alone samples; no aggregation in the small-batch branch
        RngStream rng = sample_stream(kServer);
        const auto batch = sample_batch(kServer, theta[0], algo.small_batch, false, rng);
        agent_returns[0] = batch_raw_return(batch);
        agent_disc[0] = batch_disc_return(batch);
        double iw = 0.0;
        v = page_small_combine(batch, in.policy, theta[0], theta_prev[0], stored_v,
                               algo.estimator, gamma, algo.baseline, &iw);
        max_iw = iw;
        ensure_finite(v, t, kServer, "gradient estimate");
      }
      ParamVector next = optimizer_step(algo, adam[0], theta[0], v);
      ensure_finite(next, t, kServer, "parameters");
      theta_prev[0] = std::move(theta[0]);
      theta[0] = std::move(next);
      stored_v = std::move(v);
    } else {  // page_pg
      const int M = large ? algo.large_batch : algo.small_batch;
      RngStream rng = sample_stream(0);
      const auto batch = sample_batch(0, theta[0], M, false, rng);
      agent_returns[0] = batch_raw_return(batch);
      agent_disc[0] = batch_disc_return(batch);
      ParamVector v;
      if (large) {
        v = batch_mean_estimate(batch, algo.estimator, in.policy, theta[0], gamma, algo.baseline)
                .vector;
      } else {
        double iw = 0.0;
        v = page_small_combine(batch, in.policy, theta[0], theta_prev[0], stored_v,
                               algo.estimator, gamma, algo.baseline, &iw);
        max_iw = iw;
      }
      ensure_finite(v, t, 0, "gradient estimate");
      ParamVector next = optimizer_step(algo, adam[0], theta[0], v);
      ensure_finite(next, t, 0, "parameters");
      theta_prev[0] = std::move(theta[0]);
      theta[0] = std::move(next);
      stored_v = std::move(v);
    }

    record(c, honest, agent_returns, agent_disc, max_iw);
    if (in.track_checkpoints) result.checkpoints.push_back(theta);
    t += 1;
  }

  RunResult finish() {
    result.completed_rounds = t;
    result.final_thetas = theta;
    if (in.track_checkpoints && t >= 1) {
      result.output_round = coin.uniform_round(t) + 1;  // T_hat over the iterates 1..t
      result.output_thetas = result.checkpoints[static_cast<std::size_t>(result.output_round)];
    }
    return std::move(result);
  }
};

Engine::Engine(EngineInputs inputs) : impl_(std::make_unique<Impl>(std::move(inputs))) {}
Engine::~Engine() = default;

void Engine::step() { impl_->step(); }

RunResult Engine::run() {
  const long long budget = impl_->in.max_traj_per_agent;
  while (impl_->t < impl_->in.algo.iterations) {
    if (budget > 0 && impl_->traj_count[0] >= budget) break;
    impl_->step();
  }
  return impl_->finish();
}

int Engine::round() const { return impl_->t; }
const std::vector<ParamVector>& Engine::thetas() const { return impl_->theta; }
const std::vector<ParamVector>& Engine::realized() const { return impl_->realized_v; }
const ParamVector& Engine::stored_v() const { return impl_->stored_v; }
long long Engine::traj_per_agent() const { return impl_->traj_count[0]; }
Adversary& Engine::adversary() { return impl_->adversary; }

RunResult run_single(EngineInputs inputs) { return Engine(std::move(inputs)).run(); }

std::vector<ParamVector> select_output(const RunResult& result) {
  if (result.output_round < 1)
    throw std::invalid_argument("select_output: run did not track checkpoints");
  return result.output_thetas;
}

double evaluate_stationarity(const ChainOracleSpec& oracle, const PolicySpec& policy,
                             const std::vector<ParamVector>& thetas, double eps) {
  if (thetas.empty()) throw std::invalid_argument("evaluate_stationarity: no parameters");
  int ok = 0;
  for (const auto& th : thetas) {
    if (vec_norm(enumerate_exact_gradient(oracle, policy, th)) <= eps) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(thetas.size());
}

}  // namespace byzpg
