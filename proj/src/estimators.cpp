#include "byzpg/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace byzpg {

GradEstimate reinforce(const Trajectory& tau, const PolicySpec& policy, const ParamVector& theta,
                       double gamma, const BaselineConfig& baseline) {
  const std::size_t d = theta.size();
  ParamVector score_sum(d, 0.0);
  double disc_reward = 0.0;
  double g = 1.0;
  for (std::size_t h = 0; h < tau.steps.size(); ++h) {
    const TrajStep& st = tau.steps[h];
    vec_axpy(score_sum, 1.0, log_prob_gradient(policy, theta, st.state, st.action));
    disc_reward += g * st.reward;
    g *= gamma;
  }
  const double coeff = disc_reward - baseline.constant();
  GradEstimate est{vec_scaled(score_sum, coeff), 1, GradKind::reinforce};
  return est;
}

GradEstimate gpomdp(const Trajectory& tau, const PolicySpec& policy, const ParamVector& theta,
                    double gamma, const BaselineConfig& baseline) {
  const std::size_t d = theta.size();
  ParamVector prefix(d, 0.0);
  ParamVector acc(d, 0.0);
  // with a zero baseline, steps past the absorbing entry contribute nothing
  std::size_t limit = tau.steps.size();
  if (baseline.mode == BaselineConfig::Mode::zero && tau.truncated_at) {
    limit = static_cast<std::size_t>(*tau.truncated_at);
  }
  double g = 1.0;
  for (std::size_t h = 0; h < limit; ++h) {
    const TrajStep& st = tau.steps[h];
    vec_axpy(prefix, 1.0, log_prob_gradient(policy, theta, st.state, st.action));
    const double coeff = g * st.reward - baseline.value_at(static_cast<int>(h));
    if (coeff != 0.0) vec_axpy(acc, coeff, prefix);
    g *= gamma;
  }
  return GradEstimate{std::move(acc), 1, GradKind::gpomdp};
}

GradEstimate estimate(EstimatorKind kind, const Trajectory& tau, const PolicySpec& policy,
                      const ParamVector& theta, double gamma, const BaselineConfig& baseline) {
  return kind == EstimatorKind::reinforce ? reinforce(tau, policy, theta, gamma, baseline)
                                          : gpomdp(tau, policy, theta, gamma, baseline);
}

double log_importance_weight(const Trajectory& tau, const PolicySpec& policy,
                             const ParamVector& theta_target) {
  double acc = 0.0;
  for (const TrajStep& st : tau.steps) {
    const auto lp = action_log_probs(policy, theta_target, st.state);
    acc += lp[static_cast<std::size_t>(st.action)] - st.behavior_log_prob;
  }
  return acc;
}

double importance_weight(const Trajectory& tau, const PolicySpec& policy,
                         const ParamVector& theta_target, const ParamVector& theta_behavior) {
  double acc = 0.0;
  for (const TrajStep& st : tau.steps) {
    const auto lp_t = action_log_probs(policy, theta_target, st.state);
    const auto lp_b = action_log_probs(policy, theta_behavior, st.state);
    acc += lp_t[static_cast<std::size_t>(st.action)] - lp_b[static_cast<std::size_t>(st.action)];
  }
  return std::exp(acc);
}

GradEstimate batch_mean_estimate(std::span<const Trajectory> batch, EstimatorKind kind,
                                 const PolicySpec& policy, const ParamVector& theta, double gamma,
                                 const BaselineConfig& baseline) {
  if (batch.empty()) throw std::invalid_argument("batch_mean_estimate: empty batch");
  ParamVector acc(theta.size(), 0.0);
  for (const Trajectory& tau : batch) {
    vec_axpy(acc, 1.0, estimate(kind, tau, policy, theta, gamma, baseline).vector);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& x : acc) x *= inv;
  return GradEstimate{std::move(acc), static_cast<int>(batch.size()), GradKind::aggregated};
}

namespace {

// two batch means over the same trajectories: fresh estimates at theta_t and
// importance-weighted estimates at theta_prev
struct CorrectionMeans {
  ParamVector fresh;
  ParamVector weighted;
  double max_weight = 0.0;
};

CorrectionMeans correction_means(std::span<const Trajectory> batch, const PolicySpec& policy,
                                 const ParamVector& theta_t, const ParamVector& theta_prev,
                                 EstimatorKind kind, double gamma, const BaselineConfig& baseline) {
  if (batch.empty()) throw std::invalid_argument("page correction: empty batch");
  CorrectionMeans out;
  out.fresh.assign(theta_t.size(), 0.0);
  out.weighted.assign(theta_t.size(), 0.0);
  for (const Trajectory& tau : batch) {
    vec_axpy(out.fresh, 1.0, estimate(kind, tau, policy, theta_t, gamma, baseline).vector);
    const double w = std::exp(log_importance_weight(tau, policy, theta_prev));
    out.max_weight = std::max(out.max_weight, w);
    vec_axpy(out.weighted, w, estimate(kind, tau, policy, theta_prev, gamma, baseline).vector);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& x : out.fresh) x *= inv;
  for (double& x : out.weighted) x *= inv;
  return out;
}

}  // namespace

GradEstimate page_correction(std::span<const Trajectory> batch, const PolicySpec& policy,
                             const ParamVector& theta_t, const ParamVector& theta_prev,
                             EstimatorKind kind, double gamma, const BaselineConfig& baseline) {
  CorrectionMeans m = correction_means(batch, policy, theta_t, theta_prev, kind, gamma, baseline);
  ParamVector out(theta_t.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m.fresh[i] - m.weighted[i];
  return GradEstimate{std::move(out), static_cast<int>(batch.size()), GradKind::page_correction};
}

ParamVector page_small_combine(std::span<const Trajectory> batch, const PolicySpec& policy,
                               const ParamVector& theta_t, const ParamVector& theta_prev,
                               const ParamVector& prev_term, EstimatorKind kind, double gamma,
                               const BaselineConfig& baseline, double* max_weight) {
  CorrectionMeans m = correction_means(batch, policy, theta_t, theta_prev, kind, gamma, baseline);
  if (max_weight) *max_weight = m.max_weight;
  ParamVector out(theta_t.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m.fresh[i] + prev_term[i] - m.weighted[i];
  return out;
}

}  // namespace byzpg
