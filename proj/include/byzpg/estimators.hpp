#pragma once

#include <span>
#include <vector>

#include "byzpg/env.hpp"
#include "byzpg/policy.hpp"
#include "byzpg/vec.hpp"

namespace byzpg {

enum class EstimatorKind { reinforce, gpomdp };

enum class GradKind { reinforce, gpomdp, page_correction, aggregated, realized };

struct GradEstimate {
  ParamVector vector;
  int batch_size = 1;
  GradKind kind = GradKind::gpomdp;
};

struct BaselineConfig {
  enum class Mode { zero, constant, per_step_constant };
  Mode mode = Mode::zero;
  std::vector<double> values;

  double value_at(int h) const {
    switch (mode) {
      case Mode::zero: return 0.0;
      case Mode::constant: return values.at(0);
      case Mode::per_step_constant: return values.at(static_cast<std::size_t>(h));
    }
    return 0.0;
  }
  double constant() const { return mode == Mode::zero ? 0.0 : values.at(0); }
};

/// (sum_h score_h) * (sum_h gamma^h r_h - C_b), scores evaluated at theta.
GradEstimate reinforce(const Trajectory& tau, const PolicySpec& policy, const ParamVector& theta,
                       double gamma, const BaselineConfig& baseline);

/// sum_h (sum_{t<=h} score_t) * (gamma^h r_h - C_{b_h}).
GradEstimate gpomdp(const Trajectory& tau, const PolicySpec& policy, const ParamVector& theta,
                    double gamma, const BaselineConfig& baseline);

GradEstimate estimate(EstimatorKind kind, const Trajectory& tau, const PolicySpec& policy,
                      const ParamVector& theta, double gamma, const BaselineConfig& baseline);

/// log of p(tau | theta_target) / p(tau | behavior), using the behavior log
/// probs recorded in the trajectory. Dynamics terms cancel.
double log_importance_weight(const Trajectory& tau, const PolicySpec& policy,
                             const ParamVector& theta_target);

/// Importance weight with both policies evaluated fresh; computed in log space.
double importance_weight(const Trajectory& tau, const PolicySpec& policy,
                         const ParamVector& theta_target, const ParamVector& theta_behavior);

/// (1/M) sum_i g(tau_i | theta), accumulated in batch order.
GradEstimate batch_mean_estimate(std::span<const Trajectory> batch, EstimatorKind kind,
                                 const PolicySpec& policy, const ParamVector& theta, double gamma,
                                 const BaselineConfig& baseline);

/// PAGE correction: (1/B) sum g(tau|theta_t) - (1/B) sum w * g(tau|theta_prev)
/// over a batch sampled at theta_t. Unbiased for grad J(theta_t) - grad J(theta_prev).
GradEstimate page_correction(std::span<const Trajectory> batch, const PolicySpec& policy,
                             const ParamVector& theta_t, const ParamVector& theta_prev,
                             EstimatorKind kind, double gamma, const BaselineConfig& baseline);

/// Small-batch recursive estimate shared by every algorithm variant:
///   (1/B) sum g(tau|theta_t) + prev_term - (1/B) sum w * g(tau|theta_prev).
/// Importance weights use the recorded behavior log probs. max_weight, when
/// non-null, receives the largest weight observed in the batch.
ParamVector page_small_combine(std::span<const Trajectory> batch, const PolicySpec& policy,
                               const ParamVector& theta_t, const ParamVector& theta_prev,
                               const ParamVector& prev_term, EstimatorKind kind, double gamma,
                               const BaselineConfig& baseline, double* max_weight = nullptr);

}  // namespace byzpg
