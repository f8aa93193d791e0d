#include "byzpg/robust_agg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace byzpg {

const char* aggregator_kind_name(AggregatorKind kind) {
  switch (kind) {
    case AggregatorKind::mean: return "mean";
    case AggregatorKind::krum: return "krum";
    case AggregatorKind::rfa: return "rfa";
    case AggregatorKind::bucketed_krum: return "bucketed_krum";
    case AggregatorKind::bucketed_rfa: return "bucketed_rfa";
  }
  return "?";
}

ParamVector krum(const std::vector<ParamVector>& inputs, double alpha) {
  const int k = static_cast<int>(inputs.size());
  if (k < 2) throw std::invalid_argument("krum: needs at least two inputs");
  const int neighbors =
      std::clamp(static_cast<int>(std::ceil((1.0 - alpha) * k - 1e-12)), 1, k);
  std::vector<std::vector<double>> d2(static_cast<std::size_t>(k),
                                      std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double d = vec_dist2(inputs[static_cast<std::size_t>(i)], inputs[static_cast<std::size_t>(j)]);
      d2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
      d2[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
    }
  }
  int best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<double> row;
  for (int i = 0; i < k; ++i) {
    row = d2[static_cast<std::size_t>(i)];  // includes the zero self-distance
    std::partial_sort(row.begin(), row.begin() + neighbors, row.end());
    double score = 0.0;
    for (int j = 0; j < neighbors; ++j) score += row[static_cast<std::size_t>(j)];
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return inputs[static_cast<std::size_t>(best)];
}

ParamVector rfa(const std::vector<ParamVector>& inputs, const AggregatorConfig& config) {
  if (inputs.empty()) throw std::invalid_argument("rfa: needs at least one input");
  ParamVector x = vec_mean(inputs);
  const double nu = config.weiszfeld_smoothing;
  std::vector<double> w(inputs.size());
  for (int it = 0; it < config.weiszfeld_iters; ++it) {
    double wsum = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      w[i] = 1.0 / std::max(nu, vec_dist(x, inputs[i]));
      wsum += w[i];
    }
    ParamVector next(x.size(), 0.0);
    for (std::size_t i = 0; i < inputs.size(); ++i) vec_axpy(next, w[i], inputs[i]);
    for (double& v : next) v /= wsum;
    x = std::move(next);
  }
  return x;
}

std::vector<ParamVector> bucketize(const std::vector<ParamVector>& inputs, int bucket_size,
                                   RngStream& rng) {
  if (bucket_size < 1) throw std::invalid_argument("bucketize: bucket size must be >= 1");
  const int k = static_cast<int>(inputs.size());
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<ParamVector> out;
  out.reserve(static_cast<std::size_t>((k + bucket_size - 1) / bucket_size));
  for (int start = 0; start < k; start += bucket_size) {
    const int end = std::min(start + bucket_size, k);
    std::vector<int> idx(perm.begin() + start, perm.begin() + end);
    out.push_back(vec_mean_indices(inputs, idx));
  }
  return out;
}

int bucket_size_for(const AggregatorConfig& config, int input_count) {
  if (config.alpha <= 0.0) return input_count;
  const int s = static_cast<int>(std::floor(config.alpha_max / config.alpha));
  return std::clamp(s, 1, input_count);
}

ParamVector robust_aggregate(const std::vector<ParamVector>& inputs,
                             const AggregatorConfig& config, RngStream& bucket_rng) {
  if (inputs.empty()) throw std::invalid_argument("aggregate: empty input");
  if (inputs.size() == 1) return inputs[0];
  switch (config.kind) {
    case AggregatorKind::mean:
      return vec_mean(inputs);
    case AggregatorKind::krum:
      return krum(inputs, config.alpha);
    case AggregatorKind::rfa:
      return rfa(inputs, config);
    case AggregatorKind::bucketed_krum: {
      const auto buckets = bucketize(inputs, bucket_size_for(config, static_cast<int>(inputs.size())), bucket_rng);
      if (buckets.size() < 2) return buckets[0];
      return krum(buckets, config.alpha);
    }
    case AggregatorKind::bucketed_rfa: {
      const auto buckets = bucketize(inputs, bucket_size_for(config, static_cast<int>(inputs.size())), bucket_rng);
      return rfa(buckets, config);
    }
  }
  throw std::invalid_argument("aggregate: unknown kind");
}

}  // namespace byzpg
