#pragma once

#include <vector>

#include "byzpg/rng.hpp"
#include "byzpg/vec.hpp"

namespace byzpg {

enum class AggregatorKind { mean, krum, rfa, bucketed_krum, bucketed_rfa };

struct AggregatorConfig {
  AggregatorKind kind = AggregatorKind::bucketed_rfa;
  double alpha = 0.0;       // assumed Byzantine fraction, in [0, alpha_max)
  double alpha_max = 0.25;  // 1/2 centralized, 1/4 decentralized
  int weiszfeld_iters = 64;
  double weiszfeld_smoothing = 1e-8;
};

const char* aggregator_kind_name(AggregatorKind kind);

/// Krum: the input minimizing the summed squared distance to its
/// ceil((1-alpha)K) nearest neighbors (the candidate itself included).
/// Ties broken by lowest input index. Output is always one of the inputs.
ParamVector krum(const std::vector<ParamVector>& inputs, double alpha);

/// Approximate geometric median via smoothed Weiszfeld iterations started
/// from the coordinate-wise mean. Fixed iteration budget, no early exit.
ParamVector rfa(const std::vector<ParamVector>& inputs, const AggregatorConfig& config);

/// Random permutation, contiguous groups of bucket_size, group means.
/// The last bucket may be smaller. bucket_size = 1 is a permuted identity.
std::vector<ParamVector> bucketize(const std::vector<ParamVector>& inputs, int bucket_size,
                                   RngStream& rng);

/// floor(alpha_max / alpha), clamped to [1, K]; covers all inputs when
/// alpha == 0 (aggregation must then equal the plain mean).
int bucket_size_for(const AggregatorConfig& config, int input_count);

/// Dispatch per config. Bucketed kinds consume the rng for the permutation;
/// mean, krum and rfa never touch it. A single input is returned unchanged.
ParamVector robust_aggregate(const std::vector<ParamVector>& inputs,
                             const AggregatorConfig& config, RngStream& bucket_rng);

}  // namespace byzpg
