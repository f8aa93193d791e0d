#include <algorithm>
#include <cmath>

#include "byzpg/conformance.hpp"
#include "byzpg/robust_agg.hpp"
#include "doctest.h"

using namespace byzpg;

namespace {

std::vector<ParamVector> one_dim(std::initializer_list<double> xs) {
  std::vector<ParamVector> out;
  for (double x : xs) out.push_back({x});
  return out;
}

}  // namespace

TEST_SUITE("robust_agg") {

TEST_CASE("krum: all-equal inputs return that value") {
  std::vector<ParamVector> inputs(5, ParamVector{1.5, -2.0});
  CHECK(krum(inputs, 0.2) == ParamVector{1.5, -2.0});
}

TEST_CASE("krum: hand-enumerated outlier case") {
  // K=4, alpha=0.25 -> 3 neighbors including self. Scores: each zero input
  // has two zero-distance neighbors (score 0); the outlier's two nearest
  // neighbors sit at distance 100 (score 2*100^2). Index 0 wins the tie.
  const auto inputs = one_dim({0, 0, 0, 100});
  CHECK(krum(inputs, 0.25) == ParamVector{0.0});
}

TEST_CASE("krum: symmetric two-input tie resolves to input 0") {
  const auto inputs = one_dim({3.0, 7.0});
  CHECK(krum(inputs, 0.0) == ParamVector{3.0});
}

TEST_CASE("rfa: a repeated point is a fixed point") {
  AggregatorConfig cfg;
  std::vector<ParamVector> inputs(4, ParamVector{2.0, 3.0});
  CHECK(rfa(inputs, cfg) == ParamVector{2.0, 3.0});
}

TEST_CASE("rfa: square vertices average to the center") {
  AggregatorConfig cfg;
  const std::vector<ParamVector> inputs = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  const ParamVector out = rfa(inputs, cfg);
  CHECK(std::abs(out[0]) <= 1e-6);
  CHECK(std::abs(out[1]) <= 1e-6);
}

TEST_CASE("rfa: one-dimensional median against a brute-force grid") {
  AggregatorConfig cfg;
  const auto inputs = one_dim({0, 0, 0, 10});
  // brute-force oracle: minimize sum |x - p| over a fine grid
  double best_x = 0.0, best_val = 1e300;
  for (double x = -1.0; x <= 11.0; x += 1e-4) {
    double v = 0.0;
    for (const auto& p : inputs) v += std::abs(x - p[0]);
    if (v < best_val) {
      best_val = v;
      best_x = x;
    }
  }
  CHECK(std::abs(best_x - 0.0) <= 1e-3);  // the geometric median is 0
  const ParamVector out = rfa(inputs, cfg);
  CHECK(std::abs(out[0] - best_x) <= 1e-3);
}

TEST_CASE("bucketize: size one permutes, size K averages everything") {
  RngStream rng1(4);
  const auto inputs = one_dim({1, 2, 3, 4, 5});
  auto b1 = bucketize(inputs, 1, rng1);
  REQUIRE(b1.size() == 5);
  std::vector<double> vals;
  for (const auto& v : b1) vals.push_back(v[0]);
  std::sort(vals.begin(), vals.end());
  CHECK(vals == std::vector<double>{1, 2, 3, 4, 5});

  RngStream rng2(4);
  const auto bk = bucketize(inputs, 5, rng2);
  REQUIRE(bk.size() == 1);
  CHECK(bk[0][0] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("bucketize: K=6 with alpha 1/8 under cap 1/4 gives 3 buckets of 2") {
  AggregatorConfig cfg;
  cfg.alpha = 1.0 / 8.0;
  cfg.alpha_max = 0.25;
  CHECK(bucket_size_for(cfg, 6) == 2);
  RngStream rng(9);
  const auto inputs = one_dim({1, 2, 3, 4, 5, 6});
  const auto buckets = bucketize(inputs, 2, rng);
  CHECK(buckets.size() == 3);
  // every input contributes to exactly one bucket mean
  double total = 0.0;
  for (const auto& b : buckets) total += 2.0 * b[0];
  CHECK(total == doctest::Approx(21.0).epsilon(1e-12));
}

TEST_CASE("robust_aggregate: mean kind is the arithmetic mean") {
  AggregatorConfig cfg;
  cfg.kind = AggregatorKind::mean;
  RngStream rng(1);
  const auto inputs = one_dim({1, 2, 3, 4});
  CHECK(robust_aggregate(inputs, cfg, rng) == ParamVector{2.5});
}

TEST_CASE("robust_aggregate: bucketed krum degenerates to plain krum at bucket size one") {
  AggregatorConfig cfg;
  cfg.kind = AggregatorKind::bucketed_krum;
  cfg.alpha = 0.2;
  cfg.alpha_max = 0.25;
  CHECK(bucket_size_for(cfg, 10) == 1);
  RngStream rng(2);
  std::vector<ParamVector> inputs;
  RngStream gen(3);
  for (int i = 0; i < 10; ++i) inputs.push_back({gen.normal(), gen.normal()});
  const ParamVector bucketed = robust_aggregate(inputs, cfg, rng);
  CHECK(bucketed == krum(inputs, 0.2));
}

TEST_CASE("robust_aggregate: zero alpha with bucketing reduces to the mean") {
  AggregatorConfig cfg;
  cfg.kind = AggregatorKind::bucketed_rfa;
  cfg.alpha = 0.0;
  RngStream rng(5);
  const auto inputs = one_dim({2, 4, 6, 8});
  const ParamVector out = robust_aggregate(inputs, cfg, rng);
  CHECK(out[0] == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("translation equivariance for every kind") {
  RngStream gen(7);
  std::vector<ParamVector> inputs;
  for (int i = 0; i < 8; ++i) inputs.push_back({gen.normal(), gen.normal(), gen.normal()});
  const ParamVector shift = {10.0, -4.0, 2.5};
  std::vector<ParamVector> shifted = inputs;
  for (auto& v : shifted)
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += shift[i];

  for (AggregatorKind kind : {AggregatorKind::mean, AggregatorKind::krum, AggregatorKind::rfa,
                              AggregatorKind::bucketed_krum, AggregatorKind::bucketed_rfa}) {
    AggregatorConfig cfg;
    cfg.kind = kind;
    cfg.alpha = 0.125;
    cfg.alpha_max = 0.25;
    RngStream r1(11), r2(11);  // identical permutations for the bucketed kinds
    const ParamVector a = robust_aggregate(inputs, cfg, r1);
    const ParamVector b = robust_aggregate(shifted, cfg, r2);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(b[i] - a[i] == doctest::Approx(shift[i]).epsilon(1e-9));
  }
}

TEST_CASE("krum output value is invariant under input reordering") {
  RngStream gen(13);
  std::vector<ParamVector> inputs;
  for (int i = 0; i < 7; ++i) inputs.push_back({gen.normal(), gen.normal()});
  const ParamVector base = krum(inputs, 0.2);
  std::vector<ParamVector> reordered = inputs;
  std::rotate(reordered.begin(), reordered.begin() + 3, reordered.end());
  CHECK(krum(reordered, 0.2) == base);
}

TEST_CASE("zero honest variance: krum exact, rfa within the smoothing floor") {
  const ParamVector v = {1.0, -2.0, 0.5};
  std::vector<ParamVector> inputs(10, v);
  inputs[3] = {500.0, 500.0, 500.0};
  inputs[7] = {-300.0, 200.0, 100.0};
  CHECK(krum(inputs, 0.2) == v);
  AggregatorConfig cfg;
  cfg.kind = AggregatorKind::bucketed_rfa;
  cfg.alpha = 0.2;
  cfg.alpha_max = 0.25;
  RngStream rng(15);
  const ParamVector out = robust_aggregate(inputs, cfg, rng);
  CHECK(vec_dist(out, v) <= 1e-6);
}

TEST_CASE("aggregation conformance harness (reduced trials)") {
  const AggregationReport report = aggregation_conformance(/*seed=*/3, /*trials=*/100);
  for (const auto& e : report.entries) {
    INFO(e.kind, " C_ra x1=", e.c_ra_base, " x100=", e.c_ra_scaled);
    CHECK(e.pass);
  }
}

TEST_CASE("degenerate inputs are rejected") {
  RngStream rng(1);
  AggregatorConfig cfg;
  CHECK_THROWS_AS(robust_aggregate({}, cfg, rng), std::invalid_argument);
  CHECK_THROWS_AS(krum({}, 0.1), std::invalid_argument);
  RngStream rng2(2);
  CHECK_THROWS_AS(bucketize(one_dim({1, 2}), 0, rng2), std::invalid_argument);
}

}  // TEST_SUITE
