#include <algorithm>
#include <cmath>

#include "byzpg/agreement.hpp"
#include "byzpg/conformance.hpp"
#include "doctest.h"

using namespace byzpg;

namespace {

std::vector<ParamVector> one_dim(std::initializer_list<double> xs) {
  std::vector<ParamVector> out;
  for (double x : xs) out.push_back({x});
  return out;
}

// brute-force oracle: all m-subsets, minimum diameter, lexicographic ties
std::vector<int> brute_force_mda(const std::vector<ParamVector>& vs, int m) {
  const int k = static_cast<int>(vs.size());
  std::vector<int> comb(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) comb[static_cast<std::size_t>(i)] = i;
  std::vector<int> best = comb;
  double best_diam = 1e300;
  while (true) {
    double diam = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        diam = std::max(diam, vec_dist(vs[static_cast<std::size_t>(comb[static_cast<std::size_t>(a)])],
                                       vs[static_cast<std::size_t>(comb[static_cast<std::size_t>(b)])]));
    if (diam < best_diam) {
      best_diam = diam;
      best = comb;
    }
    int i = m - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == k - m + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

}  // namespace

TEST_SUITE("agreement") {

TEST_CASE("mda: all-equal inputs select the first m indices") {
  std::vector<ParamVector> vs(5, ParamVector{1.0});
  CHECK(mda_select(vs, 3) == std::vector<int>{0, 1, 2});
}

TEST_CASE("mda: an obvious outlier is excluded") {
  CHECK(mda_select(one_dim({0, 0.1, 0.2, 50}), 3) == std::vector<int>{0, 1, 2});
}

TEST_CASE("mda: matches the brute-force oracle") {
  const auto vs = one_dim({0, 1, 2, 3, 10});
  CHECK(brute_force_mda(vs, 3) == std::vector<int>{0, 1, 2});
  CHECK(mda_select(vs, 3) == std::vector<int>{0, 1, 2});
  // randomized cross-check
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RngStream rng(seed);
    std::vector<ParamVector> pts;
    for (int i = 0; i < 8; ++i) pts.push_back({rng.normal(), rng.normal()});
    CHECK(mda_select(pts, 5) == brute_force_mda(pts, 5));
  }
}

TEST_CASE("mda: combinatorial cap points at gda") {
  std::vector<ParamVector> vs(40, ParamVector{0.0});
  CHECK_THROWS_WITH_AS(mda_select(vs, 20, 1000000), doctest::Contains("gda"),
                       std::invalid_argument);
}

TEST_CASE("gda: nearest subset with ties by index") {
  const auto vs = one_dim({0, 1, 2, 3, 10});
  CHECK(gda_select(vs, {2.4}, 3) == std::vector<int>{1, 2, 3});
  // self equal to one vector, everything else far: that vector comes first
  CHECK(gda_select(one_dim({5, 100, -90}), {5.0}, 1) == std::vector<int>{0});
  std::vector<ParamVector> equal(4, ParamVector{2.0});
  CHECK(gda_select(equal, {2.0}, 2) == std::vector<int>{0, 1});
}

TEST_CASE("one averaging round fully merges two honest values") {
  AgreementConfig cfg;
  cfg.kind = AgreementKind::mda;
  cfg.rounds = 1;
  cfg.subset_size = 2;
  const auto mailbox = one_dim({0, 1});
  const ParamVector out0 = avg_agree_round({0.0}, mailbox, cfg);
  const ParamVector out1 = avg_agree_round({1.0}, mailbox, cfg);
  CHECK(out0[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(out1[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("run_agreement: kappa zero is the identity, all-equal is a fixed point") {
  AdversaryConfig acfg;
  Adversary adv(acfg, 4, 1);
  AgreementConfig cfg;
  cfg.kind = AgreementKind::mda;
  cfg.alpha_bar = 0.01;
  cfg.subset_size = 4;

  std::vector<ParamVector> vs = {{1, 2}, {3, 4}, {5, 6}, {7, 8}};
  cfg.rounds = 0;
  CHECK(run_agreement(vs, adv, cfg, 0) == vs);

  std::vector<ParamVector> eq(4, ParamVector{2.0, -1.0});
  cfg.rounds = 3;
  CHECK(run_agreement(eq, adv, cfg, 0) == eq);
}

TEST_CASE("outputs stay in the convex hull of the received values") {
  AdversaryConfig acfg;
  Adversary adv(acfg, 5, 1);
  AgreementConfig cfg;
  cfg.kind = AgreementKind::gda;
  cfg.rounds = 1;
  cfg.subset_size = 4;
  RngStream gen(3);
  std::vector<ParamVector> vs;
  for (int i = 0; i < 5; ++i) vs.push_back({gen.normal(), gen.normal()});
  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (const auto& v : vs) {
    for (int i = 0; i < 2; ++i) {
      lo[i] = std::min(lo[i], v[static_cast<std::size_t>(i)]);
      hi[i] = std::max(hi[i], v[static_cast<std::size_t>(i)]);
    }
  }
  for (const auto& out : run_agreement(vs, adv, cfg, 0)) {
    for (int i = 0; i < 2; ++i) {
      CHECK(out[static_cast<std::size_t>(i)] >= lo[i] - 1e-12);
      CHECK(out[static_cast<std::size_t>(i)] <= hi[i] + 1e-12);
    }
  }
}

TEST_CASE("contraction and drift conformance (reduced trials)") {
  const AgreementReport report =
      agreement_conformance(/*seed=*/17, /*trials=*/60, /*agents=*/7, /*byzantine=*/1, /*dim=*/8);
  for (const auto& e : report.entries) {
    INFO(e.kind, " kappa=", e.kappa, " violations=", e.violations, " c_avg=", e.c_avg_hat);
    CHECK(e.violations == 0);
    CHECK(std::isfinite(e.c_avg_hat));
  }
  CHECK(report.pass);
}

TEST_CASE("subset sizes follow ceil((1 - alpha_bar) K)") {
  CHECK(agreement_subset_size(0.15, 7) == 6);
  CHECK(agreement_subset_size(0.24, 13) == 10);
  CHECK(agreement_subset_size(0.0, 5) == 5);
}

}  // TEST_SUITE
