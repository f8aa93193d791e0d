#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "byzpg/robust_agg.hpp"

namespace byzpg {

/// Monte-Carlo conformance harness for the robust-aggregation contract:
/// measured ratio E||agg - honest_mean||^2 / (alpha * avg pairwise honest
/// E||.||^2) must stay finite and stable as the Byzantine offset grows; the
/// plain mean must fail the same bound (its error grows with the offset).
struct AggregationEntry {
  std::string kind;
  double c_ra_base = 0.0;        // measured at offset x1
  double c_ra_scaled = 0.0;      // measured at offset x100
  double zero_var_max_err = 0.0; // max ||agg - honest value|| with zero honest variance
  bool robust_expected = true;
  bool pass = false;
};

struct AggregationReport {
  std::vector<AggregationEntry> entries;
  bool pass = false;
};

AggregationReport aggregation_conformance(std::uint64_t seed, int trials = 1000, int agents = 12,
                                          int byzantine = 2, int dim = 8);

/// Agreement contract: honest diameter after kappa rounds <= initial / 2^kappa
/// (absolute slack 1e-9) on every adversarial trial; honest-mean drift bounded
/// by a finite measured constant times the initial diameter.
struct AgreementEntry {
  std::string kind;
  int kappa = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max over trials of final_diam / (init_diam / 2^kappa)
  double c_avg_hat = 0.0;    // max over trials of ||mean drift|| / init_diam
  bool pass = false;
};

struct AgreementReport {
  std::vector<AgreementEntry> entries;
  bool pass = false;
};

AgreementReport agreement_conformance(std::uint64_t seed, int trials = 1000, int agents = 7,
                                      int byzantine = 1, int dim = 8,
                                      std::vector<int> kappas = {1, 2, 4});

/// Estimator unbiasedness against the enumeration oracle on the 3-state
/// chain: REINFORCE, GPOMDP, importance-weighted GPOMDP and the PAGE
/// correction, each within 3 standard errors componentwise.
struct EstimatorEntry {
  std::string name;
  double max_abs_z = 0.0;  // max over components of |mc_mean - exact| / se
  bool pass = false;
};

struct EstimatorReport {
  std::vector<EstimatorEntry> entries;
  bool pass = false;
};

EstimatorReport estimator_conformance(std::uint64_t seed, int samples = 200000);

std::string format_report(const AggregationReport& report);
std::string format_report(const AgreementReport& report);
std::string format_report(const EstimatorReport& report);

}  // namespace byzpg
