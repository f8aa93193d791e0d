#pragma once

#include <vector>

#include "byzpg/adversary.hpp"
#include "byzpg/vec.hpp"

namespace byzpg {

enum class AgreementKind { none, mda, gda };

struct AgreementConfig {
  AgreementKind kind = AgreementKind::mda;
  int rounds = 4;          // kappa
  double alpha_bar = 0.0;  // alpha + eps_bar; < 1/4 for mda, < 1/5 for gda
  int subset_size = 0;     // ceil((1 - alpha_bar) * K); filled by validation
  long long mda_subset_cap = 1000000;
};

const char* agreement_kind_name(AgreementKind kind);

int agreement_subset_size(double alpha_bar, int agent_count);

/// Minimum-diameter subset of exactly m indices; exhaustive search over
/// lexicographically ordered index sets, first minimum wins (ties resolve to
/// the lexicographically smallest set). Throws when (K choose m) exceeds cap,
/// pointing the caller at gda.
std::vector<int> mda_select(const std::vector<ParamVector>& received, int m,
                            long long subset_cap = 1000000);

/// Indices of the m received vectors closest to self_value in squared
/// distance; ties broken by lowest index. Returned sorted ascending.
std::vector<int> gda_select(const std::vector<ParamVector>& received, const ParamVector& self_value,
                            int m);

/// One agreement round at one agent: select per config, average the selection.
ParamVector avg_agree_round(const ParamVector& self_value, const std::vector<ParamVector>& mailbox,
                            const AgreementConfig& config);

/// kappa synchronous broadcast-select-average rounds across the federation.
/// values holds every agent's current vector (Byzantine rows are protocol
/// state; their outgoing messages are substituted by the adversary). Returns
/// the post-agreement vector per agent. kappa = 0 is the identity.
std::vector<ParamVector> run_agreement(const std::vector<ParamVector>& values, Adversary& adversary,
                                       const AgreementConfig& config, int iteration);

}  // namespace byzpg
