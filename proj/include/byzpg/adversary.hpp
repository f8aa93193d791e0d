#pragma once

#include <cstdint>
#include <vector>

#include "byzpg/rng.hpp"
#include "byzpg/vec.hpp"

namespace byzpg {

enum class AttackKind { none, random_action, large_noise, avg_zero };
enum class ByzSelection { static_set, per_round };

struct AdversaryConfig {
  AttackKind attack = AttackKind::none;
  int byzantine_count = 0;
  ByzSelection selection = ByzSelection::static_set;
  double noise_std = 0.0;  // 0 = auto: 10 * rms(honest payload norms) / sqrt(d)
};

const char* attack_kind_name(AttackKind kind);

/// Per-recipient record of the K vectors delivered in one broadcast. Honest
/// rows are identical across recipients; Byzantine rows may differ.
struct RoundMailbox {
  std::vector<std::vector<ParamVector>> per_recipient;  // [recipient][sender]
};

/// Omniscient adversary: sees all honest payloads before delivery, controls
/// the Byzantine set, and substitutes Byzantine rows per recipient. Carries
/// no state across iterations beyond the static set selection.
///
/// Phases within an iteration: phase 0 is the gradient broadcast; phases
/// 1..kappa are agreement sub-rounds. The default attacks compute their value
/// at phase 0 and echo it in later phases of the same iteration.
class Adversary {
 public:
  /// protected_agent (when >= 0) is never selected Byzantine; used for the
  /// trusted server in the centralized setting.
  Adversary(AdversaryConfig config, int agent_count, std::uint64_t root_seed,
            int protected_agent = -1);
  virtual ~Adversary() = default;

  const AdversaryConfig& config() const { return config_; }
  int agent_count() const { return agent_count_; }

  const std::vector<int>& byzantine_set(int round);
  bool is_byzantine(int agent, int round);
  std::vector<int> honest_set(int round);
  /// True when the attack corrupts environment interaction rather than
  /// messages (RandomAction samples actions uniformly at random).
  bool corrupts_sampling() const { return config_.attack == AttackKind::random_action; }

  /// Mailboxes for every recipient; honest rows copied verbatim.
  RoundMailbox build_mailboxes(const std::vector<ParamVector>& payloads, int round, int phase);
  /// Single recipient variant (centralized server).
  std::vector<ParamVector> build_mailbox_for(int recipient, const std::vector<ParamVector>& payloads,
                                             int round, int phase);

 protected:
  /// Value a Byzantine sender delivers to one recipient. Override to model
  /// bespoke attacks (per-recipient inconsistency, adaptive behavior, ...).
  virtual ParamVector attack_payload(const std::vector<ParamVector>& payloads,
                                     const std::vector<int>& honest, int sender, int recipient,
                                     int round, int phase);

 private:
  void refresh_round(int round, int phase, const std::vector<ParamVector>& payloads);

  AdversaryConfig config_;
  int agent_count_;
  std::uint64_t root_seed_;
  int protected_agent_;
  std::vector<int> static_set_;
  int cached_round_ = -1;
  std::vector<int> round_set_;
  // phase-0 values cached for the echo in agreement sub-rounds
  int payload_round_ = -1;
  ParamVector avg_zero_value_;
  std::vector<ParamVector> noise_values_;  // [sender]
};

}  // namespace byzpg
