#include "byzpg/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "byzpg/runtime.hpp"

namespace byzpg {

const char* attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::random_action: return "random_action";
    case AttackKind::large_noise: return "large_noise";
    case AttackKind::avg_zero: return "avg_zero";
  }
  return "?";
}

namespace {

std::vector<int> sample_distinct(int count, int agent_count, int protected_agent, RngStream& rng) {
  std::vector<int> pool;
  pool.reserve(static_cast<std::size_t>(agent_count));
  for (int i = 0; i < agent_count; ++i) {
    if (i != protected_agent) pool.push_back(i);
  }
  if (count > static_cast<int>(pool.size()))
    throw std::invalid_argument("adversary: byzantine_count exceeds the corruptible agents");
  rng.shuffle(pool);
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

Adversary::Adversary(AdversaryConfig config, int agent_count, std::uint64_t root_seed,
                     int protected_agent)
    : config_(config),
      agent_count_(agent_count),
      root_seed_(root_seed),
      protected_agent_(protected_agent) {
  if (config_.byzantine_count < 0)
    throw std::invalid_argument("adversary: byzantine_count must be nonnegative");
  if (config_.byzantine_count > 0 && config_.selection == ByzSelection::static_set) {
    RngStream rng = agent_stream(root_seed_, kCommonAgent, kPurposeByzSelect, 0);
    static_set_ = sample_distinct(config_.byzantine_count, agent_count_, protected_agent_, rng);
  }
}

const std::vector<int>& Adversary::byzantine_set(int round) {
  if (config_.byzantine_count == 0) {
    round_set_.clear();
    return round_set_;
  }
  if (config_.selection == ByzSelection::static_set) return static_set_;
  if (cached_round_ != round) {
    RngStream rng = agent_stream(root_seed_, kCommonAgent, kPurposeByzSelect,
                                 static_cast<std::uint32_t>(round));
    round_set_ = sample_distinct(config_.byzantine_count, agent_count_, protected_agent_, rng);
    cached_round_ = round;
  }
  return round_set_;
}

bool Adversary::is_byzantine(int agent, int round) {
  const auto& set = byzantine_set(round);
  return std::binary_search(set.begin(), set.end(), agent);
}

std::vector<int> Adversary::honest_set(int round) {
  const auto& byz = byzantine_set(round);
  std::vector<int> honest;
  honest.reserve(static_cast<std::size_t>(agent_count_));
  for (int i = 0; i < agent_count_; ++i) {
    if (!std::binary_search(byz.begin(), byz.end(), i)) honest.push_back(i);
  }
  return honest;
}

void Adversary::refresh_round(int round, int phase, const std::vector<ParamVector>& payloads) {
  // the first broadcast of an iteration fixes the attack values; later phases
  // (agreement sub-rounds) echo them
  (void)phase;
  if (payload_round_ == round) return;
  payload_round_ = round;
  avg_zero_value_.clear();
  noise_values_.assign(static_cast<std::size_t>(agent_count_), {});
  const auto honest = honest_set(round);
  const auto& byz = byzantine_set(round);
  if (byz.empty()) return;

  if (config_.attack == AttackKind::avg_zero) {
    // b = -(1/f) sum over honest payloads, so the K-average is exactly zero
    ParamVector acc(payloads[0].size(), 0.0);
    for (int h : honest) vec_axpy(acc, 1.0, payloads[static_cast<std::size_t>(h)]);
    const double scale = -1.0 / static_cast<double>(byz.size());
    for (double& x : acc) x *= scale;
    avg_zero_value_ = std::move(acc);
  } else if (config_.attack == AttackKind::large_noise) {
    double std_dev = config_.noise_std;
    if (std_dev <= 0.0) {
      double ms = 0.0;
      for (int h : honest) ms += vec_norm2(payloads[static_cast<std::size_t>(h)]);
      ms /= static_cast<double>(honest.size());
      const double dim = static_cast<double>(payloads[0].size());
      std_dev = 10.0 * std::sqrt(ms) / std::sqrt(dim);
      if (!(std_dev > 0.0)) std_dev = 1.0;
    }
    RngStream rng = agent_stream(root_seed_, kCommonAgent, kPurposeByzPayload,
                                 static_cast<std::uint32_t>(round));
    for (int b : byz) {
      ParamVector noise(payloads[0].size());
      for (double& x : noise) x = rng.normal(0.0, std_dev);
      noise_values_[static_cast<std::size_t>(b)] = std::move(noise);
    }
  }
}

ParamVector Adversary::attack_payload(const std::vector<ParamVector>& payloads,
                                      const std::vector<int>&, int sender, int /*recipient*/,
                                      int /*round*/, int /*phase*/) {
  switch (config_.attack) {
    case AttackKind::none:
    case AttackKind::random_action:
      // random_action corrupts sampling upstream; messages follow the protocol
      return payloads[static_cast<std::size_t>(sender)];
    case AttackKind::avg_zero:
      return avg_zero_value_;
    case AttackKind::large_noise:
      return noise_values_[static_cast<std::size_t>(sender)];
  }
  return payloads[static_cast<std::size_t>(sender)];
}

RoundMailbox Adversary::build_mailboxes(const std::vector<ParamVector>& payloads, int round,
                                        int phase) {
  RoundMailbox mb;
  mb.per_recipient.resize(static_cast<std::size_t>(agent_count_));
  for (int r = 0; r < agent_count_; ++r) {
    mb.per_recipient[static_cast<std::size_t>(r)] = build_mailbox_for(r, payloads, round, phase);
  }
  return mb;
}

std::vector<ParamVector> Adversary::build_mailbox_for(int recipient,
                                                      const std::vector<ParamVector>& payloads,
                                                      int round, int phase) {
  if (static_cast<int>(payloads.size()) != agent_count_)
    throw std::invalid_argument("adversary: payload count must equal the agent count");
  refresh_round(round, phase, payloads);
  const auto& byz = byzantine_set(round);
  const auto honest = honest_set(round);
  std::vector<ParamVector> box;
  box.reserve(payloads.size());
  for (int sender = 0; sender < agent_count_; ++sender) {
    if (std::binary_search(byz.begin(), byz.end(), sender)) {
      box.push_back(attack_payload(payloads, honest, sender, recipient, round, phase));
    } else {
      box.push_back(payloads[static_cast<std::size_t>(sender)]);  // verbatim
    }
  }
  return box;
}

}  // namespace byzpg
