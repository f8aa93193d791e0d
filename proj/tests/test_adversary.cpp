#include <cmath>

#include "byzpg/adversary.hpp"
#include "doctest.h"

using namespace byzpg;

namespace {

std::vector<ParamVector> random_payloads(int k, int d, std::uint64_t seed) {
  RngStream gen(seed);
  std::vector<ParamVector> out(static_cast<std::size_t>(k));
  for (auto& v : out) {
    v.resize(static_cast<std::size_t>(d));
    for (double& x : v) x = gen.normal();
  }
  return out;
}

// test hook: recipient-dependent payloads
class SplitAdversary : public Adversary {
 public:
  using Adversary::Adversary;

 protected:
  ParamVector attack_payload(const std::vector<ParamVector>& payloads, const std::vector<int>&,
                             int, int recipient, int, int) override {
    return ParamVector(payloads[0].size(), static_cast<double>(recipient));
  }
};

}  // namespace

TEST_SUITE("adversary") {

TEST_CASE("no byzantine agents means empty sets and verbatim delivery") {
  AdversaryConfig cfg;
  Adversary adv(cfg, 4, 9);
  CHECK(adv.byzantine_set(0).empty());
  CHECK(adv.honest_set(0) == std::vector<int>{0, 1, 2, 3});
  const auto payloads = random_payloads(4, 3, 1);
  const RoundMailbox mb = adv.build_mailboxes(payloads, 0, 0);
  for (const auto& box : mb.per_recipient) CHECK(box == payloads);
}

TEST_CASE("static selection is fixed across rounds and seeds reproduce it") {
  AdversaryConfig cfg;
  cfg.byzantine_count = 2;
  Adversary a(cfg, 8, 42), b(cfg, 8, 42);
  const auto set0 = a.byzantine_set(0);
  CHECK(set0.size() == 2);
  for (int round = 1; round < 50; ++round) CHECK(a.byzantine_set(round) == set0);
  CHECK(b.byzantine_set(7) == set0);
}

TEST_CASE("per-round selection matches the binomial inclusion rate") {
  AdversaryConfig cfg;
  cfg.byzantine_count = 2;
  cfg.selection = ByzSelection::per_round;
  Adversary adv(cfg, 8, 17);
  const int rounds = 10000;
  std::vector<int> hits(8, 0);
  for (int r = 0; r < rounds; ++r) {
    for (int agent : adv.byzantine_set(r)) ++hits[static_cast<std::size_t>(agent)];
  }
  const double p = 2.0 / 8.0;
  const double se = std::sqrt(p * (1 - p) / rounds);
  for (int agent = 0; agent < 8; ++agent) {
    CHECK(std::abs(hits[static_cast<std::size_t>(agent)] / static_cast<double>(rounds) - p) <= 3 * se);
  }
}

TEST_CASE("the protected server is never selected") {
  AdversaryConfig cfg;
  cfg.byzantine_count = 3;
  cfg.selection = ByzSelection::per_round;
  Adversary adv(cfg, 8, 23, /*protected_agent=*/0);
  for (int r = 0; r < 500; ++r) {
    for (int agent : adv.byzantine_set(r)) CHECK(agent != 0);
  }
}

TEST_CASE("avg_zero: hand case and the exact-zero mailbox average") {
  AdversaryConfig cfg;
  cfg.attack = AttackKind::avg_zero;
  cfg.byzantine_count = 1;
  Adversary adv(cfg, 3, 5);
  const int byz = adv.byzantine_set(0)[0];
  std::vector<ParamVector> payloads(3, ParamVector{0.0});
  // honest payloads 1 and 3 -> the byzantine must send -4
  double honest_vals[2] = {1.0, 3.0};
  int next = 0;
  for (int i = 0; i < 3; ++i) {
    if (i != byz) payloads[static_cast<std::size_t>(i)] = {honest_vals[next++]};
  }
  const auto box = adv.build_mailbox_for(0, payloads, 0, 0);
  CHECK(box[static_cast<std::size_t>(byz)] == ParamVector{-4.0});
  double total = 0.0;
  for (const auto& v : box) total += v[0];
  CHECK(std::abs(total) <= 1e-9);
}

TEST_CASE("avg_zero: every recipient sees a zero-sum mailbox") {
  AdversaryConfig cfg;
  cfg.attack = AttackKind::avg_zero;
  cfg.byzantine_count = 3;
  Adversary adv(cfg, 13, 31);
  const auto payloads = random_payloads(13, 6, 2);
  const RoundMailbox mb = adv.build_mailboxes(payloads, 4, 0);
  for (const auto& box : mb.per_recipient) {
    ParamVector total(6, 0.0);
    for (const auto& v : box) vec_axpy(total, 1.0, v);
    CHECK(vec_norm(total) <= 1e-9);
  }
}

TEST_CASE("large_noise: matching moments with an explicit std") {
  AdversaryConfig cfg;
  cfg.attack = AttackKind::large_noise;
  cfg.byzantine_count = 2;
  cfg.noise_std = 2.5;
  Adversary adv(cfg, 8, 77);
  const int d = 50;
  double sum = 0.0, sq = 0.0;
  long long n = 0;
  for (int round = 0; round < 200; ++round) {
    const auto payloads = random_payloads(8, d, 1000 + static_cast<std::uint64_t>(round));
    const auto box = adv.build_mailbox_for(1, payloads, round, 0);
    for (int b : adv.byzantine_set(round)) {
      for (double x : box[static_cast<std::size_t>(b)]) {
        sum += x;
        sq += x * x;
        ++n;
      }
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - mean * mean;
  const double se_mean = 2.5 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean) <= 3 * se_mean);
  CHECK(std::sqrt(var) == doctest::Approx(2.5).epsilon(0.05));
}

TEST_CASE("honest rows are delivered verbatim under every attack") {
  for (AttackKind attack : {AttackKind::none, AttackKind::random_action, AttackKind::large_noise,
                            AttackKind::avg_zero}) {
    AdversaryConfig cfg;
    cfg.attack = attack;
    cfg.byzantine_count = 2;
    Adversary adv(cfg, 9, 3);
    const auto payloads = random_payloads(9, 4, 7);
    const RoundMailbox mb = adv.build_mailboxes(payloads, 0, 0);
    for (const auto& box : mb.per_recipient) {
      for (int sender = 0; sender < 9; ++sender) {
        if (!adv.is_byzantine(sender, 0))
          CHECK(box[static_cast<std::size_t>(sender)] == payloads[static_cast<std::size_t>(sender)]);
      }
    }
  }
}

TEST_CASE("agreement phases echo the gradient-phase attack value") {
  AdversaryConfig cfg;
  cfg.attack = AttackKind::large_noise;
  cfg.byzantine_count = 1;
  cfg.noise_std = 1.0;
  Adversary adv(cfg, 5, 13);
  const auto payloads = random_payloads(5, 3, 11);
  const auto grad_box = adv.build_mailbox_for(2, payloads, 0, 0);
  const auto agree_box1 = adv.build_mailbox_for(2, random_payloads(5, 3, 12), 0, 1);
  const auto agree_box2 = adv.build_mailbox_for(2, random_payloads(5, 3, 13), 0, 2);
  const int byz = adv.byzantine_set(0)[0];
  CHECK(agree_box1[static_cast<std::size_t>(byz)] == grad_box[static_cast<std::size_t>(byz)]);
  CHECK(agree_box2[static_cast<std::size_t>(byz)] == grad_box[static_cast<std::size_t>(byz)]);
}

TEST_CASE("a recipient-dependent attack differs only in byzantine rows") {
  AdversaryConfig cfg;
  cfg.attack = AttackKind::large_noise;  // any message attack; the hook overrides it
  cfg.byzantine_count = 2;
  SplitAdversary adv(cfg, 6, 19);
  const auto payloads = random_payloads(6, 2, 3);
  const RoundMailbox mb = adv.build_mailboxes(payloads, 0, 0);
  for (int r = 0; r < 6; ++r) {
    for (int sender = 0; sender < 6; ++sender) {
      const auto& row = mb.per_recipient[static_cast<std::size_t>(r)][static_cast<std::size_t>(sender)];
      if (adv.is_byzantine(sender, 0)) {
        CHECK(row == ParamVector(2, static_cast<double>(r)));
      } else {
        CHECK(row == payloads[static_cast<std::size_t>(sender)]);
      }
    }
  }
}

TEST_CASE("random_action corrupts sampling, not messages") {
  AdversaryConfig cfg;
  cfg.attack = AttackKind::random_action;
  cfg.byzantine_count = 2;
  Adversary adv(cfg, 6, 29);
  CHECK(adv.corrupts_sampling());
  const auto payloads = random_payloads(6, 2, 5);
  const RoundMailbox mb = adv.build_mailboxes(payloads, 0, 0);
  for (const auto& box : mb.per_recipient) CHECK(box == payloads);
}

}  // TEST_SUITE
