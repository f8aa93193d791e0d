#include "byzpg/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace byzpg {

const char* agreement_kind_name(AgreementKind kind) {
  switch (kind) {
    case AgreementKind::none: return "none";
    case AgreementKind::mda: return "mda";
    case AgreementKind::gda: return "gda";
  }
  return "?";
}

int agreement_subset_size(double alpha_bar, int agent_count) {
  const int m = static_cast<int>(std::ceil((1.0 - alpha_bar) * agent_count - 1e-12));
  return std::clamp(m, 1, agent_count);
}

namespace {

long long choose(int n, int r) {
  r = std::min(r, n - r);
  long long c = 1;
  for (int i = 1; i <= r; ++i) {
    c = c * (n - r + i) / i;
    if (c > (1ll << 56)) return c;  // saturated; caller only compares against a cap
  }
  return c;
}

}  // namespace

std::vector<int> mda_select(const std::vector<ParamVector>& received, int m,
                            long long subset_cap) {
  const int k = static_cast<int>(received.size());
  if (m < 1 || m > k) throw std::invalid_argument("mda: subset size out of range");
  if (choose(k, m) > subset_cap)
    throw std::invalid_argument(
        "mda: subset search space exceeds the cap; use the gda agreement kind for this many agents");

  std::vector<std::vector<double>> d2(static_cast<std::size_t>(k),
                                      std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double d = vec_dist2(received[static_cast<std::size_t>(i)], received[static_cast<std::size_t>(j)]);
      d2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
      d2[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
    }
  }

  // lexicographic enumeration; first strict minimum wins, so ties resolve to
  // the lexicographically smallest index set
  std::vector<int> comb(static_cast<std::size_t>(m));
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<int> best = comb;
  double best_diam = std::numeric_limits<double>::infinity();
  while (true) {
    double diam = 0.0;
    for (int a = 0; a < m && diam < best_diam; ++a) {
      for (int b = a + 1; b < m; ++b) {
        diam = std::max(diam, d2[static_cast<std::size_t>(comb[static_cast<std::size_t>(a)])]
                                 [static_cast<std::size_t>(comb[static_cast<std::size_t>(b)])]);
        if (diam >= best_diam) break;
      }
    }
    if (diam < best_diam) {
      best_diam = diam;
      best = comb;
    }
    // next combination
    int i = m - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == k - m + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

std::vector<int> gda_select(const std::vector<ParamVector>& received, const ParamVector& self_value,
                            int m) {
  const int k = static_cast<int>(received.size());
  if (m < 1 || m > k) throw std::invalid_argument("gda: subset size out of range");
  std::vector<std::pair<double, int>> order(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    order[static_cast<std::size_t>(i)] = {vec_dist2(received[static_cast<std::size_t>(i)], self_value), i};
  }
  std::sort(order.begin(), order.end());  // ties resolve to the lower index
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = order[static_cast<std::size_t>(i)].second;
  std::sort(idx.begin(), idx.end());
  return idx;
}

ParamVector avg_agree_round(const ParamVector& self_value, const std::vector<ParamVector>& mailbox,
                            const AgreementConfig& config) {
  const int k = static_cast<int>(mailbox.size());
  const int m = config.subset_size > 0 ? config.subset_size
                                       : agreement_subset_size(config.alpha_bar, k);
  std::vector<int> selected;
  switch (config.kind) {
    case AgreementKind::mda:
      selected = mda_select(mailbox, m, config.mda_subset_cap);
      break;
    case AgreementKind::gda:
      selected = gda_select(mailbox, self_value, m);
      break;
    case AgreementKind::none:
      return self_value;
  }
  return vec_mean_indices(mailbox, selected);
}

std::vector<ParamVector> run_agreement(const std::vector<ParamVector>& values, Adversary& adversary,
                                       const AgreementConfig& config, int iteration) {
  if (config.kind == AgreementKind::none || config.rounds == 0) return values;
  const int k = static_cast<int>(values.size());
  std::vector<ParamVector> current = values;
  for (int r = 0; r < config.rounds; ++r) {
    RoundMailbox mailboxes = adversary.build_mailboxes(current, iteration, 1 + r);
    std::vector<ParamVector> next(static_cast<std::size_t>(k));
    for (int agent = 0; agent < k; ++agent) {
      next[static_cast<std::size_t>(agent)] = avg_agree_round(
          current[static_cast<std::size_t>(agent)],
          mailboxes.per_recipient[static_cast<std::size_t>(agent)], config);
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace byzpg
