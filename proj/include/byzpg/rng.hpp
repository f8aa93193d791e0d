#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace byzpg {

/// Agent id used for streams shared by the whole federation (common coin,
/// bucketing permutations, initialization).
inline constexpr std::uint32_t kCommonAgent = 0xffffffffu;

std::uint64_t mix64(std::uint64_t x);

/// Domain-separated stream seed: distinct (agent, purpose, round) tuples map
/// to distinct seeds with overwhelming probability.
std::uint64_t derive_seed(std::uint64_t root_seed, std::uint32_t agent_id,
                          std::string_view purpose, std::uint32_t round);

/// Deterministic random stream. Distribution objects are constructed per call
/// so draws depend only on the generator state, never on caller history.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  /// Uniform integer in [0, n).
  int uniform_int(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(gen_);
  }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(gen_); }
  std::uint64_t raw() { return gen_(); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    std::shuffle(v.begin(), v.end(), gen_);
  }

 private:
  std::mt19937_64 gen_;
};

/// Convenience: stream for (agent, purpose, round) under a run's root seed.
RngStream agent_stream(std::uint64_t root_seed, std::uint32_t agent_id,
                       std::string_view purpose, std::uint32_t round);

/// Shared pseudorandom source seeded from the common initialization. Every
/// honest agent holds an identical copy and draws the identical sequence.
class CommonCoin {
 public:
  explicit CommonCoin(std::uint64_t root_seed);

  /// Common-Sample(Be(p)); requires 0 < p <= 1.
  int bernoulli(double p);
  /// Common-Sample(U([T])) mapped to [0, T); requires T >= 1.
  int uniform_round(int t_max);

 private:
  RngStream stream_;
};

}  // namespace byzpg
