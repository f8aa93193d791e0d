#include "byzpg/rng.hpp"

#include <stdexcept>

namespace byzpg {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t root_seed, std::uint32_t agent_id,
                          std::string_view purpose, std::uint32_t round) {
  std::uint64_t h = mix64(root_seed);
  h = mix64(h ^ (0xa5a5a5a500000000ull | agent_id));
  h = mix64(h ^ fnv1a(purpose));
  h = mix64(h ^ (0x5a5a5a5a00000000ull | round));
  return h;
}

RngStream agent_stream(std::uint64_t root_seed, std::uint32_t agent_id,
                       std::string_view purpose, std::uint32_t round) {
  return RngStream(derive_seed(root_seed, agent_id, purpose, round));
}

CommonCoin::CommonCoin(std::uint64_t root_seed)
    : stream_(derive_seed(root_seed, kCommonAgent, "common_coin", 0)) {}

int CommonCoin::bernoulli(double p) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("common coin: p must be in (0, 1]");
  return stream_.bernoulli(p) ? 1 : 0;
}

int CommonCoin::uniform_round(int t_max) {
  if (t_max < 1) throw std::invalid_argument("common coin: T must be >= 1");
  return stream_.uniform_int(t_max);
}

}  // namespace byzpg
