#pragma once

// Seed lineage: every random draw comes from a stream derived from one 64-bit
// master seed and a short path of counters (stage, operation, attempt, ...).
// Derivation is SplitMix64 folding, so a stream can be replayed in isolation.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>

namespace ucontract {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Operation tags used as the second component of a stream path.
enum class StreamOp : std::uint64_t {
  haar = 1,
  ladder = 2,
  measure = 3,
  unitary = 4,
  instance = 5,
  conjugator = 6,
};

inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = splitmix64(master);
  for (auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

inline std::string lineage_string(std::uint64_t master,
                                  std::initializer_list<std::uint64_t> path) {
  std::string out = std::to_string(master);
  for (auto p : path) out += "/" + std::to_string(p);
  return out;
}

}  // namespace ucontract
