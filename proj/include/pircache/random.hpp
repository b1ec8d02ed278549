#pragma once

#include <cstdint>
#include <random>

namespace pircache {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to turn (master ^ stream) into well-spread seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `stream` under `master`: mix(master ^ stream).
/// Trial t of an experiment uses derive_seed(master, t), so results do not
/// depend on the order in which trials are executed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix_seed(master ^ stream);
}

}  // namespace pircache
