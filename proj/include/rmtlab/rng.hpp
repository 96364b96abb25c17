#pragma once

#include <cstdint>
#include <random>

namespace rmtlab {

using Seed = std::uint64_t;

// Every stochastic routine takes one of these by reference. Parallel loops
// construct one engine per work item from (master seed, item id), so results
// never depend on the number of workers or the order they run in.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Seed of substream `stream_id` under `master`. For a fixed master the map
/// id -> seed is injective, so distinct ids never share a seed.
Seed derive_substream(Seed master, std::uint64_t stream_id) noexcept;

/// Two-level derivation for (group, item) pairs such as (N, sample index).
Seed derive_substream(Seed master, std::uint64_t group, std::uint64_t item) noexcept;

inline Engine make_engine(Seed master, std::uint64_t stream_id) {
  return Engine(derive_substream(master, stream_id));
}

inline Engine make_engine(Seed master, std::uint64_t group, std::uint64_t item) {
  return Engine(derive_substream(master, group, item));
}

}  // namespace rmtlab
