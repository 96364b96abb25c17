#include "rmtlab/rng.hpp"

namespace rmtlab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Seed derive_substream(Seed master, std::uint64_t stream_id) noexcept {
  // kGolden is odd, so master + kGolden * (id + 1) is injective in id and
  // mix64 keeps it that way.
  return mix64(mix64(master) + kGolden * (stream_id + 1));
}

Seed derive_substream(Seed master, std::uint64_t group, std::uint64_t item) noexcept {
  return derive_substream(derive_substream(master, group), item);
}

}  // namespace rmtlab
