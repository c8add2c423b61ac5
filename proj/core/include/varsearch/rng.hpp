#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace varsearch {

/// Seed identifier of one derived random stream.
struct StreamSeed {
  std::uint64_t value = 0;
  friend auto operator<=>(const StreamSeed&, const StreamSeed&) = default;
};

/// Independent stream families. Streams of different kinds never share a
/// seed source, so e.g. reward noise never perturbs residual sampling.
enum class StreamKind : std::uint32_t {
  kGeneration = 0,
  kRewardNoise = 1,
  kSelection = 2,
  kClustering = 3,
  kReplicate = 4,
  kBootstrap = 5,
  kTarget = 6,
};

/// Derives the seed for (kind, id, scale) under a master seed.
///
/// For a fixed (master, kind) the map (id, scale) -> seed is injective over
/// the full 32-bit range of both arguments: the key is packed into 64 bits,
/// multiplied by an odd constant, offset, and passed through the splitmix64
/// finalizer, each of which is a bijection on 64-bit words.
StreamSeed derive_stream(std::uint64_t master, StreamKind kind, std::uint32_t id,
                         std::uint32_t scale);

/// Residual-sampling stream for one candidate slot at one scale.
inline StreamSeed derive_rng(std::uint64_t master, std::uint32_t candidate, std::uint32_t scale) {
  return derive_stream(master, StreamKind::kGeneration, candidate, scale);
}

/// Portable pseudo-random source: mt19937_64 plus distribution code owned
/// here, so sequences do not depend on the standard library's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(StreamSeed seed) : engine_(seed.value) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n);

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace varsearch
