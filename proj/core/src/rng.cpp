#include "varsearch/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace varsearch {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

StreamSeed derive_stream(std::uint64_t master, StreamKind kind, std::uint32_t id,
                         std::uint32_t scale) {
  const std::uint64_t base =
      splitmix64(splitmix64(master) ^ (static_cast<std::uint64_t>(kind) * 0xd1b54a32d192ed03ULL));
  const std::uint64_t key = (static_cast<std::uint64_t>(id) << 32) | scale;
  return StreamSeed{splitmix64(base + key * 0x9e3779b97f4a7c15ULL)};
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::uniform_index: empty range");
  }
  const auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return idx < n ? idx : n - 1;
}

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace varsearch
