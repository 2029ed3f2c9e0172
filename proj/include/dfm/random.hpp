#pragma once

#include <cstdint>
#include <random>

namespace dfm {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Identifies a reproducible random sequence. Equal (seed, stream) pairs
/// always yield identical engines.
struct RandomStream {
  std::uint64_t seed = 42;
  std::uint64_t stream = 0;

  using Engine = std::mt19937_64;

  Engine engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return Engine(seq);
  }

  /// Child stream keyed by `key`; distinct keys give unrelated streams.
  RandomStream substream(std::uint64_t key) const {
    return {seed, detail::splitmix64(stream ^ detail::splitmix64(key + 1))};
  }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;
};

}  // namespace dfm
