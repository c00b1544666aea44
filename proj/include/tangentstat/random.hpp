#ifndef TANGENTSTAT_RANDOM_HPP
#define TANGENTSTAT_RANDOM_HPP

#include <cstdint>
#include <random>

namespace tangentstat {

using Engine = std::mt19937_64;

/// Generator for stream `stream` of a run seeded with `seed`.
/// Streams are statistically independent and fully determined by (seed, stream).
inline Engine stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x74616e67u};
  return Engine(seq);
}

/// Split `total` draws over `streams` streams; earlier streams take the remainder.
inline std::uint64_t stream_share(std::uint64_t total, std::uint64_t streams, std::uint64_t index) {
  return total / streams + (index < total % streams ? 1 : 0);
}

inline constexpr std::uint64_t kDefaultStreams = 8;

}  // namespace tangentstat

#endif  // TANGENTSTAT_RANDOM_HPP
