#pragma once

#include <cstdint>
#include <random>

namespace tucb {

/// Independent named substream of a master seed. Tags keep the engine's
/// tie-breaking, arm sampling, noise and context draws decoupled so paired
/// runs stay aligned.
inline std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

namespace stream_tag {
inline constexpr std::uint32_t kTie = 1;
inline constexpr std::uint32_t kArm = 2;
inline constexpr std::uint32_t kNoise = 3;
inline constexpr std::uint32_t kContext = 4;
}  // namespace stream_tag

}  // namespace tucb
