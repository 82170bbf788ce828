#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace balancelab {

// PCG32 (XSH RR 64/32 output function, setseq stream selection). This
// generator is the fixed randomness source of the whole library: a given
// (seed, stream) pair reproduces the identical 32-bit sequence on every
// platform and build, which is what makes traces and ensembles replayable.
class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream) {
    state_ = 0;
    inc_ = (stream << 1u) | 1u;
    next();
    state_ += seed;
    next();
  }

  std::uint32_t next() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next64() {
    std::uint64_t hi = next();
    return (hi << 32) | next();
  }

  // Unbiased draw from [0, bound) via rejection.
  std::uint32_t bounded(std::uint32_t bound) {
    std::uint32_t threshold = (0u - bound) % bound;
    for (;;) {
      std::uint32_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

// Identity of one reproducible random sequence.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  Pcg32 engine() const { return Pcg32(seed, stream); }
};

// Stream-id layout used by runs and ensembles: replication r owns a block of
// kStreamChannels consecutive stream ids, one per purpose, so instrumentation
// (token shuffling) never perturbs the pair sequence.
inline constexpr std::uint64_t kStreamChannels = 4;
inline constexpr std::uint64_t kGenerateChannel = 0;  // initial-vector generation
inline constexpr std::uint64_t kPairChannel = 1;      // pair selection
inline constexpr std::uint64_t kShuffleChannel = 2;   // token-band shuffling

inline constexpr std::uint64_t stream_for(std::uint64_t replication, std::uint64_t channel) {
  return replication * kStreamChannels + channel;
}

// Fisher-Yates over a span, drawing from the given engine.
template <typename T>
void shuffle_span(std::span<T> items, Pcg32& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = rng.bounded(static_cast<std::uint32_t>(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace balancelab
