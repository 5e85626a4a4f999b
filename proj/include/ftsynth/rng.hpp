#pragma once

#include <cstdint>

namespace ftsynth {

/// Pinned 64-bit PRNG (splitmix64). The benchmark harness promises
/// byte-identical output for a given seed across runs and thread counts,
/// so the generator algorithm is fixed here rather than delegated to the
/// standard library (std::uniform_real_distribution is
/// implementation-defined).
///
/// Streams are splittable: `for_stream(seed, index)` yields an independent
/// generator per index, so per-target work can run concurrently while
/// drawing the exact same values as a serial run.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Independent stream for (seed, index); draw order within a stream is fixed.
    static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(mix(seed + 0x9E3779B97F4A7C15ull) ^
                          mix(index * 0xD2B74407B1CE6E93ull + 1));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform in [0,1) with 53 random mantissa bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

} // namespace ftsynth
