#ifndef STOSUB_RNG_HPP
#define STOSUB_RNG_HPP

#include <cstdint>
#include <random>

namespace stosub {

/// SplitMix64 mixing step; bijective on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for the substream `index` of master seed `seed`. Distinct indices
/// map to distinct seeds. Replicated experiments key their streams as
/// (seed, replicate-index), so results do not depend on scheduling order.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) + index);
}

class DiscreteDistribution;

/// Deterministic random stream. All sampling is done through explicit
/// 53-bit uniforms so results are reproducible bit-for-bit across
/// platforms for a fixed seed (no implementation-defined distributions).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    static RandomStream substream(std::uint64_t seed, std::uint64_t index) {
        return RandomStream(derive_stream_seed(seed, index));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound).
    int uniform_int(int bound) {
        return static_cast<int>(uniform01() * static_cast<double>(bound));
    }

    /// Support index drawn by inverse-CDF walk; defined in types.cpp.
    int sample(const DiscreteDistribution& dist);

private:
    std::mt19937_64 engine_;
};

} // namespace stosub

#endif
