#pragma once

#include <boost/random/normal_distribution.hpp>
#include <cstdint>
#include <limits>
#include <string>

namespace maxbv {

/// (master_seed, stream_index) names an independent random stream.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    /// Child stream for the i-th Monte Carlo sample of this stream.
    SeedSpec substream(std::uint64_t i) const;
    std::string str() const;

    bool operator==(const SeedSpec&) const = default;
};

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ seeded by hashing the SeedSpec, so any stream can be
/// constructed directly without generating its predecessors.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(SeedSpec seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Standard normal (Boost ziggurat).
    double normal() { return normal_(*this); }
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    boost::random::normal_distribution<double> normal_;
};

/// Identifies the generator + normal algorithm; part of every config fingerprint.
inline constexpr const char* kRngFingerprint = "xoshiro256pp+splitmix64/boost-ziggurat-normal";

}  // namespace maxbv
