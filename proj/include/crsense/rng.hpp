#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace crsense {

/// SplitMix64 finalizer; used to derive independent seed substreams.
std::uint64_t splitmix64(std::uint64_t x);

/// Derive a substream seed from (master, stream tag, index).
/// All randomness in the project flows from one master seed through
/// this function, so runs are reproducible bit-for-bit.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

// Stream tags used across the project.
namespace seed_stream {
inline constexpr std::uint64_t fading_sample = 1;   // value-iteration fading draws, per channel
inline constexpr std::uint64_t constraint_est = 2;  // dual training Monte-Carlo, per round
inline constexpr std::uint64_t replication = 3;     // per-replication substream inside a run
inline constexpr std::uint64_t simulate = 4;        // top-level simulate/compare runs
inline constexpr std::uint64_t oracle = 9;          // test-only oracles
} // namespace seed_stream

/// Thin wrapper over mt19937_64 with hand-rolled mappings so draws are
/// identical across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Exponential with the given mean (Rayleigh-amplitude power gain).
    double exponential(double mean) {
        return -mean * std::log1p(-uniform());
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Normalized discount weights w_n = (1-g) g^n / (1 - g^N), n = 0..slots-1.
/// They sum to 1 exactly in exact arithmetic, which keeps truncated
/// long-term averages unbiased for stationary processes.
std::vector<double> discount_weights(double discount, int slots);

} // namespace crsense
