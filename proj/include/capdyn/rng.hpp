#pragma once

#include <cmath>
#include <cstdint>

namespace capdyn {

/// Deterministic 64-bit stream generator (SplitMix64).
///
/// The state advances by the golden-ratio increment 0x9E3779B97F4A7C15 and
/// each output is scrambled with the standard SplitMix64 finalizer
/// (xor-shift-multiply constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB).
/// Every simulation in the toolkit draws from one of these streams, so a run
/// is fully determined by its 64-bit seed.  Gaussian variates use the
/// Box-Muller cosine branch and always consume exactly two uniforms; nothing
/// is cached, which keeps the draw count per agent-step fixed and makes runs
/// reproducible across configurations that share a seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes two uniforms.
    double next_gaussian() noexcept {
        const double u1 = next_unit();
        const double u2 = next_unit();
        // 1 - u1 lies in (0, 1], so the log is finite.
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * M_PI * u2);
    }

    bool bernoulli(double p) noexcept { return next_unit() < p; }

private:
    std::uint64_t state_;
};

/// Derive an independent stream seed from a base seed and a stream index
/// (replicate number, grid task id, ...) by avalanching base ^ index.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) noexcept {
    std::uint64_t z = base ^ index;
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace capdyn
