#pragma once

#include <array>
#include <cstdint>

namespace fts {

/// Identifies one reproducible random stream. The (seed, stream) pair fully
/// determines every draw made by a consumer; substreams for replicates,
/// populations or innovations are derived with child() so that parallel work
/// never shares generator state.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Derives a decorrelated substream. Children of distinct salts, and
    /// children of distinct parents, behave as independent streams.
    [[nodiscard]] RngSeed child(std::uint64_t salt) const noexcept;

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// xoshiro256++ generator seeded from an RngSeed via SplitMix64 expansion.
/// All outputs are pure integer/bit arithmetic, so sequences are identical
/// across platforms and thread counts. Gaussian draws use the Marsaglia polar
/// method (uniforms are platform-stable; libm log/sqrt are stable per build).
class Rng {
public:
    explicit Rng(RngSeed s) noexcept;
    Rng(std::uint64_t seed, std::uint64_t stream) noexcept : Rng(RngSeed{seed, stream}) {}

    std::uint64_t next_u64() noexcept;

    /// Uniform integer in [0, n). Unbiased: rejects the truncated top of the
    /// 64-bit range instead of taking a plain modulus.
    std::uint64_t uniform_below(std::uint64_t n) noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept;

    /// Standard normal deviate.
    double normal() noexcept;

private:
    std::array<std::uint64_t, 4> state_{};
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace fts
