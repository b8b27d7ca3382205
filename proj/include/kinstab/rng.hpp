#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace kinstab {

/// SplitMix64 finalizer. Used only to derive engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace detail {

/// Seed sequence that fills the engine state with consecutive SplitMix64 outputs.
struct SplitMixSeq {
    using result_type = std::uint32_t;
    std::uint64_t state;

    template <class It>
    void generate(It first, It last)
    {
        for (; first != last; ++first) {
            state += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = state;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            *first = static_cast<std::uint32_t>(z ^ (z >> 31));
        }
    }
};

} // namespace detail

/// Reserved stream indices. Monte Carlo path p always uses stream (seed, p);
/// auxiliary draws live at the top of the index space so they never collide.
inline constexpr std::uint64_t kBootstrapStream = 0xffff'ffff'ffff'ff00ULL;
inline constexpr std::uint64_t kDriftPhaseStream = 0xffff'ffff'ffff'ff01ULL;

/**
 * Deterministic random stream identified by (master_seed, stream_index).
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. Its 624-word seed sequence is filled by SplitMix64 iterated from
 * mix64(master_seed) ^ mix64(stream_index ^ 0x6a09e667f3bcc909). The
 * derivation is part of the reproducibility contract and must not change.
 *
 * Uniform, normal and exponential transforms are implemented here rather
 * than through <random> distributions, which are implementation-defined.
 */
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : seed_(master_seed), index_(stream_index), engine_(make_engine(master_seed, stream_index))
    {
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t index() const noexcept { return index_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0,1), 53-bit resolution.
    double uniform_open()
    {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    double exponential() { return -std::log(uniform_open()); }

    /// Standard normal by the Marsaglia polar method; the spare value is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double a, b, s;
        do {
            a = 2.0 * uniform_open() - 1.0;
            b = 2.0 * uniform_open() - 1.0;
            s = a * a + b * b;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = b * f;
        has_spare_ = true;
        return a * f;
    }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        for (;;) {
            const std::uint64_t r = engine_();
            if (r < limit) return r % bound;
        }
    }

private:
    static std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index)
    {
        detail::SplitMixSeq seq{mix64(seed) ^ mix64(index ^ 0x6a09e667f3bcc909ULL)};
        return std::mt19937_64(seq);
    }

    std::uint64_t seed_;
    std::uint64_t index_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace kinstab
