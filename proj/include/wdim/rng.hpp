#pragma once

#include <cstdint>

namespace wdim {

/// 64-bit finalizer with full avalanche (SplitMix64 style).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Counter-based substream generator: every draw is a pure function of
/// (seed, stream, index). Monte Carlo loops key one substream per sample
/// index, so estimates are bit-identical under any worker count.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
        state_ = absorb(absorb(absorb(0x9e3779b97f4a7c15ull, seed), stream), index);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    /// uniform in [0, 1) with 53 random bits
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// uniform in {0, ..., n-1}; bias is 2^-64, fine for digit draws
    int next_below(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                                 static_cast<unsigned>(n)) >> 64);
    }

    double next_sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

private:
    static std::uint64_t absorb(std::uint64_t h, std::uint64_t v) {
        return mix64((h ^ v) * 0xff51afd7ed558ccdull + 0x2545f4914f6cdd1dull);
    }

    std::uint64_t state_;
};

}  // namespace wdim
