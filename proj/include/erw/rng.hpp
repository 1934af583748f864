#pragma once

// Counter-based pseudo-randomness: Philox 4x64 with 10 rounds, bit-compatible
// with numpy.random.Philox. A (master_seed, stream_index) pair keys one
// stream; the 256-bit block counter addresses positions within it, so any
// number of streams can be consumed independently and reproducibly.

#include <array>
#include <cstdint>

namespace erw {

using PhiloxBlock = std::array<std::uint64_t, 4>;

namespace detail {

inline constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
inline constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
inline constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(prod >> 64);
    lo = static_cast<std::uint64_t>(prod);
}

}  // namespace detail

// One keyed bijection of a 256-bit counter block.
inline PhiloxBlock philox4x64(PhiloxBlock ctr, std::uint64_t key0, std::uint64_t key1) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key0 += detail::kPhiloxW0;
            key1 += detail::kPhiloxW1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        detail::mulhilo(detail::kPhiloxM0, ctr[0], hi0, lo0);
        detail::mulhilo(detail::kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key0, lo1, hi0 ^ ctr[3] ^ key1, lo0};
    }
    return ctr;
}

// A buffered view of one Philox stream. Equal constructor arguments always
// reproduce the identical draw sequence.
class RandomSource {
public:
    using result_type = std::uint64_t;

    RandomSource(std::uint64_t master_seed, std::uint64_t stream_index)
        : key0_(master_seed), key1_(stream_index) {}

    std::uint64_t next_u64() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on {0, ..., n-1}. Multiplicative range reduction; for the tiny
    // n used here (n <= 2*kMaxDim) the bias is below 2^-59.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    std::uint64_t master_seed() const { return key0_; }
    std::uint64_t stream_index() const { return key1_; }

    // UniformRandomBitGenerator interface.
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }
    result_type operator()() { return next_u64(); }

private:
    // The counter advances before each block, so block k of a stream is the
    // bijection image of counter k+1; this is numpy's emission order.
    void refill() {
        for (int i = 0; i < 4; ++i) {
            if (++ctr_[i] != 0) break;
        }
        buf_ = philox4x64(ctr_, key0_, key1_);
        pos_ = 0;
    }

    std::uint64_t key0_;
    std::uint64_t key1_;
    PhiloxBlock ctr_{0, 0, 0, 0};
    PhiloxBlock buf_{};
    int pos_ = 4;
};

}  // namespace erw
