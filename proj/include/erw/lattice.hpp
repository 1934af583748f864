#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace erw {

// Highest lattice dimension the library supports. Walks are nearest-neighbor,
// so int64 coordinates cannot overflow at any horizon this tool can run.
inline constexpr int kMaxDim = 8;

// A point (or displacement) on Z^d, 2 <= d <= kMaxDim. Coordinates beyond
// dim stay zero, so comparison and hashing never need the dimension.
struct LatticeVector {
    std::array<std::int64_t, kMaxDim> c{};
    std::int32_t dim = 2;

    static LatticeVector zero(int d) {
        LatticeVector v;
        v.dim = static_cast<std::int32_t>(d);
        return v;
    }

    // Unit steps in the fixed order (+e1, -e1, +e2, -e2, ...): index k moves
    // along axis k/2, sign +1 for even k.
    static LatticeVector unit_step(int step_index, int d) {
        LatticeVector v = zero(d);
        v.c[step_index >> 1] = (step_index & 1) ? -1 : +1;
        return v;
    }

    std::int64_t e1() const { return c[0]; }
    std::int64_t operator[](int i) const { return c[i]; }

    LatticeVector& operator+=(const LatticeVector& o) {
        for (int i = 0; i < kMaxDim; ++i) c[i] += o.c[i];
        return *this;
    }
    LatticeVector& operator-=(const LatticeVector& o) {
        for (int i = 0; i < kMaxDim; ++i) c[i] -= o.c[i];
        return *this;
    }
    friend LatticeVector operator+(LatticeVector a, const LatticeVector& b) { return a += b; }
    friend LatticeVector operator-(LatticeVector a, const LatticeVector& b) { return a -= b; }
    friend bool operator==(const LatticeVector& a, const LatticeVector& b) {
        return a.c == b.c;
    }

    std::string to_string() const {
        std::string s = "(";
        for (int i = 0; i < dim; ++i) {
            if (i) s += ",";
            s += std::to_string(c[i]);
        }
        return s + ")";
    }
};

// splitmix64 finalizer; the basis of all coordinate hashing here.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_coords(const std::int64_t* c, int d) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (int i = 0; i < d; ++i) h = mix64(h ^ static_cast<std::uint64_t>(c[i]));
    return h;
}

struct LatticeVectorHash {
    std::size_t operator()(const LatticeVector& v) const {
        return static_cast<std::size_t>(hash_coords(v.c.data(), v.dim));
    }
};

}  // namespace erw
