#include <doctest.h>

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "erw/lattice.hpp"
#include "erw/rng.hpp"
#include "erw/visited_set.hpp"

using namespace erw;

TEST_CASE("unit steps enumerate +/- each axis") {
    // Index 2k is +e_{k+1}, index 2k+1 is -e_{k+1}.
    for (int d = 2; d <= kMaxDim; ++d) {
        for (int axis = 0; axis < d; ++axis) {
            const LatticeVector plus = LatticeVector::unit_step(2 * axis, d);
            const LatticeVector minus = LatticeVector::unit_step(2 * axis + 1, d);
            for (int j = 0; j < d; ++j) {
                CHECK(plus.c[j] == (j == axis ? 1 : 0));
                CHECK(minus.c[j] == (j == axis ? -1 : 0));
            }
        }
    }
}

TEST_CASE("zero vector and equality") {
    const LatticeVector z = LatticeVector::zero(3);
    CHECK(z.dim == 3);
    for (int j = 0; j < 3; ++j) CHECK(z.c[j] == 0);
    LatticeVector a = z, b = z;
    a.c[1] = 4;
    CHECK(a != b);
    b.c[1] = 4;
    CHECK(a == b);
}

TEST_CASE("coordinate hashing spreads nearby sites") {
    std::unordered_set<std::size_t> hashes;
    LatticeVectorHash h;
    const int side = 21;  // all sites of a 21^3 box around the origin
    for (int x = -10; x <= 10; ++x)
        for (int y = -10; y <= 10; ++y)
            for (int z = -10; z <= 10; ++z) {
                LatticeVector v = LatticeVector::zero(3);
                v.c[0] = x;
                v.c[1] = y;
                v.c[2] = z;
                hashes.insert(h(v));
            }
    CHECK(hashes.size() == static_cast<std::size_t>(side) * side * side);
}

TEST_CASE("visited set matches a reference set on a random path") {
    const int d = 2;
    VisitedSet vs(d, 0);
    std::unordered_set<LatticeVector, LatticeVectorHash> ref;
    LatticeVector pos = LatticeVector::zero(d);
    RandomSource rng(77, 0);

    auto check_insert = [&](const LatticeVector& v) {
        const bool fresh_ref = ref.insert(v).second;
        const bool fresh = vs.insert(v);
        CHECK(fresh == fresh_ref);
        CHECK(vs.contains(v));
    };
    check_insert(pos);
    for (int t = 0; t < 50000; ++t) {
        pos.c[rng.next_below(d)] += (rng.next_u64() & 1) ? 1 : -1;
        check_insert(pos);
    }
    CHECK(vs.size() == ref.size());
}

TEST_CASE("visited set grows past its initial capacity") {
    VisitedSet vs(3, 0);
    const std::size_t cap0 = vs.capacity();
    for (int k = 0; k < 4000; ++k) {
        LatticeVector v = LatticeVector::zero(3);
        v.c[0] = k;
        v.c[1] = -k;
        CHECK(vs.insert(v));
    }
    CHECK(vs.size() == 4000);
    CHECK(vs.capacity() > cap0);
    // Everything inserted once is a revisit now.
    for (int k = 0; k < 4000; ++k) {
        LatticeVector v = LatticeVector::zero(3);
        v.c[0] = k;
        v.c[1] = -k;
        CHECK(!vs.insert(v));
    }
}

TEST_CASE("clear keeps the allocation and forgets the content") {
    VisitedSet vs(2, 1000);
    for (int k = 0; k < 500; ++k) {
        LatticeVector v = LatticeVector::zero(2);
        v.c[0] = k;
        vs.insert(v);
    }
    const std::size_t cap = vs.capacity();
    vs.clear();
    CHECK(vs.size() == 0);
    CHECK(vs.capacity() == cap);
    LatticeVector v = LatticeVector::zero(2);
    v.c[0] = 3;
    CHECK(vs.insert(v));  // fresh again after clear
}

TEST_CASE("presizing honors the expected count") {
    VisitedSet vs(2, 20000);
    const std::size_t cap = vs.capacity();
    for (int k = 0; k < 20000; ++k) {
        LatticeVector v = LatticeVector::zero(2);
        v.c[0] = k % 200;
        v.c[1] = k / 200;
        vs.insert(v);
    }
    CHECK(vs.capacity() == cap);  // no growth needed
}
