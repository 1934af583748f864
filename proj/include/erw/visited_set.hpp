#pragma once

// Flat open-addressing hash set of lattice sites, the walk's visited-site
// record. Keys are raw d-tuples of int64 coordinates stored contiguously;
// probing is linear over a power-of-two table. clear() keeps the allocation,
// so one set can be recycled across runs.

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "erw/lattice.hpp"

namespace erw {

class VisitedSet {
public:
    explicit VisitedSet(int dim, std::size_t expected = 0) : dim_(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("VisitedSet: bad dimension");
        std::size_t cap = 64;
        while (cap * 5 < expected * 8) cap <<= 1;
        allocate(cap);
    }

    // Inserts the site; true iff it was not present before.
    bool insert(const LatticeVector& v) { return insert(v.c.data()); }

    bool insert(const std::int64_t* coords) {
        std::size_t slot = probe(coords);
        if (used_[slot]) return false;
        used_[slot] = 1;
        std::memcpy(&keys_[slot * dim_], coords, sizeof(std::int64_t) * dim_);
        ++size_;
        if (size_ >= grow_at_) grow();
        return true;
    }

    bool contains(const LatticeVector& v) const { return used_[probe(v.c.data())]; }

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return mask_ + 1; }

    void clear() {
        std::memset(used_.data(), 0, used_.size());
        size_ = 0;
    }

private:
    std::size_t probe(const std::int64_t* coords) const {
        std::size_t slot = hash_coords(coords, dim_) & mask_;
        while (used_[slot]) {
            if (std::memcmp(&keys_[slot * dim_], coords, sizeof(std::int64_t) * dim_) == 0)
                return slot;
            slot = (slot + 1) & mask_;
        }
        return slot;
    }

    void allocate(std::size_t cap) {
        keys_.assign(cap * dim_, 0);
        used_.assign(cap, 0);
        mask_ = cap - 1;
        size_ = 0;
        grow_at_ = cap - (cap >> 2) - (cap >> 3);  // load factor 5/8
    }

    void grow() {
        std::vector<std::int64_t> old_keys = std::move(keys_);
        std::vector<std::uint8_t> old_used = std::move(used_);
        const std::size_t old_cap = mask_ + 1;
        allocate(old_cap * 2);
        for (std::size_t s = 0; s < old_cap; ++s) {
            if (!old_used[s]) continue;
            const std::int64_t* coords = &old_keys[s * dim_];
            std::size_t slot = probe(coords);
            used_[slot] = 1;
            std::memcpy(&keys_[slot * dim_], coords, sizeof(std::int64_t) * dim_);
            ++size_;
        }
    }

    int dim_;
    std::vector<std::int64_t> keys_;
    std::vector<std::uint8_t> used_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
    std::size_t grow_at_ = 0;
};

}  // namespace erw
