#pragma once

// Joint construction of an excited walk Y and a simple random walk Z on Z^d
// from one shared draw stream. Each transition consumes an axis alpha,
// uniform on {1..d}, and a uniform u on [0,1). Z always moves by
// sign(u <= 1/2) along e_alpha. Y copies Z's move except when Y sits on a
// fresh site and alpha = 1; then Y moves by sign(u <= p) along e1. Under
// this construction Y and Z agree on every coordinate but e1, and Y's e1
// lead over Z never decreases, growing by 0 or 2 per step.
//
// W is the two-dimensional walk read off (Z.e1, Z.e2) at the times when
// alpha is in {1, 2}. An index of W is a tan point when its e1 value
// strictly exceeds the e1 value of every earlier W-index on the same e2
// level; each W tan point certifies that Y stands on a fresh site.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "erw/lattice.hpp"
#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace erw {

// Running tan-point census of a 2-D walk observed index by index.
class TanTracker {
public:
    // True iff (w1, w2) sets a strict e1 record on its e2 level; an unseen
    // level counts as a record. Updates the level maximum and the count.
    bool observe(std::int64_t w1, std::int64_t w2) {
        auto [it, inserted] = level_max_.try_emplace(w2, w1);
        if (!inserted) {
            if (w1 <= it->second) return false;
            it->second = w1;
        }
        ++count_;
        return true;
    }

    std::int64_t count() const { return count_; }

private:
    std::unordered_map<std::int64_t, std::int64_t> level_max_;
    std::int64_t count_ = 0;
};

class CoupledWalk {
public:
    CoupledWalk(const StepLaw& law, WalkOptions y_opts = {})
        : y_(law, y_opts), z_(LatticeVector::zero(law.d)) {
        last_was_tan_ = tan_.observe(0, 0);  // W_0 = (0, 0)
    }

    // One transition from explicit shared draws; alpha is 1-based.
    void step_with(int alpha, double u) {
        const int sign = (u <= 0.5) ? +1 : -1;
        z_.c[alpha - 1] += sign;
        if (alpha == 1 && y_.current_site_fresh()) {
            y_.apply_move(u <= y_.law().p ? 0 : 1);
        } else {
            y_.apply_move(2 * (alpha - 1) + (sign > 0 ? 0 : 1));
        }
        if (alpha <= 2) {
            ++h_count_;
            last_was_h_ = true;
            last_was_tan_ = tan_.observe(z_.c[0], z_.c[1]);
        } else {
            last_was_h_ = false;
            last_was_tan_ = false;
        }
    }

    // One transition drawing the shared (alpha, u) pair from rng:
    // first one index draw for the axis, then one uniform draw.
    void step(RandomSource& rng) {
        const int alpha = 1 + static_cast<int>(rng.next_below(y_.law().d));
        step_with(alpha, rng.next_uniform());
    }

    const ExcitedWalk& y() const { return y_; }
    const LatticeVector& z() const { return z_; }
    std::int64_t w1() const { return z_.c[0]; }
    std::int64_t w2() const { return z_.c[1]; }
    std::int64_t h_count() const { return h_count_; }         // W indices emitted after W_0
    std::int64_t gap() const { return y_.position().c[0] - z_.c[0]; }
    std::int64_t tan_count() const { return tan_.count(); }   // N over W_0..W_{h_count}
    bool last_was_h() const { return last_was_h_; }
    bool last_was_tan() const { return last_was_tan_; }

private:
    ExcitedWalk y_;
    LatticeVector z_;
    TanTracker tan_;
    std::int64_t h_count_ = 0;
    bool last_was_h_ = false;
    bool last_was_tan_ = true;
};

// Per-step property violations observed while running a coupled pair.
// All counts stay zero when the implementation is correct.
struct CouplingViolations {
    std::int64_t transverse_mismatch = 0;  // Y.ej != Z.ej for some j >= 2
    std::int64_t gap_decreased = 0;        // e1 lead shrank
    std::int64_t gap_bad_increment = 0;    // lead increment outside {0, 2}
    std::int64_t gap_odd = 0;              // lead not even
    std::int64_t z_rule_mismatch = 0;      // Z's move disagrees with its rule
    std::int64_t tan_not_fresh = 0;        // W tan point with Y on a revisited site

    std::int64_t total() const {
        return transverse_mismatch + gap_decreased + gap_bad_increment +
               gap_odd + z_rule_mismatch + tan_not_fresh;
    }
    std::string describe() const;
};

struct CoupledRunResult {
    std::int64_t steps = 0;
    std::int64_t y_x1 = 0;
    std::int64_t gap = 0;
    std::int64_t h_count = 0;
    std::int64_t tan_count = 0;
    std::int64_t j_count = 0;
    CouplingViolations violations;
    std::vector<std::int64_t> tan_counts;  // N_i per W index, when recorded
};

// Runs a coupled pair for n_steps transitions, re-checking every coupling
// property against an independent reconstruction at each step.
CoupledRunResult run_coupled(const StepLaw& law, std::int64_t n_steps,
                             RandomSource& rng, bool record_tan_sequence = false);

}  // namespace erw
