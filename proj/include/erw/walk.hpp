#pragma once

// One excited-random-walk trajectory. The walk starts at the origin, which
// counts as visited, and on each transition draws from mu when the current
// site is fresh (first visit) and from nu otherwise. Tracked alongside the
// position: elapsed steps, the count of distinct visited sites, and the
// running maximum of the e1 coordinate.

#include <cstdint>
#include <vector>

#include "erw/lattice.hpp"
#include "erw/rng.hpp"
#include "erw/step_law.hpp"
#include "erw/visited_set.hpp"

namespace erw {

struct WalkOptions {
    bool record_e1 = false;         // keep the whole e1-coordinate history
    bool record_positions = false;  // keep the whole position history
    std::size_t expected_sites = 0; // pre-sizing hint for the visited set
};

class ExcitedWalk {
public:
    explicit ExcitedWalk(const StepLaw& law, WalkOptions opts = {})
        : law_(law), pos_(LatticeVector::zero(law.d)),
          visited_(law.d, opts.expected_sites), opts_(opts) {
        start();
    }

    // Rewinds to time 0 at the origin, keeping allocations.
    void reset() {
        pos_ = LatticeVector::zero(law_.d);
        visited_.clear();
        e1_history_.clear();
        position_history_.clear();
        start();
    }

    // One random transition: uses one uniform draw from rng.
    void step(RandomSource& rng) {
        const double* cdf = current_fresh_ ? law_.mu_cdf.data() : law_.nu_cdf.data();
        apply_move(sample_step_index_cdf(cdf, 2 * law_.d, rng.next_uniform()));
    }

    // Scripted transition by step index (tests and exact enumeration).
    void apply_move(int step_index) {
        pos_.c[step_index >> 1] += (step_index & 1) ? -1 : +1;
        current_fresh_ = visited_.insert(pos_);
        fresh_count_ += current_fresh_;
        if (pos_.c[0] > running_max_) running_max_ = pos_.c[0];
        ++time_;
        record();
    }

    const StepLaw& law() const { return law_; }
    const LatticeVector& position() const { return pos_; }
    std::int64_t time() const { return time_; }
    std::int64_t fresh_count() const { return fresh_count_; }     // J_n, distinct sites
    std::int64_t running_max() const { return running_max_; }     // r_n, max e1 so far
    bool current_site_fresh() const { return current_fresh_; }
    const VisitedSet& visited() const { return visited_; }

    const std::vector<std::int64_t>& e1_history() const { return e1_history_; }
    const std::vector<LatticeVector>& position_history() const { return position_history_; }

private:
    void start() {
        time_ = 0;
        fresh_count_ = 1;
        running_max_ = 0;
        current_fresh_ = true;
        visited_.insert(pos_);
        record();
    }

    void record() {
        if (opts_.record_e1) e1_history_.push_back(pos_.c[0]);
        if (opts_.record_positions) position_history_.push_back(pos_);
    }

    StepLaw law_;
    LatticeVector pos_;
    VisitedSet visited_;
    WalkOptions opts_;
    std::int64_t time_ = 0;
    std::int64_t fresh_count_ = 1;
    std::int64_t running_max_ = 0;
    bool current_fresh_ = true;
    std::vector<std::int64_t> e1_history_;
    std::vector<LatticeVector> position_history_;
};

inline ExcitedWalk run_walk(const StepLaw& law, std::int64_t n_steps,
                            RandomSource& rng, WalkOptions opts = {}) {
    ExcitedWalk walk(law, opts);
    for (std::int64_t i = 0; i < n_steps; ++i) walk.step(rng);
    return walk;
}

}  // namespace erw
