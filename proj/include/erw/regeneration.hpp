#pragma once

// Renewal structure of the e1 coordinate of a transient walk. Within a shift
// of the path starting at time b on level L, the ladder recursion alternates
//   S: the first time the path exceeds its running maximum so far,
//   D: the first later time the path returns to the level it held at S,
// producing failed-ascent pairs (S, D) until an S with no return remains; on
// an infinite path that S is a regeneration time and the recursion restarts
// there. On a finite horizon "no return yet" is only trusted once the path
// has survived confirm_lag further steps (the censoring policy): confirmed
// survivors become the kappa times, the first unconfirmed one marks the
// record as censored, and exploration beyond it is discarded.
//
// RegenTracker consumes the path one value at a time in O(1) amortized per
// step and O(pending candidates) memory; find_regenerations re-derives the
// same record from a complete stored path by the literal recursion. Both
// must agree exactly (this is tested).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace erw {

// One ladder pair: the ascent at time s failed at time d, or is still
// unreturned at the horizon when d is empty.
struct SdPair {
    std::int64_t s = 0;
    std::optional<std::int64_t> d;
    bool operator==(const SdPair&) const = default;
};

struct RegenRecord {
    std::vector<SdPair> sd_pairs;              // recursion order
    std::vector<std::int64_t> kappa_times;     // confirmed regeneration times, increasing
    std::vector<std::int64_t> kappa_levels;    // e1 value at each confirmed time
    bool censored_tail = false;                // an unconfirmed candidate was pending
    std::int64_t horizon = -1;
    bool operator==(const RegenRecord&) const = default;
};

// Inter-regeneration increments. The first block covers [0, kappa_1] and is
// distributed differently from the rest, so it carries a flag and estimators
// drop it.
struct RegenBlock {
    std::int64_t dk = 0;    // time increment
    std::int64_t dx1 = 0;   // e1 increment
    bool is_first = false;
};

std::vector<RegenBlock> extract_blocks(const RegenRecord& record);

// Literal recursion over a complete e1 path. Requires path[0] == 0 and
// consecutive increments in {-1, 0, +1}; the horizon is path.size() - 1.
RegenRecord find_regenerations(std::span<const std::int64_t> e1_path,
                               std::int64_t confirm_lag);

// Streaming detector. Feed the e1 coordinate at every time, starting with
// the 0 at time 0; query a censored record at any point.
class RegenTracker {
public:
    void observe(std::int64_t x1);
    RegenRecord record(std::int64_t confirm_lag) const;

    std::int64_t time() const { return t_; }
    std::int64_t running_max() const { return global_max_; }
    std::size_t pending_count() const { return stack_.empty() ? 0 : stack_.size() - 1; }

    // Time of the earliest pending candidate, for early-stopping protocols:
    // once now - first_candidate_time() reaches the lag, that candidate is
    // the confirmed kappa_1.
    std::optional<std::int64_t> first_candidate_time() const {
        if (stack_.size() < 2) return std::nullopt;
        return stack_[1].base_time;
    }

    void reset() {
        stack_.clear();
        t_ = -1;
        global_max_ = 0;
        last_x1_ = 0;
    }

private:
    // One shift of the recursion: it started at base_time on base_level and
    // has collected the finite ladder pairs in pairs. stack_[0] is the root
    // shift; every deeper entry is the pending candidate of the one below.
    struct Context {
        std::int64_t base_time;
        std::int64_t base_level;
        std::vector<SdPair> pairs;
    };

    std::vector<Context> stack_;
    std::int64_t t_ = -1;
    std::int64_t global_max_ = 0;
    std::int64_t last_x1_ = 0;
};

}  // namespace erw
