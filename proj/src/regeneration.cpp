#include "erw/regeneration.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace erw {

std::vector<RegenBlock> extract_blocks(const RegenRecord& record) {
    std::vector<RegenBlock> blocks;
    blocks.reserve(record.kappa_times.size());
    std::int64_t prev_t = 0;
    std::int64_t prev_x = 0;
    for (std::size_t i = 0; i < record.kappa_times.size(); ++i) {
        blocks.push_back({record.kappa_times[i] - prev_t,
                          record.kappa_levels[i] - prev_x, i == 0});
        prev_t = record.kappa_times[i];
        prev_x = record.kappa_levels[i];
    }
    return blocks;
}

namespace {

void check_path(std::span<const std::int64_t> path) {
    if (path.empty() || path[0] != 0)
        throw std::invalid_argument("find_regenerations: path must start with 0");
    for (std::size_t t = 1; t < path.size(); ++t) {
        if (std::llabs(path[t] - path[t - 1]) > 1)
            throw std::invalid_argument(
                "find_regenerations: increment out of {-1,0,1} at time " +
                std::to_string(t));
    }
}

}  // namespace

RegenRecord find_regenerations(std::span<const std::int64_t> e1_path,
                               std::int64_t confirm_lag) {
    check_path(e1_path);
    if (confirm_lag < 0)
        throw std::invalid_argument("find_regenerations: confirm_lag must be >= 0");

    const std::int64_t horizon = static_cast<std::int64_t>(e1_path.size()) - 1;
    RegenRecord rec;
    rec.horizon = horizon;

    // next_same[t]: the next time after t on the same level, or -1.
    std::vector<std::int64_t> next_same(e1_path.size());
    {
        std::unordered_map<std::int64_t, std::int64_t> last_seen;
        for (std::int64_t t = horizon; t >= 0; --t) {
            auto [it, inserted] = last_seen.try_emplace(e1_path[t], -1);
            next_same[t] = inserted ? -1 : it->second;
            it->second = t;
        }
    }

    std::int64_t base = 0;
    while (true) {
        // One shift of the recursion, rooted at time base.
        std::int64_t level_max = e1_path[base];
        std::int64_t cursor = base + 1;
        std::optional<std::int64_t> candidate;
        while (true) {
            while (cursor <= horizon && e1_path[cursor] <= level_max) ++cursor;
            if (cursor > horizon) break;  // no further ascent by the horizon
            const std::int64_t s = cursor;
            const std::int64_t d = next_same[s];
            if (d < 0) {
                rec.sd_pairs.push_back({s, std::nullopt});
                candidate = s;
                break;
            }
            rec.sd_pairs.push_back({s, d});
            for (std::int64_t t = s; t <= d; ++t) level_max = std::max(level_max, e1_path[t]);
            cursor = d + 1;
        }
        if (!candidate) break;  // recursion exhausted, nothing pending
        if (horizon - *candidate < confirm_lag) {
            rec.censored_tail = true;
            break;
        }
        rec.kappa_times.push_back(*candidate);
        rec.kappa_levels.push_back(e1_path[*candidate]);
        base = *candidate;
    }
    return rec;
}

void RegenTracker::observe(std::int64_t x1) {
    if (t_ < 0) {
        if (x1 != 0)
            throw std::invalid_argument("RegenTracker: first observation must be 0");
        stack_.push_back({0, 0, {}});
        t_ = 0;
        last_x1_ = 0;
        return;
    }
    if (std::llabs(x1 - last_x1_) > 1)
        throw std::invalid_argument("RegenTracker: increment out of {-1,0,1} at time " +
                                    std::to_string(t_ + 1));
    ++t_;
    last_x1_ = x1;

    if (x1 > global_max_) {
        // A strict record: exactly the times a new candidate ascent starts.
        global_max_ = x1;
        stack_.push_back({t_, x1, {}});
        return;
    }
    if (stack_.size() > 1 && x1 >= stack_[1].base_level) {
        // A return to some pending candidate's level fails that ascent and
        // voids every deeper shift. Candidate levels increase with depth,
        // so binary search locates the only possible match.
        auto it = std::lower_bound(stack_.begin() + 1, stack_.end(), x1,
                                   [](const Context& c, std::int64_t v) {
                                       return c.base_level < v;
                                   });
        if (it != stack_.end() && it->base_level == x1) {
            const std::int64_t failed_s = it->base_time;
            stack_.erase(it, stack_.end());
            stack_.back().pairs.push_back({failed_s, t_});
        }
    }
}

RegenRecord RegenTracker::record(std::int64_t confirm_lag) const {
    if (confirm_lag < 0)
        throw std::invalid_argument("RegenTracker: confirm_lag must be >= 0");
    RegenRecord rec;
    rec.horizon = t_;
    for (std::size_t i = 0; i < stack_.size(); ++i) {
        if (i > 0) {
            // stack_[i].base_time is the candidate pending in shift i-1.
            rec.sd_pairs.push_back({stack_[i].base_time, std::nullopt});
            if (t_ - stack_[i].base_time < confirm_lag) {
                rec.censored_tail = true;
                break;  // unconfirmed: deeper exploration is not recorded
            }
            rec.kappa_times.push_back(stack_[i].base_time);
            rec.kappa_levels.push_back(stack_[i].base_level);
        }
        rec.sd_pairs.insert(rec.sd_pairs.end(), stack_[i].pairs.begin(),
                            stack_[i].pairs.end());
    }
    return rec;
}

}  // namespace erw
