#pragma once

// Exact finite-horizon enumeration for small instances of the walk, used as
// ground truth against the Monte Carlo implementation. Two independent
// routes compute each law: a dynamic program that merges paths sharing
// (freshness, position, visited set), and a brute-force sweep over all (2d)^n
// paths with no merging. Arithmetic is exact rational by default (the bias p
// is converted exactly from its double representation) with a
// double-precision fallback mode.
//
// The budget guard keeps enumeration inside d = 2 and n <= 12 (n <= 14 for
// tan points of the plain 2-D walk) and refuses anything larger.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace erw::oracle {

using Rational = boost::multiprecision::cpp_rational;

enum class Statistic {
    x1,                  // e1 coordinate at time n
    j_count,             // distinct sites visited by time n
    d_exceeds,           // first return time of e1 to 0 (bucketed, may exceed n)
    t0,                  // first time e1 > 0 (bucketed, may exceed n)
    kappa_confirmed_by,  // first ladder time with no e1 return by n (lag 0)
    tan_count,           // tan points of the plain 2-D walk through index n
};

const char* statistic_name(Statistic s);
std::optional<Statistic> parse_statistic(const std::string& name);

// Bucket key for "the defining event did not happen within the horizon".
inline constexpr std::int64_t kBeyondHorizon = std::numeric_limits<std::int64_t>::max();

struct Distribution {
    Statistic statistic = Statistic::x1;
    int n = 0;
    double p = 0.0;
    int d = 0;
    bool exact = true;
    std::map<std::int64_t, Rational> pmf;

    Rational total_mass() const;
    double prob(std::int64_t value) const;
    double prob_beyond() const { return prob(kBeyondHorizon); }
    // Mean over the finite keys; meaningful only when no mass sits beyond
    // the horizon (x1, j_count, tan_count).
    double expectation() const;
};

// Instance too large for the enumeration budget; the message carries the
// size estimate that triggered the refusal.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Distribution exact_distribution(double p, int d, int n, Statistic s,
                                bool use_rational = true);
Distribution exact_distribution_brute(double p, int d, int n, Statistic s);
Distribution exact_tan_distribution(int n);

struct McOracleLine {
    std::string name;
    double mc_value = 0.0;
    double exact_value = 0.0;
    double se = 0.0;
    double z = 0.0;
};

struct McOracleReport {
    bool refused = false;
    std::string refusal_reason;
    double p = 0.0;
    int d = 0;
    int n = 0;
    std::int64_t runs = 0;
    std::vector<McOracleLine> lines;

    double max_abs_z() const;
    bool ok(double z_max = 4.0) const { return !refused && max_abs_z() <= z_max; }
    std::string format() const;
};

// Runs the real sampler for `runs` walks of n steps and scores its moments
// against the exact enumeration. Zero runs or an over-budget instance yield
// a refused report instead of numbers.
McOracleReport mc_vs_oracle(double p, int d, int n, std::int64_t runs,
                            std::uint64_t master_seed, std::uint64_t stream_base = 0);

}  // namespace erw::oracle
