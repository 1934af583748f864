#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "erw/coupling.hpp"
#include "erw/oracle.hpp"
#include "erw/rng.hpp"

using namespace erw;

TEST_CASE("tan tracker: strict records per level, unseen levels count") {
    TanTracker t;
    CHECK(t.observe(0, 0));   // first point
    CHECK(t.observe(1, 0));   // new max on level 0
    CHECK(!t.observe(0, 0));  // not a record
    CHECK(!t.observe(1, 0));  // ties are not strict records
    CHECK(t.observe(0, -1));  // unseen level
    CHECK(t.observe(2, 0));
    CHECK(t.count() == 4);
}

TEST_CASE("scripted coupled transitions follow the shared-draw rules") {
    const StepLaw law = make_step_law(0.75, 2);
    CoupledWalk cw(law);
    CHECK(cw.tan_count() == 1);  // W_0 = (0,0)
    CHECK(cw.gap() == 0);

    // alpha=1, u=0.3: both walks step +e1.
    cw.step_with(1, 0.3);
    CHECK(cw.z().c[0] == 1);
    CHECK(cw.y().position().e1() == 1);
    CHECK(cw.gap() == 0);
    CHECK(cw.last_was_h());
    CHECK(cw.last_was_tan());  // W_1 = (1,0), new record on level 0

    // alpha=1, u=0.6: Z steps -e1; Y sits on a fresh site, u <= p, so +e1.
    cw.step_with(1, 0.6);
    CHECK(cw.z().c[0] == 0);
    CHECK(cw.y().position().e1() == 2);
    CHECK(cw.gap() == 2);
    CHECK(!cw.last_was_tan());  // W_2 = (0,0) is no record on level 0

    // alpha=2, u=0.9: both step -e2; transverse coordinates stay equal.
    cw.step_with(2, 0.9);
    CHECK(cw.z().c[1] == -1);
    CHECK(cw.y().position().c[1] == -1);
    CHECK(cw.gap() == 2);
    CHECK(cw.last_was_tan());  // W_3 = (0,-1), unseen level

    // alpha=1 on a revisited Y site: Y copies Z even on the e1 axis.
    // Y stands at (2,-1) now, which is fresh, so step elsewhere first.
    cw.step_with(2, 0.2);  // both +e2 back to level 0
    CHECK(cw.gap() == 2);
    CHECK(cw.h_count() == 4);
}

TEST_CASE("coupled runs hold every invariant at small scale") {
    for (int d : {2, 3}) {
        for (double p : {0.6, 1.0}) {
            const StepLaw law = make_step_law(p, d);
            for (std::uint64_t r = 0; r < 100; ++r) {
                RandomSource rng(4242, r);
                const CoupledRunResult res = run_coupled(law, 2000, rng);
                CHECK(res.violations.total() == 0);
                CHECK(res.gap >= 0);
                CHECK(res.gap % 2 == 0);
                CHECK(res.tan_count <= res.h_count + 1);
                if (d == 2) CHECK(res.h_count == 2000);
            }
        }
    }
}

TEST_CASE("tan statistics do not depend on the excitement parameter") {
    // The secondary walk and its tan census are functions of the shared
    // draws alone, so any p must reproduce the exact tan-count law.
    const auto exact = oracle::exact_tan_distribution(6);
    const StepLaw law = make_step_law(0.82, 2);
    const std::int64_t runs = 20000;
    std::map<std::int64_t, std::int64_t> counts;
    double sum = 0;
    for (std::int64_t r = 0; r < runs; ++r) {
        RandomSource rng(98765, static_cast<std::uint64_t>(r));
        const CoupledRunResult res = run_coupled(law, 6, rng, true);
        REQUIRE(res.tan_counts.size() == 7);  // N_0 .. N_6
        const std::int64_t n6 = res.tan_counts[6];
        ++counts[n6];
        sum += static_cast<double>(n6);
    }
    for (const auto& [value, prob] : exact.pmf) {
        const double p0 = static_cast<double>(prob);
        const double phat =
            static_cast<double>(counts.count(value) ? counts.at(value) : 0) / runs;
        const double se = std::sqrt(p0 * (1 - p0) / runs);
        CHECK(std::abs(phat - p0) < 4.5 * se);
    }
    CHECK(std::abs(sum / runs - exact.expectation()) < 0.05);
}

TEST_CASE("tan counts are nondecreasing along a run") {
    const StepLaw law = make_step_law(0.75, 2);
    RandomSource rng(13, 0);
    const CoupledRunResult res = run_coupled(law, 500, rng, true);
    REQUIRE(res.tan_counts.size() == 501);
    CHECK(res.tan_counts[0] == 1);
    for (std::size_t i = 1; i < res.tan_counts.size(); ++i) {
        CHECK(res.tan_counts[i] >= res.tan_counts[i - 1]);
        CHECK(res.tan_counts[i] <= res.tan_counts[i - 1] + 1);
    }
}

TEST_CASE("violation counters describe themselves") {
    CouplingViolations v;
    CHECK(v.total() == 0);
    v.gap_decreased = 2;
    v.tan_not_fresh = 1;
    CHECK(v.total() == 3);
    const std::string s = v.describe();
    CHECK(s.find("gap") != std::string::npos);
}
