#include "erw/coupling.hpp"

namespace erw {

std::string CouplingViolations::describe() const {
    if (total() == 0) return "no violations";
    std::string s;
    auto add = [&s](const char* name, std::int64_t n) {
        if (n == 0) return;
        if (!s.empty()) s += ", ";
        s += name;
        s += "=";
        s += std::to_string(n);
    };
    add("transverse_mismatch", transverse_mismatch);
    add("gap_decreased", gap_decreased);
    add("gap_bad_increment", gap_bad_increment);
    add("gap_odd", gap_odd);
    add("z_rule_mismatch", z_rule_mismatch);
    add("tan_not_fresh", tan_not_fresh);
    return s;
}

CoupledRunResult run_coupled(const StepLaw& law, std::int64_t n_steps,
                             RandomSource& rng, bool record_tan_sequence) {
    CoupledWalk pair(law);
    CoupledRunResult out;
    const int d = law.d;

    LatticeVector z_expect = LatticeVector::zero(d);
    std::int64_t prev_gap = 0;

    if (record_tan_sequence) out.tan_counts.push_back(pair.tan_count());  // N_0

    for (std::int64_t s = 0; s < n_steps; ++s) {
        const int alpha = 1 + static_cast<int>(rng.next_below(d));
        const double u = rng.next_uniform();

        pair.step_with(alpha, u);

        z_expect.c[alpha - 1] += (u <= 0.5) ? +1 : -1;
        if (!(pair.z() == z_expect)) ++out.violations.z_rule_mismatch;

        for (int j = 1; j < d; ++j) {
            if (pair.y().position().c[j] != pair.z().c[j]) {
                ++out.violations.transverse_mismatch;
                break;
            }
        }

        const std::int64_t gap = pair.gap();
        const std::int64_t inc = gap - prev_gap;
        if (inc < 0) ++out.violations.gap_decreased;
        if (inc != 0 && inc != 2) ++out.violations.gap_bad_increment;
        if (gap % 2 != 0) ++out.violations.gap_odd;
        prev_gap = gap;

        if (pair.last_was_h()) {
            if (pair.last_was_tan() && !pair.y().current_site_fresh())
                ++out.violations.tan_not_fresh;
            if (record_tan_sequence) out.tan_counts.push_back(pair.tan_count());
        }
    }

    out.steps = n_steps;
    out.y_x1 = pair.y().position().c[0];
    out.gap = pair.gap();
    out.h_count = pair.h_count();
    out.tan_count = pair.tan_count();
    out.j_count = pair.y().fresh_count();
    return out;
}

}  // namespace erw
