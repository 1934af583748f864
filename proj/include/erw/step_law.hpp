#pragma once

// The two one-step laws of the excited random walk on Z^d. At a site being
// visited for the first time the walk uses mu, which tilts the e1 axis:
//   mu(+e1) = p/d,  mu(-e1) = (1-p)/d,  mu(+-ej) = 1/(2d) for j >= 2.
// At an already-visited site it uses nu, uniform over the 2d unit steps.
// Steps are indexed in the fixed order (+e1, -e1, +e2, -e2, ...); sampling
// is by inverse CDF in that order, with intervals closed on the right and
// the first interval closed on both ends.

#include <array>
#include <span>

#include "erw/lattice.hpp"

namespace erw {

struct StepLaw {
    double p = 0.0;
    int d = 0;
    std::array<double, 2 * kMaxDim> mu{};
    std::array<double, 2 * kMaxDim> nu{};
    std::array<double, 2 * kMaxDim> mu_cdf{};
    std::array<double, 2 * kMaxDim> nu_cdf{};

    int n_steps() const { return 2 * d; }
    std::span<const double> mu_probs() const { return {mu.data(), static_cast<std::size_t>(2 * d)}; }
    std::span<const double> nu_probs() const { return {nu.data(), static_cast<std::size_t>(2 * d)}; }
};

// Validates 1/2 < p <= 1 and 2 <= d <= kMaxDim, throwing std::invalid_argument
// with a "model domain violation" message otherwise. allow_boundary_p admits
// p == 1/2 exactly (the unbiased edge case, useful for symmetry checks).
StepLaw make_step_law(double p, int d, bool allow_boundary_p = false);

// Index of the step whose cumulative-probability interval contains u.
inline int sample_step_index(std::span<const double> probs, double u) {
    double cum = 0.0;
    int i = 0;
    const int last = static_cast<int>(probs.size()) - 1;
    while (i < last) {
        cum += probs[i];
        if (u <= cum) break;
        ++i;
    }
    return i;
}

// Same sampling against a precomputed cumulative table (the hot path).
inline int sample_step_index_cdf(const double* cdf, int n, double u) {
    int i = 0;
    while (i + 1 < n && u > cdf[i]) ++i;
    return i;
}

inline LatticeVector sample_step(std::span<const double> probs, double u, int d) {
    return LatticeVector::unit_step(sample_step_index(probs, u), d);
}

}  // namespace erw
