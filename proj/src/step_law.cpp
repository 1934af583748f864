#include "erw/step_law.hpp"

#include <stdexcept>
#include <string>

namespace erw {

namespace {

void fill_cdf(const std::array<double, 2 * kMaxDim>& probs,
              std::array<double, 2 * kMaxDim>& cdf, int n) {
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
        cum += probs[i];
        cdf[i] = cum;
    }
    cdf[n - 1] = 1.0;  // close the last interval exactly
}

}  // namespace

StepLaw make_step_law(double p, int d, bool allow_boundary_p) {
    if (d < 2 || d > kMaxDim) {
        throw std::invalid_argument(
            "model domain violation: dimension must satisfy 2 <= d <= " +
            std::to_string(kMaxDim) + ", got d = " + std::to_string(d));
    }
    const bool p_ok = allow_boundary_p ? (p >= 0.5 && p <= 1.0) : (p > 0.5 && p <= 1.0);
    if (!p_ok) {
        throw std::invalid_argument(
            "model domain violation: bias must satisfy 1/2 < p <= 1 (p = 1/2 "
            "only with the boundary override), got p = " + std::to_string(p));
    }

    StepLaw law;
    law.p = p;
    law.d = d;
    const int n = 2 * d;
    const double uniform = 1.0 / n;
    for (int i = 0; i < n; ++i) law.nu[i] = uniform;
    law.mu = law.nu;
    law.mu[0] = p / d;
    law.mu[1] = (1.0 - p) / d;
    fill_cdf(law.mu, law.mu_cdf, n);
    fill_cdf(law.nu, law.nu_cdf, n);
    return law;
}

}  // namespace erw
