#include "erw/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace erw {

namespace {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;  // Bessel-corrected
};

MeanVar mean_var(std::span<const double> xs) {
    const std::size_t n = xs.size();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        ss += d * d;
    }
    return {mean, n > 1 ? ss / static_cast<double>(n - 1) : 0.0};
}

void require_runs(std::size_t n, std::size_t least, const char* what) {
    if (n < least)
        throw std::invalid_argument(std::string(what) + ": needs at least " +
                                    std::to_string(least) + " runs, got " +
                                    std::to_string(n));
}

}  // namespace

EstimateSummary estimate_v_direct(std::span<const std::int64_t> final_x1,
                                  std::int64_t n_steps) {
    require_runs(final_x1.size(), 1, "estimate_v_direct");
    if (n_steps < 1) throw std::invalid_argument("estimate_v_direct: n_steps must be >= 1");
    std::vector<double> xs(final_x1.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = static_cast<double>(final_x1[i]) / static_cast<double>(n_steps);
    const MeanVar mv = mean_var(xs);
    EstimateSummary out;
    out.method = EstimateMethod::direct;
    out.n_runs = static_cast<std::int64_t>(final_x1.size());
    out.n_steps = n_steps;
    out.v_hat = mv.mean;
    out.v_se = std::sqrt(mv.var / static_cast<double>(xs.size()));
    out.has_v = true;
    return out;
}

EstimateSummary estimate_sigma_direct(std::span<const std::int64_t> final_x1,
                                      std::int64_t n_steps) {
    require_runs(final_x1.size(), 2, "estimate_sigma_direct");
    if (n_steps < 1) throw std::invalid_argument("estimate_sigma_direct: n_steps must be >= 1");
    const double root_n = std::sqrt(static_cast<double>(n_steps));
    std::vector<double> xs(final_x1.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = static_cast<double>(final_x1[i]) / root_n;
    const MeanVar mv = mean_var(xs);
    const double r = static_cast<double>(xs.size());
    EstimateSummary out;
    out.method = EstimateMethod::direct;
    out.n_runs = static_cast<std::int64_t>(final_x1.size());
    out.n_steps = n_steps;
    out.sigma2_hat = mv.var;
    out.sigma2_se = mv.var * std::sqrt(2.0 / (r - 1.0));
    out.sigma_hat = std::sqrt(mv.var);
    out.sigma_se = out.sigma_hat / std::sqrt(2.0 * (r - 1.0));
    out.has_sigma = true;
    return out;
}

EstimateSummary estimate_direct(std::span<const std::int64_t> final_x1,
                                std::int64_t n_steps) {
    EstimateSummary out = estimate_v_direct(final_x1, n_steps);
    const EstimateSummary s = estimate_sigma_direct(final_x1, n_steps);
    out.sigma_hat = s.sigma_hat;
    out.sigma_se = s.sigma_se;
    out.sigma2_hat = s.sigma2_hat;
    out.sigma2_se = s.sigma2_se;
    out.has_sigma = true;
    return out;
}

EstimateSummary estimate_v_sigma_regen(std::span<const RegenBlock> blocks,
                                       RegenSeMethod se_method, int n_batches) {
    std::vector<const RegenBlock*> use;
    use.reserve(blocks.size());
    for (const RegenBlock& b : blocks)
        if (!b.is_first) use.push_back(&b);
    if (use.size() < 2)
        throw std::invalid_argument(
            "estimate_v_sigma_regen: needs at least 2 non-first blocks, got " +
            std::to_string(use.size()));

    const double r = static_cast<double>(use.size());
    double sum_x = 0.0, sum_k = 0.0;
    for (const RegenBlock* b : use) {
        sum_x += static_cast<double>(b->dx1);
        sum_k += static_cast<double>(b->dk);
    }
    const double mx = sum_x / r;
    const double mk = sum_k / r;
    const double v = sum_x / sum_k;

    double sum_r2 = 0.0;  // squared residuals dx1 - v dk
    for (const RegenBlock* b : use) {
        const double res = static_cast<double>(b->dx1) - v * static_cast<double>(b->dk);
        sum_r2 += res * res;
    }
    const double sigma2 = sum_r2 / r / mk;

    EstimateSummary out;
    out.method = EstimateMethod::regeneration;
    out.n_blocks = static_cast<std::int64_t>(use.size());
    out.n_runs = 0;
    out.v_hat = v;
    out.sigma2_hat = sigma2;
    out.sigma_hat = std::sqrt(std::max(0.0, sigma2));
    out.has_v = true;
    out.has_sigma = true;

    // v ratio SE: sd of the zero-mean residuals scaled by the mean block length.
    out.v_se = std::sqrt(sum_r2 / (r - 1.0)) / (mk * std::sqrt(r));

    if (se_method == RegenSeMethod::delta) {
        // sigma2 = g(m) with m = (mx, mk, mxx, mxk, mkk) the block moments:
        // v = mx/mk, sigma2 = (mxx - 2 v mxk + v^2 mkk) / mk.
        double mxx = 0.0, mxk = 0.0, mkk = 0.0;
        for (const RegenBlock* b : use) {
            const double x = static_cast<double>(b->dx1);
            const double k = static_cast<double>(b->dk);
            mxx += x * x;
            mxk += x * k;
            mkk += k * k;
        }
        mxx /= r;
        mxk /= r;
        mkk /= r;
        const double num = mxx - 2.0 * v * mxk + v * v * mkk;
        const double dnum_dv = -2.0 * mxk + 2.0 * v * mkk;
        std::array<double, 5> grad = {
            (dnum_dv / mk) * (1.0 / mk),            // d/dmx via v
            -num / (mk * mk) + (dnum_dv / mk) * (-v / mk),  // d/dmk direct + via v
            1.0 / mk,                               // d/dmxx
            -2.0 * v / mk,                          // d/dmxk
            v * v / mk,                             // d/dmkk
        };
        // Plug-in covariance of the per-block vector (x, k, x^2, xk, k^2).
        std::array<double, 5> means = {mx, mk, mxx, mxk, mkk};
        std::array<std::array<double, 5>, 5> cov{};
        for (const RegenBlock* b : use) {
            const double x = static_cast<double>(b->dx1);
            const double k = static_cast<double>(b->dk);
            const std::array<double, 5> f = {x, k, x * x, x * k, k * k};
            for (int a = 0; a < 5; ++a)
                for (int c = a; c < 5; ++c)
                    cov[a][c] += (f[a] - means[a]) * (f[c] - means[c]);
        }
        double quad = 0.0;
        for (int a = 0; a < 5; ++a)
            for (int c = 0; c < 5; ++c) {
                const double cac = (c >= a ? cov[a][c] : cov[c][a]) / (r - 1.0);
                quad += grad[a] * cac * grad[c];
            }
        out.sigma2_se = std::sqrt(std::max(0.0, quad) / r);
    } else {
        const int nb = std::min<int>(n_batches, static_cast<int>(use.size() / 2));
        if (nb < 2)
            throw std::invalid_argument("estimate_v_sigma_regen: too few blocks for batch means");
        std::vector<double> batch_sigma2(nb);
        const std::size_t per = use.size() / nb;
        for (int b = 0; b < nb; ++b) {
            const std::size_t lo = b * per;
            const std::size_t hi = (b == nb - 1) ? use.size() : lo + per;
            double bx = 0.0, bk = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                bx += static_cast<double>(use[i]->dx1);
                bk += static_cast<double>(use[i]->dk);
            }
            const double bv = bx / bk;
            double bnum = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                const double res =
                    static_cast<double>(use[i]->dx1) - bv * static_cast<double>(use[i]->dk);
                bnum += res * res;
            }
            batch_sigma2[b] = bnum / static_cast<double>(hi - lo) /
                              (bk / static_cast<double>(hi - lo));
        }
        const MeanVar bv = mean_var(batch_sigma2);
        out.sigma2_se = std::sqrt(bv.var / static_cast<double>(nb));
    }
    out.sigma_se = out.sigma_hat > 0.0 ? out.sigma2_se / (2.0 * out.sigma_hat) : 0.0;
    return out;
}

TailCurve tail_curve(std::span<const std::int64_t> samples,
                     std::span<const std::int64_t> thresholds) {
    return tail_curve_censored(samples, static_cast<std::int64_t>(samples.size()),
                               thresholds);
}

TailCurve tail_curve_censored(std::span<const std::int64_t> finite_samples,
                              std::int64_t total_runs,
                              std::span<const std::int64_t> thresholds) {
    if (total_runs < 1)
        throw std::invalid_argument("tail_curve: needs at least one run");
    if (static_cast<std::int64_t>(finite_samples.size()) > total_runs)
        throw std::invalid_argument("tail_curve: more samples than runs");
    std::vector<std::int64_t> sorted(finite_samples.begin(), finite_samples.end());
    std::sort(sorted.begin(), sorted.end());
    TailCurve out;
    out.thresholds.assign(thresholds.begin(), thresholds.end());
    out.survival.resize(thresholds.size());
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const auto lo = std::lower_bound(sorted.begin(), sorted.end(), thresholds[i]);
        out.survival[i] = static_cast<double>(sorted.end() - lo) /
                          static_cast<double>(total_runs);
    }
    return out;
}

}  // namespace erw
