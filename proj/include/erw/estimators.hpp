#pragma once

// Estimators for the speed v and diffusivity sigma of the walk's e1
// coordinate, from either independent runs (direct) or pooled
// inter-regeneration blocks (ratio estimators), with standard errors.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "erw/regeneration.hpp"

namespace erw {

enum class EstimateMethod { direct, regeneration };

inline const char* method_name(EstimateMethod m) {
    return m == EstimateMethod::direct ? "direct" : "regeneration";
}

struct EstimateSummary {
    double v_hat = 0.0;
    double v_se = 0.0;
    double sigma_hat = 0.0;
    double sigma_se = 0.0;
    double sigma2_hat = 0.0;
    double sigma2_se = 0.0;
    EstimateMethod method = EstimateMethod::direct;
    std::int64_t n_runs = 0;
    std::int64_t n_steps = 0;
    std::int64_t n_blocks = 0;
    bool has_v = false;
    bool has_sigma = false;
};

// Mean of x1/n over runs; SE from the sample standard deviation.
EstimateSummary estimate_v_direct(std::span<const std::int64_t> final_x1,
                                  std::int64_t n_steps);

// Sample standard deviation of x1/sqrt(n) over runs; SE from the
// normal-theory asymptotic s/sqrt(2(R-1)).
EstimateSummary estimate_sigma_direct(std::span<const std::int64_t> final_x1,
                                      std::int64_t n_steps);

// Both of the above merged into one summary.
EstimateSummary estimate_direct(std::span<const std::int64_t> final_x1,
                                std::int64_t n_steps);

enum class RegenSeMethod { delta, batch_means };

// Ratio estimators over pooled blocks, first blocks excluded:
//   v      = sum(dx1) / sum(dk)
//   sigma2 = mean((dx1 - v dk)^2) / mean(dk)
// SEs via the multivariate delta method over the five block moments, or via
// batch means over n_batches contiguous batches. Throws std::invalid_argument
// when fewer than two usable blocks exist.
EstimateSummary estimate_v_sigma_regen(std::span<const RegenBlock> blocks,
                                       RegenSeMethod se_method = RegenSeMethod::delta,
                                       int n_batches = 32);

struct TailCurve {
    std::vector<std::int64_t> thresholds;
    std::vector<double> survival;  // P(sample >= threshold), same indexing
};

// Empirical survival curve of integer samples at the given thresholds.
TailCurve tail_curve(std::span<const std::int64_t> samples,
                     std::span<const std::int64_t> thresholds);

// Survival curve when only finitely-resolved samples are listed out of
// total_runs trials: P(threshold <= sample < infinity).
TailCurve tail_curve_censored(std::span<const std::int64_t> finite_samples,
                              std::int64_t total_runs,
                              std::span<const std::int64_t> thresholds);

}  // namespace erw
