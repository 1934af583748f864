#pragma once

// Experiment drivers and output writers. A batch of runs is reproducible
// from (seed, run count) alone: run i consumes the stream (seed, i), and
// summaries, row files, and block files come out byte-identical for any
// thread count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erw/estimators.hpp"
#include "erw/regeneration.hpp"
#include "erw/step_law.hpp"

namespace erw {

enum class OutputFormat { csv, jsonl };

struct ExperimentConfig {
    double p = 0.75;
    int d = 2;
    std::int64_t steps = 10000;
    std::int64_t runs = 1000;
    std::uint64_t seed = 1;
    std::int64_t confirm_lag = 1000;
    int threads = 1;              // <= 0 picks the hardware concurrency
    bool allow_boundary_p = false;
    bool collect_blocks = true;
};

struct RunRow {
    std::int64_t run_id = 0;
    std::int64_t x1_final = 0;
    std::int64_t j_count = 0;
    std::int64_t r_max = 0;
    std::int64_t n_confirmed = 0;
    std::optional<std::int64_t> kappa1;  // empty when the first candidate is unconfirmed
    bool censored = false;               // record had an unconfirmed pending candidate
};

struct SimulationResult {
    ExperimentConfig config;
    std::vector<RunRow> rows;
    std::vector<RegenBlock> blocks;      // pooled, grouped by run, run order
    std::vector<std::int64_t> block_run; // owning run_id per block
    std::vector<std::int64_t> final_x1;
    std::int64_t censored_runs = 0;
    EstimateSummary direct;
    std::optional<EstimateSummary> regen;
    std::string regen_unavailable_reason;

    double censored_fraction() const {
        return rows.empty() ? 0.0
                            : static_cast<double>(censored_runs) /
                                  static_cast<double>(rows.size());
    }
};

SimulationResult run_simulation(const ExperimentConfig& cfg);

// Lean variant keeping only the final e1 per run (sweeps, large direct
// batches).
std::vector<std::int64_t> run_final_x1(const ExperimentConfig& cfg);

struct CoupleRunRow {
    std::int64_t run_id = 0;
    std::int64_t y_x1 = 0;
    std::int64_t gap = 0;
    std::int64_t h_count = 0;
    std::int64_t tan_count = 0;
    std::int64_t j_count = 0;
    std::int64_t violations = 0;
};

struct CoupleResult {
    ExperimentConfig config;
    std::vector<CoupleRunRow> rows;
    std::int64_t total_violations = 0;
};

CoupleResult run_couple(const ExperimentConfig& cfg);

struct SweepResult {
    std::vector<double> grid;
    std::vector<EstimateSummary> summaries;  // one per grid point
};

// Runs one batch per grid value of p, all other settings from cfg. The
// regeneration method falls back to direct for a grid point whose batch
// yields too few usable blocks.
SweepResult run_sweep(const ExperimentConfig& cfg, std::span<const double> p_grid,
                      EstimateMethod method);

// First-regeneration-time sampler with early stopping: a run ends as soon as
// its earliest pending candidate has survived confirm_lag further steps, or
// at max_steps without one (counted as unresolved).
struct KappaTailResult {
    std::vector<std::int64_t> kappa1;  // resolved runs only, run order
    std::int64_t unresolved = 0;
    std::int64_t total_runs = 0;
};

KappaTailResult sample_kappa1(const ExperimentConfig& cfg, std::int64_t max_steps);

// Writers. CSV files carry a header line; jsonl files carry one object per
// line with the same fields.
void write_run_rows(std::ostream& os, const SimulationResult& result, OutputFormat f);
void write_blocks(std::ostream& os, const SimulationResult& result, OutputFormat f);
void write_couple_rows(std::ostream& os, const CoupleResult& result, OutputFormat f);
void write_sweep(std::ostream& os, const SweepResult& result, OutputFormat f);

// One summary object per line: {p, d, n_steps, n_runs, method, v_hat, v_se,
// sigma_hat, sigma_se, n_blocks, censored_fraction}.
std::string summary_json_line(const SimulationResult& result, EstimateMethod method);

// Writes through a temp file in the same directory, renamed into place on
// success, so readers never observe a half-written file.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace erw
