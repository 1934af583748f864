#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "erw/coupling.hpp"
#include "erw/estimators.hpp"
#include "erw/harness.hpp"
#include "erw/oracle.hpp"
#include "erw/regeneration.hpp"
#include "erw/rng.hpp"
#include "erw/step_law.hpp"
#include "erw/walk.hpp"

namespace {

using namespace erw;

constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;

OutputFormat parse_format(const std::string& s) {
    return s == "jsonl" ? OutputFormat::jsonl : OutputFormat::csv;
}

// Empty path means stdout; files are written atomically.
void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
    } else {
        write_text_atomic(path, content);
    }
}

struct SimulateOpts {
    double p = 0.75;
    int d = 2;
    std::int64_t steps = 10000;
    std::int64_t runs = 1000;
    std::uint64_t seed = 1;
    std::int64_t confirm_lag = 1000;
    int threads = 1;
    bool allow_boundary_p = false;
    std::string format = "csv";
    std::string output;
    std::string blocks_output;
};

void add_simulate_options(CLI::App* cmd, SimulateOpts& o, bool with_blocks) {
    cmd->add_option("--p", o.p, "bias toward +e1 at fresh sites, 1/2 < p <= 1")
        ->required();
    cmd->add_option("--d", o.d, "lattice dimension, 2 <= d <= 8");
    cmd->add_option("--steps", o.steps, "steps per run");
    cmd->add_option("--runs", o.runs, "number of independent runs");
    cmd->add_option("--seed", o.seed, "master seed; run i uses stream (seed, i)");
    cmd->add_option("--confirm-lag", o.confirm_lag,
                    "steps without a return needed to confirm a regeneration");
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    cmd->add_flag("--allow-boundary-p", o.allow_boundary_p, "admit p = 1/2 exactly");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--output", o.output, "output file (default stdout)");
    if (with_blocks)
        cmd->add_option("--blocks", o.blocks_output,
                        "also write the per-run regeneration blocks to this file");
}

ExperimentConfig to_config(const SimulateOpts& o) {
    ExperimentConfig cfg;
    cfg.p = o.p;
    cfg.d = o.d;
    cfg.steps = o.steps;
    cfg.runs = o.runs;
    cfg.seed = o.seed;
    cfg.confirm_lag = o.confirm_lag;
    cfg.threads = o.threads;
    cfg.allow_boundary_p = o.allow_boundary_p;
    return cfg;
}

// Summary lines go to stdout when the table went to a file, to stderr
// otherwise, so stdout always carries exactly one machine-readable stream.
void emit_summaries(const SimulationResult& result, const std::string& table_path) {
    std::ostream& os = table_path.empty() ? std::cerr : std::cout;
    os << summary_json_line(result, EstimateMethod::direct) << '\n';
    os << summary_json_line(result, EstimateMethod::regeneration) << '\n';
}

int cmd_simulate(const SimulateOpts& o) {
    ExperimentConfig cfg = to_config(o);
    cfg.collect_blocks = true;
    const SimulationResult result = run_simulation(cfg);
    const OutputFormat fmt = parse_format(o.format);

    std::ostringstream rows;
    write_run_rows(rows, result, fmt);
    emit(o.output, rows.str());
    if (!o.blocks_output.empty()) {
        std::ostringstream blocks;
        write_blocks(blocks, result, fmt);
        write_text_atomic(o.blocks_output, blocks.str());
    }
    emit_summaries(result, o.output);
    return 0;
}

int cmd_regen(const SimulateOpts& o) {
    ExperimentConfig cfg = to_config(o);
    cfg.collect_blocks = true;
    const SimulationResult result = run_simulation(cfg);
    const OutputFormat fmt = parse_format(o.format);

    std::ostringstream blocks;
    write_blocks(blocks, result, fmt);
    emit(o.output, blocks.str());
    emit_summaries(result, o.output);
    return 0;
}

int cmd_couple(const SimulateOpts& o) {
    ExperimentConfig cfg = to_config(o);
    const CoupleResult result = run_couple(cfg);
    const OutputFormat fmt = parse_format(o.format);

    std::ostringstream rows;
    write_couple_rows(rows, result, fmt);
    emit(o.output, rows.str());
    if (result.total_violations > 0) {
        std::cerr << "coupling invariant violations detected: "
                  << result.total_violations << "\n";
        return kExitInvariant;
    }
    std::cerr << "coupling clean: " << cfg.runs << " runs, 0 violations\n";
    return 0;
}

struct SweepOpts {
    SimulateOpts sim;
    std::vector<double> p_grid;
    std::string method = "direct";
    std::string plot_script;
};

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plot a sweep CSV (p, v_hat, v_se, sigma_hat, sigma_se) with error bars."""
import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "sweep.csv"
rows = list(csv.DictReader(open(path)))
p = [float(r["p"]) for r in rows]
v = [float(r["v_hat"]) for r in rows]
v_se = [float(r["v_se"]) for r in rows]
s = [float(r["sigma_hat"]) for r in rows]
s_se = [float(r["sigma_se"]) for r in rows]

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.errorbar(p, v, yerr=[2 * e for e in v_se], fmt="o-", capsize=3)
ax1.set_xlabel("p")
ax1.set_ylabel("speed v")
ax2.errorbar(p, s, yerr=[2 * e for e in s_se], fmt="o-", capsize=3, color="tab:red")
ax2.set_xlabel("p")
ax2.set_ylabel("sigma")
fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
)PY";

int cmd_sweep(const SweepOpts& o) {
    ExperimentConfig cfg = to_config(o.sim);
    const EstimateMethod method = o.method == "regeneration"
                                      ? EstimateMethod::regeneration
                                      : EstimateMethod::direct;
    const SweepResult result = run_sweep(cfg, o.p_grid, method);
    std::ostringstream table;
    write_sweep(table, result, parse_format(o.sim.format));
    emit(o.sim.output, table.str());
    if (!o.plot_script.empty()) write_text_atomic(o.plot_script, kPlotScript);
    return 0;
}

struct OracleOpts {
    double p = 0.75;
    int d = 2;
    int n = 8;
    std::string stat = "x1";
    bool use_float = false;
    bool brute = false;
    std::string output;
};

int cmd_oracle(const OracleOpts& o) {
    const auto stat = oracle::parse_statistic(o.stat);
    if (!stat) {
        std::cerr << "error: unknown statistic '" << o.stat << "'\n";
        return kExitUsage;
    }
    oracle::Distribution dist;
    if (*stat == oracle::Statistic::tan_count) {
        dist = oracle::exact_tan_distribution(o.n);
    } else if (o.brute) {
        dist = oracle::exact_distribution_brute(o.p, o.d, o.n, *stat);
    } else {
        dist = oracle::exact_distribution(o.p, o.d, o.n, *stat, !o.use_float);
    }

    std::ostringstream os;
    os << "value,probability" << (dist.exact ? ",probability_exact" : "") << "\n";
    for (const auto& [k, w] : dist.pmf) {
        if (k == oracle::kBeyondHorizon) os << "beyond";
        else os << k;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", w.convert_to<double>());
        os << ',' << buf;
        if (dist.exact) os << ',' << w;
        os << '\n';
    }
    emit(o.output, os.str());

    std::cerr << "total_mass=" << dist.total_mass();
    if (*stat == oracle::Statistic::x1 || *stat == oracle::Statistic::j_count ||
        *stat == oracle::Statistic::tan_count) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", dist.expectation());
        std::cerr << " expectation=" << buf;
    }
    std::cerr << "\n";
    return 0;
}

struct SelftestOpts {
    std::int64_t runs = 20000;
    std::uint64_t seed = 7;
    bool corrupt_step_law = false;
};

struct CheckResult {
    std::string name;
    bool pass = true;
    bool skipped = false;
    std::string detail;
};

CheckResult check_step_law() {
    CheckResult c;
    c.name = "step_law";
    const StepLaw law = make_step_law(0.75, 3);
    double sum_mu = 0.0, sum_nu = 0.0;
    for (int i = 0; i < law.n_steps(); ++i) {
        sum_mu += law.mu[i];
        sum_nu += law.nu[i];
    }
    if (std::abs(sum_mu - 1.0) > 1e-12 || std::abs(sum_nu - 1.0) > 1e-12) {
        c.pass = false;
        c.detail = "step probabilities do not sum to 1";
        return c;
    }
    const double drift = law.mu[0] - law.mu[1];
    if (std::abs(drift - (2 * 0.75 - 1) / 3) > 1e-12) {
        c.pass = false;
        c.detail = "mu drift along e1 is off";
        return c;
    }
    for (int k = 0; k <= 20000; ++k) {
        const double u = static_cast<double>(k) / 20000.0;
        if (sample_step_index(law.mu_probs(), u) !=
                sample_step_index_cdf(law.mu_cdf.data(), law.n_steps(), u) ||
            sample_step_index(law.nu_probs(), u) !=
                sample_step_index_cdf(law.nu_cdf.data(), law.n_steps(), u)) {
            c.pass = false;
            c.detail = "scan and cdf sampling disagree at u = " + std::to_string(u);
            return c;
        }
    }
    for (auto [p, d, boundary] :
         {std::tuple{0.4, 2, false}, {0.5, 2, false}, {1.0001, 2, false},
          {0.75, 1, false}, {0.75, 9, false}}) {
        try {
            make_step_law(p, d, boundary);
            c.pass = false;
            c.detail = "domain violation not rejected";
            return c;
        } catch (const std::invalid_argument&) {
        }
    }
    make_step_law(0.5, 2, true);  // boundary override must admit this
    c.detail = "laws normalized, samplers agree, domain guarded";
    return c;
}

CheckResult check_coupling(std::uint64_t seed) {
    CheckResult c;
    c.name = "coupling_invariants";
    std::int64_t violations = 0;
    for (auto [p, d] : {std::pair{0.7, 2}, {1.0, 3}}) {
        const StepLaw law = make_step_law(p, d);
        for (int i = 0; i < 10; ++i) {
            RandomSource rng(seed, 1000 + i);
            violations += run_coupled(law, 2000, rng).violations.total();
        }
    }
    c.pass = violations == 0;
    c.detail = "20 runs x 2000 steps, " + std::to_string(violations) + " violations";
    return c;
}

CheckResult check_regen(std::uint64_t seed) {
    CheckResult c;
    c.name = "regen_online_vs_offline";
    const StepLaw law = make_step_law(0.7, 2);
    WalkOptions opts;
    opts.record_e1 = true;
    ExcitedWalk walk(law, opts);
    for (int i = 0; i < 50; ++i) {
        RandomSource rng(seed, 2000 + i);
        walk.reset();
        RegenTracker tracker;
        tracker.observe(0);
        for (int t = 0; t < 1500; ++t) {
            walk.step(rng);
            tracker.observe(walk.position().e1());
        }
        for (std::int64_t lag : {0, 100}) {
            if (!(tracker.record(lag) == find_regenerations(walk.e1_history(), lag))) {
                c.pass = false;
                c.detail = "records differ on run " + std::to_string(i) + " at lag " +
                           std::to_string(lag);
                return c;
            }
        }
    }
    c.detail = "50 runs x 1500 steps, records identical at lags 0 and 100";
    return c;
}

CheckResult check_oracle() {
    CheckResult c;
    c.name = "oracle_consistency";
    using oracle::Statistic;
    for (Statistic s : {Statistic::x1, Statistic::j_count, Statistic::d_exceeds}) {
        const auto merged = oracle::exact_distribution(0.75, 2, 5, s);
        if (merged.total_mass() != 1) {
            c.pass = false;
            c.detail = std::string("mass != 1 for ") + oracle::statistic_name(s);
            return c;
        }
        if (!(merged.pmf == oracle::exact_distribution_brute(0.75, 2, 5, s).pmf)) {
            c.pass = false;
            c.detail = std::string("merged and brute routes differ for ") +
                       oracle::statistic_name(s);
            return c;
        }
    }
    double prev = -1.0;
    for (int n = 0; n <= 5; ++n) {
        const double e =
            oracle::exact_distribution(0.75, 2, n, Statistic::x1).expectation();
        if (e < prev - 1e-15) {
            c.pass = false;
            c.detail = "E[x1_n] not nondecreasing at n = " + std::to_string(n);
            return c;
        }
        prev = e;
    }
    c.detail = "mass 1 exactly, merged == brute, E[x1_n] nondecreasing (n <= 5)";
    return c;
}

CheckResult check_mc_vs_oracle(std::int64_t runs, std::uint64_t seed) {
    CheckResult c;
    c.name = "mc_vs_oracle";
    if (runs <= 0) {
        c.skipped = true;
        c.detail = "0 runs requested: comparison is vacuous";
        return c;
    }
    const auto rep = oracle::mc_vs_oracle(0.75, 2, 6, runs, seed, 500000);
    c.pass = rep.ok(4.0);
    char buf[64];
    std::snprintf(buf, sizeof buf, "max |z| = %.3f over %lld runs", rep.max_abs_z(),
                  static_cast<long long>(runs));
    c.detail = buf;
    return c;
}

CheckResult check_coupling_marginal(std::int64_t runs, std::uint64_t seed, bool corrupt) {
    CheckResult c;
    c.name = "coupling_marginal";
    if (runs <= 0) {
        c.skipped = true;
        c.detail = "0 runs requested: comparison is vacuous";
        return c;
    }
    const int n = 6;
    const double exact = oracle::exact_distribution(0.75, 2, n,
                                                    oracle::Statistic::x1)
                             .expectation();
    // The test hook feeds the coupled walk a perturbed law while scoring it
    // against the unperturbed enumeration; the check must then fail.
    const StepLaw law = make_step_law(corrupt ? 0.65 : 0.75, 2);
    double sum = 0.0, ss = 0.0;
    for (std::int64_t i = 0; i < runs; ++i) {
        RandomSource rng(seed, 600000 + static_cast<std::uint64_t>(i));
        CoupledWalk pair(law);
        for (int t = 0; t < n; ++t) pair.step(rng);
        const double x = static_cast<double>(pair.y().position().e1());
        sum += x;
        ss += x * x;
    }
    const double r = static_cast<double>(runs);
    const double mean = sum / r;
    const double var = (ss - sum * sum / r) / (r - 1.0);
    const double se = std::sqrt(std::max(var, 1e-300) / r);
    const double z = (mean - exact) / se;
    c.pass = std::abs(z) <= 4.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "coupled E[Y.e1] z = %+.3f vs exact %.6f", z, exact);
    c.detail = buf;
    return c;
}

int cmd_selftest(const SelftestOpts& o) {
    if (o.runs <= 0)
        std::cerr << "warning: --runs 0; Monte Carlo checks pass vacuously\n";
    std::vector<CheckResult> checks;
    checks.push_back(check_step_law());
    checks.push_back(check_coupling(o.seed));
    checks.push_back(check_regen(o.seed));
    checks.push_back(check_oracle());
    checks.push_back(check_mc_vs_oracle(o.runs, o.seed));
    checks.push_back(check_coupling_marginal(o.runs, o.seed, o.corrupt_step_law));

    int failed = 0;
    for (const CheckResult& c : checks) {
        const char* tag = c.skipped ? "skip" : (c.pass ? " ok " : "FAIL");
        std::cout << "[" << tag << "] " << c.name << ": " << c.detail << "\n";
        if (!c.pass && !c.skipped) ++failed;
    }
    std::cout << "selftest: " << checks.size() << " checks, " << failed
              << " failed\n";
    return failed == 0 ? 0 : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"excited random walk: simulation, coupling, regeneration and "
                 "exact-enumeration toolkit"};
    app.require_subcommand(1);

    SimulateOpts sim_opts;
    auto* sim = app.add_subcommand("simulate",
                                   "run independent walks and write per-run rows");
    add_simulate_options(sim, sim_opts, /*with_blocks=*/true);

    SimulateOpts regen_opts;
    auto* regen = app.add_subcommand(
        "regen", "run walks and write their regeneration blocks");
    add_simulate_options(regen, regen_opts, /*with_blocks=*/false);

    SimulateOpts couple_opts;
    auto* couple = app.add_subcommand(
        "couple", "run coupled walk pairs and re-check every coupling invariant");
    add_simulate_options(couple, couple_opts, /*with_blocks=*/false);

    SweepOpts sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "estimate v and sigma over a grid of p");
    sweep->add_option("--p-grid", sweep_opts.p_grid, "comma-separated p values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--d", sweep_opts.sim.d, "lattice dimension");
    sweep->add_option("--steps", sweep_opts.sim.steps, "steps per run");
    sweep->add_option("--runs", sweep_opts.sim.runs, "runs per grid point");
    sweep->add_option("--seed", sweep_opts.sim.seed, "master seed");
    sweep->add_option("--confirm-lag", sweep_opts.sim.confirm_lag,
                      "regeneration confirmation lag");
    sweep->add_option("--threads", sweep_opts.sim.threads, "worker threads");
    sweep->add_flag("--allow-boundary-p", sweep_opts.sim.allow_boundary_p,
                    "admit p = 1/2 exactly");
    sweep->add_option("--method", sweep_opts.method, "estimator")
        ->check(CLI::IsMember({"direct", "regeneration"}));
    sweep->add_option("--format", sweep_opts.sim.format, "output format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    sweep->add_option("--output", sweep_opts.sim.output, "output file (default stdout)");
    sweep->add_option("--emit-plot-script", sweep_opts.plot_script,
                      "write a matplotlib plotting script to this path");

    OracleOpts oracle_opts;
    auto* orc = app.add_subcommand("oracle",
                                   "exact small-instance distributions (d = 2)");
    orc->add_option("--stat", oracle_opts.stat,
                    "x1 | j_count | d_exceeds | t0 | kappa_confirmed_by | tan_count")
        ->required();
    orc->add_option("--n", oracle_opts.n, "horizon (n <= 12; tan_count n <= 14)");
    orc->add_option("--p", oracle_opts.p, "bias p");
    orc->add_option("--d", oracle_opts.d, "dimension (must be 2)");
    orc->add_flag("--float", oracle_opts.use_float,
                  "double-precision fallback instead of exact rationals");
    orc->add_flag("--brute", oracle_opts.brute, "force the no-merging brute route");
    orc->add_option("--output", oracle_opts.output, "output file (default stdout)");

    SelftestOpts selftest_opts;
    auto* self = app.add_subcommand("selftest",
                                    "run the built-in consistency checks");
    self->add_option("--runs", selftest_opts.runs, "Monte Carlo runs per check");
    self->add_option("--seed", selftest_opts.seed, "master seed");
    self->add_flag("--corrupt-step-law", selftest_opts.corrupt_step_law,
                   "test hook: perturb the walk law so the marginal check fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand(sim)) return cmd_simulate(sim_opts);
        if (app.got_subcommand(regen)) return cmd_regen(regen_opts);
        if (app.got_subcommand(couple)) return cmd_couple(couple_opts);
        if (app.got_subcommand(sweep)) return cmd_sweep(sweep_opts);
        if (app.got_subcommand(orc)) return cmd_oracle(oracle_opts);
        if (app.got_subcommand(self)) return cmd_selftest(selftest_opts);
    } catch (const oracle::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitUsage;
}
