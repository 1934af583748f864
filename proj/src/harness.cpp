#include "erw/harness.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "erw/coupling.hpp"
#include "erw/parallel.hpp"
#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace erw {

namespace {

struct SimWorkerState {
    ExcitedWalk walk;
    RegenTracker tracker;
};

struct PerRunRegen {
    std::vector<RegenBlock> blocks;
};

void validate_runs(const ExperimentConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("run count must be >= 1");
    if (cfg.steps < 1) throw std::invalid_argument("step count must be >= 1");
    if (cfg.confirm_lag < 0) throw std::invalid_argument("confirm lag must be >= 0");
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace

SimulationResult run_simulation(const ExperimentConfig& cfg) {
    validate_runs(cfg);
    const StepLaw law = make_step_law(cfg.p, cfg.d, cfg.allow_boundary_p);

    SimulationResult out;
    out.config = cfg;
    out.rows.resize(cfg.runs);
    out.final_x1.resize(cfg.runs);
    std::vector<PerRunRegen> regen_slots(cfg.runs);

    parallel_runs(
        cfg.runs, cfg.threads,
        [&] { return SimWorkerState{ExcitedWalk(law), RegenTracker{}}; },
        [&](SimWorkerState& st, std::int64_t i) {
            RandomSource rng(cfg.seed, static_cast<std::uint64_t>(i));
            st.walk.reset();
            st.tracker.reset();
            st.tracker.observe(0);
            for (std::int64_t t = 0; t < cfg.steps; ++t) {
                st.walk.step(rng);
                st.tracker.observe(st.walk.position().e1());
            }
            const RegenRecord rec = st.tracker.record(cfg.confirm_lag);

            RunRow& row = out.rows[i];
            row.run_id = i;
            row.x1_final = st.walk.position().e1();
            row.j_count = st.walk.fresh_count();
            row.r_max = st.walk.running_max();
            row.n_confirmed = static_cast<std::int64_t>(rec.kappa_times.size());
            if (!rec.kappa_times.empty()) row.kappa1 = rec.kappa_times.front();
            row.censored = rec.censored_tail;
            out.final_x1[i] = row.x1_final;
            if (cfg.collect_blocks) regen_slots[i].blocks = extract_blocks(rec);
        });

    for (std::int64_t i = 0; i < cfg.runs; ++i) {
        out.censored_runs += out.rows[i].censored ? 1 : 0;
        for (const RegenBlock& b : regen_slots[i].blocks) {
            out.blocks.push_back(b);
            out.block_run.push_back(i);
        }
    }

    if (cfg.runs >= 2) {
        out.direct = estimate_direct(out.final_x1, cfg.steps);
    } else if (cfg.runs == 1) {
        out.direct = estimate_v_direct(out.final_x1, cfg.steps);
    }
    out.direct.n_steps = cfg.steps;

    if (cfg.collect_blocks) {
        try {
            EstimateSummary r = estimate_v_sigma_regen(out.blocks);
            r.n_runs = cfg.runs;
            r.n_steps = cfg.steps;
            out.regen = r;
        } catch (const std::invalid_argument& e) {
            out.regen_unavailable_reason = e.what();
        }
    } else {
        out.regen_unavailable_reason = "block collection disabled";
    }
    return out;
}

std::vector<std::int64_t> run_final_x1(const ExperimentConfig& cfg) {
    validate_runs(cfg);
    const StepLaw law = make_step_law(cfg.p, cfg.d, cfg.allow_boundary_p);
    std::vector<std::int64_t> finals(cfg.runs);
    parallel_runs(
        cfg.runs, cfg.threads, [&] { return ExcitedWalk(law); },
        [&](ExcitedWalk& walk, std::int64_t i) {
            RandomSource rng(cfg.seed, static_cast<std::uint64_t>(i));
            walk.reset();
            for (std::int64_t t = 0; t < cfg.steps; ++t) walk.step(rng);
            finals[i] = walk.position().e1();
        });
    return finals;
}

CoupleResult run_couple(const ExperimentConfig& cfg) {
    validate_runs(cfg);
    const StepLaw law = make_step_law(cfg.p, cfg.d, cfg.allow_boundary_p);
    CoupleResult out;
    out.config = cfg;
    out.rows.resize(cfg.runs);
    parallel_runs(
        cfg.runs, cfg.threads, [] { return 0; },
        [&](int&, std::int64_t i) {
            RandomSource rng(cfg.seed, static_cast<std::uint64_t>(i));
            const CoupledRunResult r = run_coupled(law, cfg.steps, rng);
            out.rows[i] = {i,          r.y_x1,      r.gap,
                           r.h_count,  r.tan_count, r.j_count,
                           r.violations.total()};
        });
    for (const CoupleRunRow& row : out.rows) out.total_violations += row.violations;
    return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg, std::span<const double> p_grid,
                      EstimateMethod method) {
    SweepResult out;
    for (double p : p_grid) {
        ExperimentConfig point = cfg;
        point.p = p;
        EstimateSummary summary;
        if (method == EstimateMethod::regeneration) {
            point.collect_blocks = true;
            const SimulationResult sim = run_simulation(point);
            summary = sim.regen ? *sim.regen : sim.direct;
        } else {
            point.collect_blocks = false;
            const std::vector<std::int64_t> finals = run_final_x1(point);
            summary = estimate_direct(finals, point.steps);
        }
        out.grid.push_back(p);
        out.summaries.push_back(summary);
    }
    return out;
}

KappaTailResult sample_kappa1(const ExperimentConfig& cfg, std::int64_t max_steps) {
    validate_runs(cfg);
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    const StepLaw law = make_step_law(cfg.p, cfg.d, cfg.allow_boundary_p);

    std::vector<std::optional<std::int64_t>> slots(cfg.runs);
    parallel_runs(
        cfg.runs, cfg.threads,
        [&] { return SimWorkerState{ExcitedWalk(law), RegenTracker{}}; },
        [&](SimWorkerState& st, std::int64_t i) {
            RandomSource rng(cfg.seed, static_cast<std::uint64_t>(i));
            st.walk.reset();
            st.tracker.reset();
            st.tracker.observe(0);
            for (std::int64_t t = 1; t <= max_steps; ++t) {
                st.walk.step(rng);
                st.tracker.observe(st.walk.position().e1());
                const auto first = st.tracker.first_candidate_time();
                if (first && t - *first >= cfg.confirm_lag) {
                    slots[i] = *first;
                    break;
                }
            }
        });

    KappaTailResult out;
    out.total_runs = cfg.runs;
    for (const auto& s : slots) {
        if (s) out.kappa1.push_back(*s);
        else ++out.unresolved;
    }
    return out;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json run_row_json(const SimulationResult& r, const RunRow& row) {
    ordered_json j;
    j["run_id"] = row.run_id;
    j["seed"] = r.config.seed;
    j["p"] = r.config.p;
    j["d"] = r.config.d;
    j["steps"] = r.config.steps;
    j["x1_final"] = row.x1_final;
    j["j_count"] = row.j_count;
    j["r_max"] = row.r_max;
    j["n_confirmed_regens"] = row.n_confirmed;
    if (row.kappa1) j["kappa1_or_censored"] = *row.kappa1;
    else j["kappa1_or_censored"] = "censored";
    return j;
}

}  // namespace

void write_run_rows(std::ostream& os, const SimulationResult& r, OutputFormat f) {
    if (f == OutputFormat::csv) {
        os << "run_id,seed,p,d,steps,x1_final,j_count,r_max,n_confirmed_regens,"
              "kappa1_or_censored\n";
        for (const RunRow& row : r.rows) {
            os << row.run_id << ',' << r.config.seed << ',' << format_double(r.config.p)
               << ',' << r.config.d << ',' << r.config.steps << ',' << row.x1_final
               << ',' << row.j_count << ',' << row.r_max << ',' << row.n_confirmed
               << ',';
            if (row.kappa1) os << *row.kappa1;
            else os << "censored";
            os << '\n';
        }
    } else {
        for (const RunRow& row : r.rows) os << run_row_json(r, row).dump() << '\n';
    }
}

void write_blocks(std::ostream& os, const SimulationResult& r, OutputFormat f) {
    if (f == OutputFormat::csv) os << "run_id,block_index,dk,dx1,is_first,censored\n";
    auto emit = [&](std::int64_t run, std::int64_t index, std::int64_t dk,
                    std::int64_t dx1, bool is_first, bool censored) {
        if (f == OutputFormat::csv) {
            os << run << ',' << index << ',' << dk << ',' << dx1 << ','
               << (is_first ? 1 : 0) << ',' << (censored ? 1 : 0) << '\n';
        } else {
            ordered_json j;
            j["run_id"] = run;
            j["block_index"] = index;
            j["dk"] = dk;
            j["dx1"] = dx1;
            j["is_first"] = is_first;
            j["censored"] = censored;
            os << j.dump() << '\n';
        }
    };
    // Complete blocks carry censored=0. Each run then gets one trailing row for
    // the stretch after its last confirmed regeneration (the whole run when none
    // was confirmed), flagged censored=1; estimators never consume such rows.
    std::size_t i = 0;
    for (std::int64_t run = 0; run < r.config.runs; ++run) {
        std::int64_t index = 0;
        std::int64_t covered_dk = 0;
        std::int64_t covered_dx1 = 0;
        for (; i < r.blocks.size() && r.block_run[i] == run; ++i) {
            const RegenBlock& b = r.blocks[i];
            emit(run, index++, b.dk, b.dx1, b.is_first, false);
            covered_dk += b.dk;
            covered_dx1 += b.dx1;
        }
        const std::int64_t tail_dk = r.config.steps - covered_dk;
        if (tail_dk > 0) {
            emit(run, index, tail_dk, r.rows[run].x1_final - covered_dx1,
                 index == 0, true);
        }
    }
}

void write_couple_rows(std::ostream& os, const CoupleResult& r, OutputFormat f) {
    if (f == OutputFormat::csv) {
        os << "run_id,seed,p,d,steps,y_x1_final,gap_final,h_count,n_tan,j_count,"
              "violations\n";
        for (const CoupleRunRow& row : r.rows) {
            os << row.run_id << ',' << r.config.seed << ',' << format_double(r.config.p)
               << ',' << r.config.d << ',' << r.config.steps << ',' << row.y_x1 << ','
               << row.gap << ',' << row.h_count << ',' << row.tan_count << ','
               << row.j_count << ',' << row.violations << '\n';
        }
    } else {
        for (const CoupleRunRow& row : r.rows) {
            ordered_json j;
            j["run_id"] = row.run_id;
            j["seed"] = r.config.seed;
            j["p"] = r.config.p;
            j["d"] = r.config.d;
            j["steps"] = r.config.steps;
            j["y_x1_final"] = row.y_x1;
            j["gap_final"] = row.gap;
            j["h_count"] = row.h_count;
            j["n_tan"] = row.tan_count;
            j["j_count"] = row.j_count;
            j["violations"] = row.violations;
            os << j.dump() << '\n';
        }
    }
}

void write_sweep(std::ostream& os, const SweepResult& r, OutputFormat f) {
    if (f == OutputFormat::csv) os << "p,v_hat,v_se,sigma_hat,sigma_se\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        const EstimateSummary& s = r.summaries[i];
        if (f == OutputFormat::csv) {
            os << format_double(r.grid[i]) << ',' << format_double(s.v_hat) << ','
               << format_double(s.v_se) << ',' << format_double(s.sigma_hat) << ','
               << format_double(s.sigma_se) << '\n';
        } else {
            ordered_json j;
            j["p"] = r.grid[i];
            j["v_hat"] = s.v_hat;
            j["v_se"] = s.v_se;
            j["sigma_hat"] = s.sigma_hat;
            j["sigma_se"] = s.sigma_se;
            j["method"] = method_name(s.method);
            os << j.dump() << '\n';
        }
    }
}

std::string summary_json_line(const SimulationResult& r, EstimateMethod method) {
    ordered_json j;
    j["p"] = r.config.p;
    j["d"] = r.config.d;
    j["n_steps"] = r.config.steps;
    j["n_runs"] = r.config.runs;
    j["method"] = method_name(method);
    const EstimateSummary* s = nullptr;
    if (method == EstimateMethod::direct) {
        s = r.rows.empty() ? nullptr : &r.direct;
    } else {
        s = r.regen ? &*r.regen : nullptr;
    }
    if (s) {
        j["v_hat"] = s->v_hat;
        j["v_se"] = s->v_se;
        if (s->has_sigma) {
            j["sigma_hat"] = s->sigma_hat;
            j["sigma_se"] = s->sigma_se;
        } else {
            j["sigma_hat"] = nullptr;
            j["sigma_se"] = nullptr;
        }
        j["n_blocks"] = s->n_blocks;
    } else {
        j["v_hat"] = nullptr;
        j["v_se"] = nullptr;
        j["sigma_hat"] = nullptr;
        j["sigma_se"] = nullptr;
        j["n_blocks"] = 0;
        if (!r.regen_unavailable_reason.empty() && method == EstimateMethod::regeneration)
            j["unavailable_reason"] = r.regen_unavailable_reason;
    }
    j["censored_fraction"] = r.censored_fraction();
    return j.dump();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os.good()) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("failed renaming " + tmp.string() + " to " + path);
    }
}

}  // namespace erw
