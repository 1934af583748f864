#include "erw/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <unordered_map>
#include <utility>

#include "erw/lattice.hpp"
#include "erw/rng.hpp"
#include "erw/step_law.hpp"
#include "erw/walk.hpp"

namespace erw::oracle {

namespace {

constexpr int kMaxExactHorizon = 12;
constexpr int kMaxTanHorizon = 14;

// d = 2 step order (+e1, -e1, +e2, -e2), matching the sampler's indexing.
constexpr int kDx[4] = {+1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, +1, -1};

void check_budget(double p, int d, int n) {
    if (p < 0.5 || p > 1.0)
        throw std::invalid_argument(
            "model domain violation: exact enumeration needs 1/2 <= p <= 1, got p = " +
            std::to_string(p));
    if (n < 0) throw std::invalid_argument("exact enumeration: n must be >= 0");
    if (d != 2)
        throw BudgetError("exact enumeration supports d = 2 only, got d = " +
                          std::to_string(d));
    if (n > kMaxExactHorizon) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "exact enumeration refused: n = %d exceeds the budget "
                      "(n <= %d; this instance has about %.3g paths)",
                      n, kMaxExactHorizon, std::pow(4.0, n));
        throw BudgetError(buf);
    }
}

template <class W>
std::array<W, 4> mu_weights(double p);

template <>
std::array<Rational, 4> mu_weights<Rational>(double p) {
    const Rational rp(p);  // exact value of the double
    return {rp / 2, (1 - rp) / 2, Rational(1, 4), Rational(1, 4)};
}

template <>
std::array<double, 4> mu_weights<double>(double p) {
    return {p / 2.0, (1.0 - p) / 2.0, 0.25, 0.25};
}

template <class W>
std::array<W, 4> nu_weights() {
    return {W(1) / 4, W(1) / 4, W(1) / 4, W(1) / 4};
}

// Merged-state key: [fresh, x, y, visited sites as sorted (x, y) pairs].
// The freshness bit is part of the state because two paths can share the
// position and visited set while only one stands on a first visit.
struct StateKey {
    std::vector<std::int32_t> v;
    bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
    std::size_t operator()(const StateKey& k) const {
        std::uint64_t h = 0x9ae16a3b2f90404fULL;
        for (std::int32_t x : k.v) h = mix64(h ^ static_cast<std::uint32_t>(x));
        return static_cast<std::size_t>(h);
    }
};

StateKey next_state(const StateKey& k, int nx, int ny) {
    const std::int32_t* sites = k.v.data() + 3;
    const int m = static_cast<int>(k.v.size() - 3) / 2;
    int lo = 0, hi = m;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        const std::int32_t sx = sites[2 * mid], sy = sites[2 * mid + 1];
        if (sx < nx || (sx == nx && sy < ny)) lo = mid + 1;
        else hi = mid;
    }
    const bool present = lo < m && sites[2 * lo] == nx && sites[2 * lo + 1] == ny;
    StateKey nk;
    nk.v.reserve(k.v.size() + (present ? 0 : 2));
    nk.v.push_back(present ? 0 : 1);
    nk.v.push_back(nx);
    nk.v.push_back(ny);
    nk.v.insert(nk.v.end(), sites, sites + 2 * lo);
    if (!present) {
        nk.v.push_back(nx);
        nk.v.push_back(ny);
    }
    nk.v.insert(nk.v.end(), sites + 2 * lo, sites + 2 * m);
    return nk;
}

template <class W>
std::map<std::int64_t, W> dp_distribution(double p, int n, Statistic s) {
    const std::array<W, 4> mu = mu_weights<W>(p);
    const std::array<W, 4> nu = nu_weights<W>();

    std::unordered_map<StateKey, W, StateKeyHash> cur;
    StateKey init;
    init.v = {1, 0, 0, 0, 0};
    cur.emplace(std::move(init), W(1));

    std::map<std::int64_t, W> result;
    for (int t = 1; t <= n; ++t) {
        std::unordered_map<StateKey, W, StateKeyHash> next;
        next.reserve(cur.size() * 2);
        for (const auto& [key, w] : cur) {
            const bool fresh = key.v[0] != 0;
            const int x = key.v[1], y = key.v[2];
            const std::array<W, 4>& law = fresh ? mu : nu;
            for (int idx = 0; idx < 4; ++idx) {
                W wt = w * law[idx];
                const int nx = x + kDx[idx], ny = y + kDy[idx];
                if (s == Statistic::d_exceeds && nx == 0) {
                    result[t] += wt;
                    continue;
                }
                if (s == Statistic::t0 && nx > 0) {
                    result[t] += wt;
                    continue;
                }
                next[next_state(key, nx, ny)] += wt;
            }
        }
        cur = std::move(next);
    }

    for (const auto& [key, w] : cur) {
        switch (s) {
            case Statistic::x1:
                result[key.v[1]] += w;
                break;
            case Statistic::j_count:
                result[static_cast<std::int64_t>((key.v.size() - 3) / 2)] += w;
                break;
            default:
                result[kBeyondHorizon] += w;
                break;
        }
    }
    return result;
}

// First ladder time of the e1 path with no return by the horizon (the
// recursion's confirmation lag taken as 0). Self-contained so the oracle
// does not share code with the streaming detector it checks.
std::optional<int> first_unreturned_ladder_time(const std::vector<int>& path) {
    const int horizon = static_cast<int>(path.size()) - 1;
    int level_max = path[0];
    int cursor = 1;
    while (true) {
        int s = -1;
        for (int t = cursor; t <= horizon; ++t) {
            if (path[t] > level_max) {
                s = t;
                break;
            }
        }
        if (s < 0) return std::nullopt;
        int d = -1;
        for (int t = s + 1; t <= horizon; ++t) {
            if (path[t] == path[s]) {
                d = t;
                break;
            }
        }
        if (d < 0) return s;
        for (int t = s; t <= d; ++t) level_max = std::max(level_max, path[t]);
        cursor = d + 1;
    }
}

// Brute-force route: every path enumerated, no state merging.
struct BruteEnv {
    int n = 0;
    Statistic stat = Statistic::x1;
    std::array<Rational, 4> mu;
    std::array<Rational, 4> nu;
    std::set<std::pair<int, int>> visited;
    std::vector<int> e1_path;
    std::map<std::int64_t, Rational>* result = nullptr;
};

void brute_dfs(BruteEnv& env, int depth, int x, int y, bool fresh, const Rational& w) {
    if (depth == env.n) {
        std::int64_t key = 0;
        switch (env.stat) {
            case Statistic::x1:
                key = x;
                break;
            case Statistic::j_count:
                key = static_cast<std::int64_t>(env.visited.size());
                break;
            case Statistic::d_exceeds: {
                key = kBeyondHorizon;
                for (int t = 1; t <= env.n; ++t)
                    if (env.e1_path[t] == 0) {
                        key = t;
                        break;
                    }
                break;
            }
            case Statistic::t0: {
                key = kBeyondHorizon;
                for (int t = 1; t <= env.n; ++t)
                    if (env.e1_path[t] > 0) {
                        key = t;
                        break;
                    }
                break;
            }
            case Statistic::kappa_confirmed_by: {
                const auto kappa = first_unreturned_ladder_time(env.e1_path);
                key = kappa ? *kappa : kBeyondHorizon;
                break;
            }
            case Statistic::tan_count:
                throw std::logic_error("tan_count is not a walk statistic");
        }
        (*env.result)[key] += w;
        return;
    }
    const std::array<Rational, 4>& law = fresh ? env.mu : env.nu;
    for (int idx = 0; idx < 4; ++idx) {
        const int nx = x + kDx[idx], ny = y + kDy[idx];
        const auto [it, inserted] = env.visited.emplace(nx, ny);
        env.e1_path[depth + 1] = nx;
        brute_dfs(env, depth + 1, nx, ny, inserted, w * law[idx]);
        if (inserted) env.visited.erase(it);
    }
}

Distribution make_distribution(Statistic s, int n, double p, int d, bool exact,
                               std::map<std::int64_t, Rational> pmf) {
    Distribution dist;
    dist.statistic = s;
    dist.n = n;
    dist.p = p;
    dist.d = d;
    dist.exact = exact;
    dist.pmf = std::move(pmf);
    return dist;
}

}  // namespace

const char* statistic_name(Statistic s) {
    switch (s) {
        case Statistic::x1: return "x1";
        case Statistic::j_count: return "j_count";
        case Statistic::d_exceeds: return "d_exceeds";
        case Statistic::t0: return "t0";
        case Statistic::kappa_confirmed_by: return "kappa_confirmed_by";
        case Statistic::tan_count: return "tan_count";
    }
    return "?";
}

std::optional<Statistic> parse_statistic(const std::string& name) {
    for (Statistic s : {Statistic::x1, Statistic::j_count, Statistic::d_exceeds,
                        Statistic::t0, Statistic::kappa_confirmed_by,
                        Statistic::tan_count}) {
        if (name == statistic_name(s)) return s;
    }
    return std::nullopt;
}

Rational Distribution::total_mass() const {
    Rational m = 0;
    for (const auto& [k, w] : pmf) m += w;
    return m;
}

double Distribution::prob(std::int64_t value) const {
    const auto it = pmf.find(value);
    return it == pmf.end() ? 0.0 : it->second.convert_to<double>();
}

double Distribution::expectation() const {
    Rational e = 0;
    for (const auto& [k, w] : pmf) {
        if (k == kBeyondHorizon && !w.is_zero())
            throw std::logic_error("expectation undefined: mass beyond the horizon");
        e += Rational(k) * w;
    }
    return e.convert_to<double>();
}

Distribution exact_distribution(double p, int d, int n, Statistic s,
                                bool use_rational) {
    if (s == Statistic::tan_count) return exact_tan_distribution(n);
    check_budget(p, d, n);
    if (s == Statistic::kappa_confirmed_by) {
        // Path-dependent: no valid merged state, so this one runs brute force.
        return exact_distribution_brute(p, d, n, s);
    }
    std::map<std::int64_t, Rational> pmf;
    if (use_rational) {
        pmf = dp_distribution<Rational>(p, n, s);
    } else {
        for (auto& [k, w] : dp_distribution<double>(p, n, s)) pmf[k] = Rational(w);
    }
    return make_distribution(s, n, p, d, use_rational, std::move(pmf));
}

Distribution exact_distribution_brute(double p, int d, int n, Statistic s) {
    if (s == Statistic::tan_count) return exact_tan_distribution(n);
    check_budget(p, d, n);
    std::map<std::int64_t, Rational> pmf;
    BruteEnv env;
    env.n = n;
    env.stat = s;
    env.mu = mu_weights<Rational>(p);
    env.nu = nu_weights<Rational>();
    env.visited.emplace(0, 0);
    env.e1_path.assign(n + 1, 0);
    env.result = &pmf;
    brute_dfs(env, 0, 0, 0, true, Rational(1));
    return make_distribution(s, n, p, d, true, std::move(pmf));
}

namespace {

struct TanEnv {
    int n = 0;
    std::vector<int> level_max;  // by e2 + n; INT32_MIN marks unseen
    std::map<std::int64_t, std::int64_t>* counts = nullptr;
};

void tan_dfs(TanEnv& env, int depth, int w1, int w2, int n_tan) {
    if (depth == env.n) {
        ++(*env.counts)[n_tan];
        return;
    }
    for (int idx = 0; idx < 4; ++idx) {
        const int nx = w1 + kDx[idx], ny = w2 + kDy[idx];
        int& slot = env.level_max[ny + env.n];
        const int old = slot;
        const bool tan = nx > old;
        if (tan) slot = nx;
        tan_dfs(env, depth + 1, nx, ny, n_tan + (tan ? 1 : 0));
        slot = old;
    }
}

}  // namespace

Distribution exact_tan_distribution(int n) {
    if (n < 0) throw std::invalid_argument("exact_tan_distribution: n must be >= 0");
    if (n > kMaxTanHorizon) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "exact enumeration refused: n = %d exceeds the tan budget "
                      "(n <= %d; this instance has about %.3g paths)",
                      n, kMaxTanHorizon, std::pow(4.0, n));
        throw BudgetError(buf);
    }
    std::map<std::int64_t, std::int64_t> counts;
    TanEnv env;
    env.n = n;
    env.level_max.assign(2 * n + 2, std::numeric_limits<int>::min());
    env.counts = &counts;
    env.level_max[n] = 0;  // W_0 = (0, 0) is index 0's tan point
    tan_dfs(env, 0, 0, 0, 1);
    std::map<std::int64_t, Rational> pmf;
    Rational total = 1;
    for (int i = 0; i < n; ++i) total *= 4;
    for (const auto& [k, c] : counts) pmf[k] = Rational(c) / total;
    return make_distribution(Statistic::tan_count, n, 0.5, 2, true, std::move(pmf));
}

double McOracleReport::max_abs_z() const {
    double m = 0.0;
    for (const auto& l : lines) m = std::max(m, std::abs(l.z));
    return m;
}

std::string McOracleReport::format() const {
    char buf[256];
    std::string out;
    if (refused) {
        out = "mc_vs_oracle: refused: " + refusal_reason + "\n";
        return out;
    }
    std::snprintf(buf, sizeof buf, "mc_vs_oracle: p=%g d=%d n=%d runs=%lld\n", p, d, n,
                  static_cast<long long>(runs));
    out = buf;
    for (const auto& l : lines) {
        std::snprintf(buf, sizeof buf,
                      "  %-12s mc=%.8f exact=%.8f se=%.3g z=%+.3f\n",
                      l.name.c_str(), l.mc_value, l.exact_value, l.se, l.z);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "  max |z| = %.3f\n", max_abs_z());
    out += buf;
    return out;
}

McOracleReport mc_vs_oracle(double p, int d, int n, std::int64_t runs,
                            std::uint64_t master_seed, std::uint64_t stream_base) {
    McOracleReport rep;
    rep.p = p;
    rep.d = d;
    rep.n = n;
    rep.runs = runs;
    if (runs <= 0) {
        rep.refused = true;
        rep.refusal_reason = "no Monte Carlo runs requested; the comparison would be vacuous";
        return rep;
    }

    double ex_x1, ex_j, ex_pd;
    try {
        ex_x1 = exact_distribution(p, d, n, Statistic::x1).expectation();
        ex_j = exact_distribution(p, d, n, Statistic::j_count).expectation();
        ex_pd = exact_distribution(p, d, n, Statistic::d_exceeds).prob_beyond();
    } catch (const BudgetError& e) {
        rep.refused = true;
        rep.refusal_reason = e.what();
        return rep;
    }

    const StepLaw law = make_step_law(p, d, /*allow_boundary_p=*/true);
    double sum_x1 = 0.0, ss_x1 = 0.0, sum_j = 0.0, ss_j = 0.0;
    std::int64_t survived = 0;
    ExcitedWalk walk(law);
    for (std::int64_t i = 0; i < runs; ++i) {
        RandomSource rng(master_seed, stream_base + static_cast<std::uint64_t>(i));
        walk.reset();
        bool returned = false;
        for (int t = 0; t < n; ++t) {
            walk.step(rng);
            returned = returned || walk.position().e1() == 0;
        }
        const double x1 = static_cast<double>(walk.position().e1());
        const double j = static_cast<double>(walk.fresh_count());
        sum_x1 += x1;
        ss_x1 += x1 * x1;
        sum_j += j;
        ss_j += j * j;
        survived += returned ? 0 : 1;
    }

    const double r = static_cast<double>(runs);
    auto z_of = [](double mc, double exact, double se) {
        if (se > 0.0) return (mc - exact) / se;
        return mc == exact ? 0.0 : std::numeric_limits<double>::infinity();
    };
    auto mean_line = [&](const char* name, double sum, double ss, double exact) {
        const double mc = sum / r;
        const double var = runs > 1 ? (ss - sum * sum / r) / (r - 1.0) : 0.0;
        const double se = std::sqrt(std::max(0.0, var) / r);
        rep.lines.push_back({name, mc, exact, se, z_of(mc, exact, se)});
    };
    mean_line("E[x1_n]", sum_x1, ss_x1, ex_x1);
    mean_line("E[J_n]", sum_j, ss_j, ex_j);
    {
        const double mc = static_cast<double>(survived) / r;
        const double se = std::sqrt(std::max(0.0, ex_pd * (1.0 - ex_pd)) / r);
        rep.lines.push_back({"P(D>n)", mc, ex_pd, se, z_of(mc, ex_pd, se)});
    }
    return rep;
}

}  // namespace erw::oracle
