#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "erw_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = scratch_dir() / ("out" + std::to_string(counter) + ".txt");
    const fs::path err = scratch_dir() / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string(ERW_CLI_PATH) + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string first_line(const std::string& s) {
    return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_CASE("help exits cleanly and lists the subcommands") {
    const CliResult r = run_cli("--help");
    CHECK(r.exit_code == 0);
    for (const char* sub : {"simulate", "regen", "couple", "sweep", "oracle", "selftest"})
        CHECK(r.out.find(sub) != std::string::npos);
}

TEST_CASE("simulate emits the run-row schema and a summary per method") {
    const CliResult r =
        run_cli("simulate --p 0.75 --steps 200 --runs 12 --seed 3 --confirm-lag 50");
    CHECK(r.exit_code == 0);
    CHECK(first_line(r.out) ==
          "run_id,seed,p,d,steps,x1_final,j_count,r_max,n_confirmed_regens,"
          "kappa1_or_censored");
    CHECK(r.err.find("\"method\":\"direct\"") != std::string::npos);
    CHECK(r.err.find("\"method\":\"regeneration\"") != std::string::npos);
}

TEST_CASE("file output is byte-stable across reruns and thread counts") {
    const fs::path a = scratch_dir() / "rows_a.csv";
    const fs::path b = scratch_dir() / "rows_b.csv";
    const fs::path c = scratch_dir() / "rows_c.csv";
    const std::string base =
        "simulate --p 0.8 --steps 300 --runs 24 --seed 11 --confirm-lag 60 --output ";
    CHECK(run_cli(base + a.string() + " --threads 1").exit_code == 0);
    CHECK(run_cli(base + b.string() + " --threads 4").exit_code == 0);
    CHECK(run_cli(base + c.string() + " --threads 1").exit_code == 0);
    const std::string bytes = slurp(a);
    CHECK(!bytes.empty());
    CHECK(bytes == slurp(b));
    CHECK(bytes == slurp(c));
}

TEST_CASE("jsonl format carries the same rows as objects") {
    const CliResult r = run_cli(
        "simulate --p 0.75 --steps 100 --runs 5 --seed 2 --format jsonl");
    CHECK(r.exit_code == 0);
    std::istringstream is(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        CHECK(line.front() == '{');
        CHECK(line.find("\"run_id\":") != std::string::npos);
        CHECK(line.find("\"x1_final\":") != std::string::npos);
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("regen emits block rows that cover each run") {
    const CliResult r =
        run_cli("regen --p 0.75 --steps 400 --runs 6 --seed 5 --confirm-lag 80");
    CHECK(r.exit_code == 0);
    CHECK(first_line(r.out) == "run_id,block_index,dk,dx1,is_first,censored");
}

TEST_CASE("couple checks invariants and reports per-run rows") {
    const CliResult r = run_cli("couple --p 1.0 --d 3 --steps 500 --runs 8 --seed 7");
    CHECK(r.exit_code == 0);
    CHECK(first_line(r.out) ==
          "run_id,seed,p,d,steps,y_x1_final,gap_final,h_count,n_tan,j_count,violations");
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        CHECK(line.substr(line.rfind(',') + 1) == "0");  // zero violations
    }
}

TEST_CASE("sweep needs a grid and emits one row per grid point") {
    const CliResult missing = run_cli("sweep --steps 100 --runs 10 --seed 1");
    CHECK(missing.exit_code == 1);

    const CliResult r = run_cli(
        "sweep --p-grid 0.6,0.75,0.9 --steps 200 --runs 20 --seed 4");
    CHECK(r.exit_code == 0);
    std::istringstream is(r.out);
    std::string header;
    std::getline(is, header);
    CHECK(header == "p,v_hat,v_se,sigma_hat,sigma_se");
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) rows += !line.empty();
    CHECK(rows == 3);
}

TEST_CASE("oracle prints exact probabilities and exits 1 beyond budget") {
    const CliResult r = run_cli("oracle --p 0.75 --n 3 --stat x1");
    CHECK(r.exit_code == 0);
    CHECK(first_line(r.out) == "value,probability,probability_exact");
    CHECK(r.out.find("27/512") != std::string::npos);

    const CliResult big = run_cli("oracle --p 0.75 --n 13 --stat x1");
    CHECK(big.exit_code == 1);
    CHECK(big.err.find("budget") != std::string::npos);
}

TEST_CASE("model domain violations exit 1 with a clear message") {
    const CliResult r = run_cli("simulate --p 0.3 --steps 10 --runs 2 --seed 1");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("model domain violation") != std::string::npos);

    const CliResult boundary =
        run_cli("simulate --p 0.5 --steps 10 --runs 2 --seed 1 --allow-boundary-p");
    CHECK(boundary.exit_code == 0);

    const CliResult bad_d = run_cli("simulate --p 0.75 --d 12 --steps 10 --runs 2 --seed 1");
    CHECK(bad_d.exit_code == 1);
}

TEST_CASE("unknown flags and subcommands fail with a usage error") {
    CHECK(run_cli("simulate --frobnicate 3").exit_code == 1);
    CHECK(run_cli("dance").exit_code == 1);
}

TEST_CASE("summaries go to the file sink's stdout when rows go to a file") {
    const fs::path rows = scratch_dir() / "sum_rows.csv";
    const CliResult r = run_cli(
        "simulate --p 0.75 --steps 200 --runs 10 --seed 6 --output " + rows.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"v_hat\":") != std::string::npos);
    CHECK(slurp(rows).rfind("run_id,", 0) == 0);
}
