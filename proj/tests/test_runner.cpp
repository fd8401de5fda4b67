#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "abcx/config.hpp"
#include "abcx/oracle.hpp"
#include "abcx/runner.hpp"
#include "doctest.h"

using namespace abcx;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("abcx_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path path = dir / "config.json";
    std::ofstream f(path);
    f << text;
    return path;
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

std::string base_config(const std::string& rates, const std::string& extra = "") {
    return std::string(R"({
      "channel": {"w_y": [[0.9, 0.1], [0.1, 0.9]], "w_z": [[0.8, 0.2], [0.2, 0.8]]},
      "input": {"p_ux": [[0.4, 0.1], [0.1, 0.4]]},
      "solver": {"grid_k": 12, "descent_steps": 100},
      "rates": )") +
           rates + extra + "}";
}

RunOptions options_for(const fs::path& config, const fs::path& out, int threads = 1) {
    RunOptions opt;
    opt.config_path = config.string();
    opt.out_dir = out.string();
    opt.threads = threads;
    return opt;
}

}  // namespace

TEST_CASE("exponents command writes a self-describing report") {
    const fs::path dir = temp_dir("exp");
    SUBCASE("above-capacity rates produce all-zero bounds") {
        const fs::path cfg = write_config(
            dir, base_config(R"({"r1": 1.2, "r2": 1.2, "r1_tilde": 1.2, "r2_tilde": 1.2,
                                 "lambda12": 2.0, "lambda2": 1.5})"));
        CHECK(cmd_exponents(options_for(cfg, dir / "out")) == kExitOk);
        const auto kv = parse_kv(read_file(dir / "out" / "exponents.txt"));
        CHECK(kv.at("e1_bound_bits") == "0");
        CHECK(kv.at("e1hat_bound_bits") == "0");
        CHECK(kv.at("e2_bound_bits") == "0");
        CHECK(kv.at("e2hat_bound_bits") == "0");
        CHECK(kv.at("unit") == "bits");
    }
    SUBCASE("unit lambdas with matching thresholds collapse the message-1 bounds") {
        const fs::path cfg = write_config(
            dir, base_config(R"({"r1": 0.1, "r2": 0.1, "r1_tilde": 0.1, "r2_tilde": 0.1,
                                 "lambda12": 1.0, "lambda2": 1.0})"));
        CHECK(cmd_exponents(options_for(cfg, dir / "out2")) == kExitOk);
        const auto kv = parse_kv(read_file(dir / "out2" / "exponents.txt"));
        CHECK(kv.at("e1_bound_bits") == kv.at("e1hat_bound_bits"));
    }
    SUBCASE("bounds match the grid oracle on the reference instance") {
        const fs::path cfg = write_config(
            dir, base_config(R"({"r1": 0.08, "r2": 0.1, "r1_tilde": 0.12, "r2_tilde": 0.15,
                                 "lambda12": 2.0, "lambda2": 1.5})"));
        CHECK(cmd_exponents(options_for(cfg, dir / "out3")) == kExitOk);
        const auto kv = parse_kv(read_file(dir / "out3" / "exponents.txt"));
        const RunConfig config = load_config(cfg.string());
        const double pen_low = std::stod(kv.at("pen_low_bits"));
        const double oracle = grid_exponent(
            GridObjective::Penalized,
            GridParams{1.0 / 2.0, 0.12, 0.15, 0.1, 0.0}, config.p_ux, config.w_y, 40);
        CHECK(std::abs(pen_low - oracle) <= 1e-2);
    }
    SUBCASE("a broken config fails with the validation exit code") {
        const fs::path cfg = write_config(dir, "{\"channel\": {}}");
        CHECK(cmd_exponents(options_for(cfg, dir / "out4")) == kExitConfig);
    }
}

TEST_CASE("simulate command") {
    const fs::path dir = temp_dir("sim");
    const std::string rates = R"({"r1": 0.125, "r2": 0.125, "r1_tilde": 0.2, "r2_tilde": 0.2,
                                  "lambda12": 1.5, "lambda2": 1.5})";
    SUBCASE("data rows are byte-identical across thread counts and reruns") {
        const fs::path cfg = write_config(
            dir, base_config(rates, R"(,"simulation": {"blocklengths": [4, 6, 8],
                                        "trials": 300, "seed": 77, "codebook_policy": "fresh"})"));
        REQUIRE(cmd_simulate(options_for(cfg, dir / "a", 1)) == kExitOk);
        REQUIRE(cmd_simulate(options_for(cfg, dir / "b", 2)) == kExitOk);
        REQUIRE(cmd_simulate(options_for(cfg, dir / "c", 8)) == kExitOk);
        const std::string a = read_file(dir / "a" / "simulate.tsv");
        CHECK(a == read_file(dir / "b" / "simulate.tsv"));
        CHECK(a == read_file(dir / "c" / "simulate.tsv"));
        CHECK(a.find("e1_total[prob]") != std::string::npos);
    }
    SUBCASE("fixed-codebook runs add exact oracle columns within three sigmas") {
        const fs::path cfg = write_config(
            dir, base_config(rates, R"(,"simulation": {"blocklengths": [4, 6],
                                        "trials": 4000, "seed": 5, "codebook_policy": "fixed"})"));
        REQUIRE(cmd_simulate(options_for(cfg, dir / "fixed", 2)) == kExitOk);
        const std::string table = read_file(dir / "fixed" / "simulate.tsv");
        CHECK(table.find("na") == std::string::npos);
        // spot check: the exact and estimated columns agree loosely
        std::istringstream is(table);
        std::string header, row;
        std::getline(is, header);
        while (std::getline(is, row)) {
            std::istringstream rs(row);
            std::vector<std::string> cells;
            std::string cell;
            while (std::getline(rs, cell, '\t')) cells.push_back(cell);
            REQUIRE(cells.size() == 27);
            const double est = std::stod(cells[11]);
            const double exact = std::stod(cells[23]);
            CHECK(std::abs(est - exact) < 0.1);
        }
    }
    SUBCASE("missing simulation section is a validation error") {
        const fs::path cfg = write_config(dir, base_config(rates));
        CHECK(cmd_simulate(options_for(cfg, dir / "none")) == kExitConfig);
    }
    SUBCASE("seed override changes the data") {
        const fs::path cfg = write_config(
            dir, base_config(rates, R"(,"simulation": {"blocklengths": [6], "trials": 500,
                                        "seed": 1, "codebook_policy": "fresh"})"));
        RunOptions with_seed = options_for(cfg, dir / "s1");
        REQUIRE(cmd_simulate(with_seed) == kExitOk);
        with_seed.out_dir = (dir / "s2").string();
        with_seed.seed_override = 999;
        REQUIRE(cmd_simulate(with_seed) == kExitOk);
        CHECK(read_file(dir / "s1" / "simulate.tsv") != read_file(dir / "s2" / "simulate.tsv"));
    }
}

TEST_CASE("sweep command") {
    const fs::path dir = temp_dir("sweep");
    SUBCASE("raising r1 never raises the message-1 bound") {
        const fs::path cfg = write_config(
            dir, base_config(R"({"r1": 0.05, "r2": 0.1, "r1_tilde": 0.5, "r2_tilde": 0.15,
                                 "lambda12": 1.5, "lambda2": 1.5})",
                             R"(,"sweep": {"axis": "r1", "grid": [0.05, 0.15, 0.3, 0.45]})"));
        REQUIRE(cmd_sweep(options_for(cfg, dir / "out", 2)) == kExitOk);
        std::istringstream is(read_file(dir / "out" / "sweep.tsv"));
        std::string line;
        std::getline(is, line);  // header
        double prev = kInf;
        int rows = 0;
        while (std::getline(is, line)) {
            std::istringstream rs(line);
            std::string axis, e1;
            std::getline(rs, axis, '\t');
            std::getline(rs, e1, '\t');
            const double v = std::stod(e1);
            CHECK(v <= prev + 1e-9);
            prev = v;
            ++rows;
        }
        CHECK(rows == 4);
    }
    SUBCASE("lambda12 sweep leaves the undetected bound nondecreasing") {
        const fs::path cfg = write_config(
            dir, base_config(R"({"r1": 0.05, "r2": 0.05, "r1_tilde": 0.1, "r2_tilde": 0.1,
                                 "lambda12": 1.0, "lambda2": 1.0})",
                             R"(,"sweep": {"axis": "lambda12", "grid": [1.0, 2.0, 4.0]})"));
        REQUIRE(cmd_sweep(options_for(cfg, dir / "lam")) == kExitOk);
        std::istringstream is(read_file(dir / "lam" / "sweep.tsv"));
        std::string line;
        std::getline(is, line);
        double prev = -kInf;
        while (std::getline(is, line)) {
            std::istringstream rs(line);
            std::vector<std::string> cells;
            std::string cell;
            while (std::getline(rs, cell, '\t')) cells.push_back(cell);
            const double e1hat = std::stod(cells[2]);
            CHECK(e1hat >= prev - 1e-9);
            prev = e1hat;
        }
    }
    SUBCASE("a single-point sweep matches the exponents command") {
        const std::string rates = R"({"r1": 0.1, "r2": 0.1, "r1_tilde": 0.15, "r2_tilde": 0.15,
                                      "lambda12": 2.0, "lambda2": 1.5})";
        const fs::path cfg_sweep = write_config(
            dir, base_config(rates, R"(,"sweep": {"axis": "r1", "grid": [0.1]})"));
        REQUIRE(cmd_sweep(options_for(cfg_sweep, dir / "single")) == kExitOk);
        REQUIRE(cmd_exponents(options_for(cfg_sweep, dir / "single")) == kExitOk);
        const auto kv = parse_kv(read_file(dir / "single" / "exponents.txt"));
        std::istringstream is(read_file(dir / "single" / "sweep.tsv"));
        std::string header, row;
        std::getline(is, header);
        std::getline(is, row);
        std::istringstream rs(row);
        std::vector<std::string> cells;
        std::string cell;
        while (std::getline(rs, cell, '\t')) cells.push_back(cell);
        CHECK(cells[1] == kv.at("e1_bound_bits"));
        CHECK(cells[4] == kv.at("e2hat_bound_bits"));
    }
    SUBCASE("grid values breaking the rate invariants are a validation error") {
        const fs::path cfg = write_config(
            dir, base_config(R"({"r1": 0.05, "r2": 0.1, "r1_tilde": 0.2, "r2_tilde": 0.15,
                                 "lambda12": 1.5, "lambda2": 1.5})",
                             R"(,"sweep": {"axis": "r1", "grid": [0.1, 0.3]})"));
        CHECK(cmd_sweep(options_for(cfg, dir / "bad")) == kExitConfig);
    }
}

TEST_CASE("verify command") {
    const fs::path dir = temp_dir("verify");
    const std::string rates = R"({"r1": 0.1, "r2": 0.1, "r1_tilde": 0.15, "r2_tilde": 0.15,
                                  "lambda12": 2.0, "lambda2": 1.5})";
    SUBCASE("the reference configuration passes every check") {
        const fs::path cfg = write_config(
            dir,
            base_config(rates, R"(,"simulation": {"blocklengths": [4, 6], "trials": 3000,
                                    "seed": 21, "codebook_policy": "fixed"},
                                  "oracle": {"grid_k": 24, "solver_tolerance_bits": 0.02})"));
        CHECK(cmd_verify(options_for(cfg, dir / "ok", 2)) == kExitOk);
        const std::string report = read_file(dir / "ok" / "verify.txt");
        CHECK(report.find("[FAIL]") == std::string::npos);
        CHECK(report.find("[PASS] solver_vs_grid_penalized") != std::string::npos);
        CHECK(report.find("[PASS] mc_vs_exact") != std::string::npos);
        CHECK(report.find("[PASS] unambiguity") != std::string::npos);
        CHECK(report.find("[PASS] fast_path_equivalence") != std::string::npos);
    }
    SUBCASE("a corrupted channel matrix fails before any check runs") {
        const fs::path cfg = write_config(dir, R"({
          "channel": {"w_y": [[0.9, 0.6], [0.1, 0.9]]},
          "input": {"p_ux": [[0.25, 0.25], [0.25, 0.25]]},
          "rates": {"r1": 0.1, "r2": 0.1, "r1_tilde": 0.15, "r2_tilde": 0.15,
                    "lambda12": 2.0, "lambda2": 1.5}
        })");
        CHECK(cmd_verify(options_for(cfg, dir / "bad")) == kExitConfig);
    }
    SUBCASE("an unreachable tolerance is reported as a check failure") {
        // measure the actual solver/grid gap first: at this coarse grid it
        // exceeds 1e-6, so demanding 1e-6 must fail
        const fs::path cfg = write_config(
            dir, base_config(rates, R"(,"oracle": {"grid_k": 20,
                                        "solver_tolerance_bits": 1e-06})"));
        const RunConfig config = load_config(cfg.string());
        const double solver =
            exponent_joint(2.0, 0.1, 0.1, config.p_ux, config.w_y, config.solver).value;
        const double oracle = grid_exponent(GridObjective::Joint,
                                            GridParams{2.0, 0.1, 0.1, 0.0, 0.0}, config.p_ux,
                                            config.w_y, 20);
        REQUIRE(std::abs(solver - oracle) > 1e-6);
        CHECK(cmd_verify(options_for(cfg, dir / "tight")) == kExitCheckFailed);
    }
    SUBCASE("exhausted budgets mark checks as skipped") {
        const fs::path cfg = write_config(
            dir, base_config(rates, R"(,"oracle": {"grid_k": 24, "max_grid_points": 10,
                                        "solver_tolerance_bits": 0.02})"));
        CHECK(cmd_verify(options_for(cfg, dir / "skip")) == kExitSkipped);
        const std::string report = read_file(dir / "skip" / "verify.txt");
        CHECK(report.find("[SKIP] solver_vs_grid_joint") != std::string::npos);
    }
}

#ifdef ABCX_CLI_PATH
TEST_CASE("command line interface") {
    const fs::path dir = temp_dir("cli");
    const fs::path cfg = write_config(
        dir, base_config(R"({"r1": 1.2, "r2": 1.2, "r1_tilde": 1.2, "r2_tilde": 1.2,
                             "lambda12": 2.0, "lambda2": 1.5})"));
    const std::string cli = ABCX_CLI_PATH;
    const std::string out = (dir / "out").string();
    CHECK(std::system((cli + " exponents --config " + cfg.string() + " --out " + out).c_str()) ==
          0);
    CHECK(fs::exists(dir / "out" / "exponents.txt"));
    // usage errors map onto the validation exit code
    CHECK(WEXITSTATUS(std::system((cli + " exponents 2>/dev/null").c_str())) == kExitConfig);
    CHECK(WEXITSTATUS(std::system((cli + " bogus 2>/dev/null").c_str())) == kExitConfig);
    CHECK(WEXITSTATUS(std::system(
              (cli + " simulate --config " + cfg.string() + " --out " + out + " 2>/dev/null")
                  .c_str())) == kExitConfig);
}
#endif
