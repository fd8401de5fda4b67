#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "abcx/exponents.hpp"
#include "abcx/oracle.hpp"
#include "abcx/simulate.hpp"
#include "abcx/types.hpp"

// Run configuration for the batch front end: JSON with one section per
// concern (channel, input, rates, solver, simulation, oracle, sweep, output).
// Matrices are validated row-stochastic to 1e-9 and normalized on load.

namespace abcx {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SimulationSettings {
    std::vector<std::size_t> blocklengths;  // strictly increasing
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    CodebookPolicy policy = CodebookPolicy::FreshPerTrial;
};

struct OracleSettings {
    std::int64_t max_outputs = 1'000'000;
    std::int64_t max_grid_points = 50'000'000;
    std::int64_t grid_k = 30;
    double solver_tolerance_bits = 1e-2;

    OracleBudget budget() const { return {max_outputs, max_grid_points}; }
};

struct SweepSettings {
    std::string axis;  // r1|r2|r1_tilde|r2_tilde|lambda12|lambda2
    std::vector<double> grid;
};

struct RunConfig {
    Channel w_y;
    std::optional<Channel> w_z;
    UxDist p_ux;
    RateConfig rates;
    SolverSettings solver;
    std::optional<SimulationSettings> simulation;
    OracleSettings oracle;
    std::optional<SweepSettings> sweep;
    std::string out_dir = "out";
};

// Throws ConfigError on malformed or invalid input.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

// Field-by-field equivalence after normalization (used by the round-trip
// contract and its tests).
bool config_equivalent(const RunConfig& a, const RunConfig& b);

}  // namespace abcx
