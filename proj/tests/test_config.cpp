#include "abcx/config.hpp"
#include "doctest.h"

using namespace abcx;

namespace {

const char* kReference = R"json({
  "channel": {
    "w_y": [[0.9, 0.1], [0.1, 0.9]],
    "w_z": [[0.8, 0.2], [0.2, 0.8]]
  },
  "input": {"p_ux": [[0.4, 0.1], [0.1, 0.4]]},
  "rates": {"r1": 0.05, "r2": 0.05, "r1_tilde": 0.08, "r2_tilde": 0.08,
            "lambda12": 2.0, "lambda2": 1.5},
  "solver": {"grid_k": 14, "descent_steps": 120, "shrink": 0.7,
             "tolerance_bits": 0.001, "starts": 8},
  "simulation": {"blocklengths": [4, 6], "trials": 400, "seed": 11,
                 "codebook_policy": "fixed"},
  "oracle": {"max_outputs": 1000000, "max_grid_points": 50000000,
             "grid_k": 24, "solver_tolerance_bits": 0.02},
  "sweep": {"axis": "r1", "grid": [0.02, 0.05, 0.1]},
  "output": {"dir": "out"}
})json";

}  // namespace

TEST_CASE("reference config parses with every section") {
    const RunConfig c = parse_config(kReference);
    CHECK(c.w_y.in_size() == 2);
    CHECK(c.w_z.has_value());
    CHECK(c.p_ux.p(0, 0) == doctest::Approx(0.4));
    CHECK(c.rates.lambda12() == 2.0);
    CHECK(c.solver.grid_k == 14);
    REQUIRE(c.simulation.has_value());
    CHECK(c.simulation->policy == CodebookPolicy::Fixed);
    CHECK(c.simulation->blocklengths == std::vector<std::size_t>{4, 6});
    CHECK(c.oracle.grid_k == 24);
    REQUIRE(c.sweep.has_value());
    CHECK(c.sweep->axis == "r1");
    CHECK(c.out_dir == "out");
}

TEST_CASE("defaults apply when optional sections are absent") {
    const RunConfig c = parse_config(R"({
      "channel": {"w_y": [[0.9, 0.1], [0.1, 0.9]]},
      "input": {"p_ux": [[0.25, 0.25], [0.25, 0.25]]},
      "rates": {"r1": 0.1, "r2": 0.1, "r1_tilde": 0.1, "r2_tilde": 0.1,
                "lambda12": 1.0, "lambda2": 1.0}
    })");
    CHECK_FALSE(c.w_z.has_value());
    CHECK_FALSE(c.simulation.has_value());
    CHECK_FALSE(c.sweep.has_value());
    CHECK(c.solver.grid_k == 20);
    CHECK(c.oracle.max_outputs == 1'000'000);
    CHECK(c.out_dir == "out");
}

TEST_CASE("round trip preserves every field") {
    const RunConfig a = parse_config(kReference);
    const RunConfig b = parse_config(serialize_config(a));
    CHECK(config_equivalent(a, b));
}

TEST_CASE("row sums are validated to 1e-9 and then normalized") {
    CHECK_THROWS_AS(parse_config(R"({
      "channel": {"w_y": [[0.9, 0.6], [0.1, 0.9]]},
      "input": {"p_ux": [[0.25, 0.25], [0.25, 0.25]]},
      "rates": {"r1": 0, "r2": 0, "r1_tilde": 0, "r2_tilde": 0,
                "lambda12": 1, "lambda2": 1}
    })"),
                    ConfigError);
    // a 1e-10 residue is accepted and normalized
    const RunConfig ok = parse_config(R"({
      "channel": {"w_y": [[0.9000000001, 0.1], [0.1, 0.9]]},
      "input": {"p_ux": [[0.25, 0.25], [0.25, 0.25]]},
      "rates": {"r1": 0, "r2": 0, "r1_tilde": 0, "r2_tilde": 0,
                "lambda12": 1, "lambda2": 1}
    })");
    CHECK(ok.w_y(0, 0) + ok.w_y(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("invalid settings are rejected") {
    auto with = [](const std::string& patch) {
        return std::string(R"({
          "channel": {"w_y": [[0.9, 0.1], [0.1, 0.9]]},
          "input": {"p_ux": [[0.25, 0.25], [0.25, 0.25]]},
          "rates": {"r1": 0.1, "r2": 0.1, "r1_tilde": 0.2, "r2_tilde": 0.2,
                    "lambda12": 1.5, "lambda2": 1.5})") +
               patch + "}";
    };
    // zero trials
    CHECK_THROWS_AS(
        parse_config(with(R"(,"simulation": {"blocklengths": [4], "trials": 0})")), ConfigError);
    // non-increasing blocklengths
    CHECK_THROWS_AS(
        parse_config(with(R"(,"simulation": {"blocklengths": [6, 4], "trials": 10})")),
        ConfigError);
    // unknown sweep axis
    CHECK_THROWS_AS(parse_config(with(R"(,"sweep": {"axis": "r3", "grid": [0.1]})")),
                    ConfigError);
    // non-monotone sweep grid
    CHECK_THROWS_AS(
        parse_config(with(R"(,"sweep": {"axis": "r1", "grid": [0.2, 0.1]})")), ConfigError);
    // lambda below one lands in the rate validation
    CHECK_THROWS_AS(parse_config(R"({
      "channel": {"w_y": [[0.9, 0.1], [0.1, 0.9]]},
      "input": {"p_ux": [[0.25, 0.25], [0.25, 0.25]]},
      "rates": {"r1": 0.1, "r2": 0.1, "r1_tilde": 0.2, "r2_tilde": 0.2,
                "lambda12": 0.5, "lambda2": 1.5}
    })"),
                    ConfigError);
    // thresholds below the operating rates
    CHECK_THROWS_AS(parse_config(R"({
      "channel": {"w_y": [[0.9, 0.1], [0.1, 0.9]]},
      "input": {"p_ux": [[0.25, 0.25], [0.25, 0.25]]},
      "rates": {"r1": 0.3, "r2": 0.1, "r1_tilde": 0.2, "r2_tilde": 0.2,
                "lambda12": 1.5, "lambda2": 1.5}
    })"),
                    ConfigError);
    // input distribution must match the channel input alphabet
    CHECK_THROWS_AS(parse_config(R"({
      "channel": {"w_y": [[0.9, 0.1], [0.1, 0.9]]},
      "input": {"p_ux": [[0.2, 0.2, 0.1], [0.2, 0.2, 0.1]]},
      "rates": {"r1": 0.1, "r2": 0.1, "r1_tilde": 0.2, "r2_tilde": 0.2,
                "lambda12": 1.5, "lambda2": 1.5}
    })"),
                    ConfigError);
    // malformed JSON
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}
