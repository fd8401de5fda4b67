#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "abcx/codec.hpp"
#include "abcx/exponents.hpp"

// Exhaustive ground truth at desk scale: exact error probabilities by summing
// over every channel output, and exact objective minima over the conditional
// type grid. The oracle decodes only through the exhaustive rule so it can
// referee the fast path, and accumulates probabilities with compensated
// summation (the 1e-10 partition check needs it at ~1e6 terms).

namespace abcx {

struct OracleBudget {
    std::int64_t max_outputs = 1'000'000;
    std::int64_t max_grid_points = 50'000'000;
};

// Joint outcome masses: state index 0 = correct, 1 = wrong message, 2 = erased.
struct ExactErrorProbs {
    double e1_total = 0.0;
    double e1_undetected = 0.0;
    double e2_total = 0.0;
    double e2_undetected = 0.0;
    std::array<std::array<double, 3>, 3> mass{};  // [msg1 state][msg2 state]
    double total_mass = 0.0;                      // should be 1 within 1e-10
};

ExactErrorProbs exact_error_probs(const Codebook& cb, const Channel& w_y, const RateConfig& rc,
                                  std::size_t sent_m1, std::size_t sent_m2,
                                  const OracleBudget& budget = {});

// Message-averaged probabilities, matching what a uniform message draw over a
// fixed codebook estimates.
ExactErrorProbs exact_error_probs_avg(const Codebook& cb, const Channel& w_y,
                                      const RateConfig& rc, const OracleBudget& budget = {});

enum class GridObjective { Marginal, Joint, Penalized, SpherePacking };

struct GridParams {
    double lambda = 1.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double r2_pen = 0.0;  // penalty rate (Penalized only)
    double r_cap = 0.0;   // mutual information cap (SpherePacking only)
};

// Exact minimum over conditional distributions whose rows have entries that
// are multiples of 1/k (the unit-weight conditional-type grid). Nonincreasing
// in k along the divisor chain k | 2k | 4k ...
double grid_exponent(GridObjective objective, const GridParams& params, const UxDist& p_ux,
                     const Channel& w_y, std::int64_t k, const OracleBudget& budget = {});

struct AuditResult {
    bool unambiguous = true;
    bool fast_matches_exhaustive = true;
    std::int64_t outputs_checked = 0;
    // first violation found, if any
    std::vector<int> witness_y;
    int witness_satisfiers = 0;
    int witness_step = 0;  // 1 or 2
};

// Counts rule satisfiers for every channel output; passes when every count is
// at most one. Also replays the fast decoder against the exhaustive one.
// Takes raw thresholds so deliberately invalid lambdas can be audited.
AuditResult unambiguity_audit(const Codebook& cb, const DecodeThresholds& th, std::size_t y_size,
                              const OracleBudget& budget = {});

}  // namespace abcx
