#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "abcx/codec.hpp"

// Monte Carlo harness: samples codebooks, transmits through the channel,
// decodes at terminal Y and tallies the four error events. Trials are
// independent; per-trial random streams are derived from (seed, trial index),
// so a tally is identical for any thread count.

namespace abcx {

enum class CodebookPolicy { FreshPerTrial, Fixed };

struct TrialTally {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::int64_t trials = 0;
    std::int64_t msg1_undetected = 0;
    std::int64_t msg1_erased = 0;
    std::int64_t msg2_undetected = 0;
    std::int64_t msg2_erased = 0;
    std::int64_t step1_decoded = 0;
    std::int64_t step2_decoded = 0;
    std::int64_t double_erasure = 0;

    void merge(const TrialTally& other);
};

// Fresh policy samples a new codebook per trial and transmits message pair
// (0,0); fixed policy samples one codebook from the seed and draws the
// transmitted pair uniformly per trial.
TrialTally run_trials(const JointType& p_ux, const Channel& w_y, const RateConfig& rc,
                      std::int64_t trials, std::uint64_t seed, CodebookPolicy policy,
                      int threads = 1);

// Fixed-codebook variant over an explicit codebook, so the trial seed can be
// varied while the codebook stays put.
TrialTally run_trials_fixed(const Codebook& cb, const Channel& w_y, const RateConfig& rc,
                            std::int64_t trials, std::uint64_t seed, int threads = 1);

struct ProbEstimate {
    double p = 0.0;
    double lo = 0.0, hi = 0.0;  // Wilson 95% interval; rule-of-three upper bound at k=0
    std::int64_t count = 0;
    std::int64_t trials = 0;
};

struct ErrorEstimates {
    ProbEstimate e1_total, e1_undetected, e2_total, e2_undetected;
};

std::pair<double, double> wilson_interval(std::int64_t count, std::int64_t trials, double z);
ErrorEstimates estimate_error_probs(const TrialTally& tally);

enum class ErrorMetric { Msg1Total, Msg1Undetected, Msg2Total, Msg2Undetected };

struct ExponentFit {
    bool valid = false;
    double slope = 0.0;      // least-squares slope of -log2(p) against n
    double intercept = 0.0;
    std::vector<double> residuals;
    std::vector<std::pair<std::size_t, double>> points;  // (n, estimate) actually fitted
};

// Fit on explicit (n, probability) points; zero estimates are excluded and at
// least three usable blocklengths are required.
ExponentFit fit_exponent(const std::vector<std::pair<std::size_t, double>>& estimates);
ExponentFit empirical_exponent(const std::vector<TrialTally>& series, ErrorMetric metric);

// Nearest joint type with denominator n (largest-remainder rounding; ties
// prefer cells still at zero count, then lower cell index).
JointType quantize_to_type(const UxDist& target, std::size_t n);

}  // namespace abcx
