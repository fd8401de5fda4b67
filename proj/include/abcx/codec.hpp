#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "abcx/exponents.hpp"
#include "abcx/rng.hpp"
#include "abcx/types.hpp"

// Random constant-composition superposition codebooks and the two-step
// erasure decoder at terminal Y, plus the single-user erasure decoder at
// terminal Z. Codebooks are immutable after sampling; decoding is pure.

namespace abcx {

struct DecodeOutcome {
    enum class Stage { Step1, Step2, DoubleErasure };
    std::optional<std::size_t> msg1;  // nullopt = erasure
    std::optional<std::size_t> msg2;
    Stage stage = Stage::DoubleErasure;

    bool operator==(const DecodeOutcome&) const = default;
};

// Cloud centers u(m2) with satellites x(m1, m2); every cloud has type P_U and
// every satellite lies in the conditional shell of its cloud, so
// joint_type_of(u(m2), x(m1,m2)) equals the generating joint type exactly.
struct Codebook {
    std::size_t n = 0;
    JointType p_ux{{1, 1}, {1}, 1};               // rank-2 over U x X, denominator n
    std::vector<std::vector<int>> clouds;         // [m2][i]
    std::vector<std::vector<std::vector<int>>> satellites;  // [m2][m1][i]
    std::uint64_t seed = 0;

    std::size_t m1_count() const { return satellites.empty() ? 0 : satellites.front().size(); }
    std::size_t m2_count() const { return clouds.size(); }
    std::size_t u_size() const { return p_ux.sizes()[0]; }
    std::size_t x_size() const { return p_ux.sizes()[1]; }
};

// ceil(2^(n*r)) with a guard so values that are integers up to fp noise do
// not get bumped to the next message count.
std::size_t message_count(std::size_t n, double rate);

// Uniformly random member of the type class (rank-1 type).
std::vector<int> sample_from_type_class(const JointType& type, Rng& rng);

// Uniformly random element of the conditional shell of u under the rank-2
// joint type; throws if the type of u does not match the U-marginal.
std::vector<int> sample_from_shell(const std::vector<int>& u, const JointType& p_ux, Rng& rng);

// message_count(n, r2) clouds, each with message_count(n, r1) satellites.
// Identical (seed, parameters) produce identical codebooks.
Codebook sample_codebook(const JointType& p_ux, double r1, double r2, std::uint64_t seed,
                         std::size_t message_cap = 1u << 20);

// Decoder thresholds. decode_y/decode_z take a validated RateConfig; the
// oracle audit also runs deliberately invalid lambdas through this struct.
struct DecodeThresholds {
    double r12, r12_tilde, lambda12;
    double r2, r2_tilde, lambda2;

    static DecodeThresholds from(const RateConfig& rc) {
        return {rc.r12(), rc.r12_tilde(), rc.lambda12(), rc.r2(), rc.r2_tilde(), rc.lambda2()};
    }
};

// Step 1: output the unique pair whose empirical mutual information clears
// the threshold against every other pair; otherwise Step 2 on the cloud
// centers alone; otherwise erase both. The fast variant computes each pair's
// worst competitor in O(1) from the top-two penalty terms and is outcome-
// identical to the exhaustive variant, which tests all pairs directly.
DecodeOutcome decode_y(const std::vector<int>& y, const Codebook& cb, const RateConfig& rc,
                       std::size_t y_size);
DecodeOutcome decode_y_exhaustive(const std::vector<int>& y, const Codebook& cb,
                                  const RateConfig& rc, std::size_t y_size);

// Single-user rule on the cloud centers (terminal Z).
std::optional<std::size_t> decode_z(const std::vector<int>& z, const Codebook& cb,
                                    const RateConfig& rc, std::size_t z_size);

namespace detail {
// Indices satisfying: mi[i] >= r_tilde + lambda * max_{j != i} |mi[j] - r|+,
// with a 1e-12 floating comparison guard; empty competitor set counts as 0.
std::vector<std::size_t> satisfiers_exhaustive(std::span<const double> mi, double r,
                                               double r_tilde, double lambda);
std::vector<std::size_t> satisfiers_fast(std::span<const double> mi, double r, double r_tilde,
                                         double lambda);
// Empirical MI of every (cloud, satellite) pair against y, index m2*M1+m1.
std::vector<double> pair_empirical_mi(const std::vector<int>& y, const Codebook& cb,
                                      std::size_t y_size);
std::vector<double> cloud_empirical_mi(const std::vector<int>& y, const Codebook& cb,
                                       std::size_t y_size);
DecodeOutcome decode_y_with(const std::vector<int>& y, const Codebook& cb,
                            const DecodeThresholds& th, std::size_t y_size, bool exhaustive);
}  // namespace detail

}  // namespace abcx
