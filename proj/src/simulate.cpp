#include "abcx/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "abcx/parallel.hpp"

namespace abcx {

void TrialTally::merge(const TrialTally& other) {
    trials += other.trials;
    msg1_undetected += other.msg1_undetected;
    msg1_erased += other.msg1_erased;
    msg2_undetected += other.msg2_undetected;
    msg2_erased += other.msg2_erased;
    step1_decoded += other.step1_decoded;
    step2_decoded += other.step2_decoded;
    double_erasure += other.double_erasure;
}

namespace {

std::vector<int> transmit(const std::vector<int>& x, const Channel& w_y, Rng& rng) {
    std::vector<int> y(x.size());
    const std::size_t ny = w_y.out_size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double draw = rng.next_unit();
        auto row = w_y.row(static_cast<std::size_t>(x[i]));
        double acc = 0.0;
        std::size_t sym = ny - 1;
        for (std::size_t yv = 0; yv < ny; ++yv) {
            acc += row[yv];
            if (draw < acc) {
                sym = yv;
                break;
            }
        }
        y[i] = static_cast<int>(sym);
    }
    return y;
}

void classify(const DecodeOutcome& out, std::size_t m1, std::size_t m2, TrialTally& tally) {
    if (out.msg1.has_value()) {
        if (*out.msg1 != m1) ++tally.msg1_undetected;
    } else {
        ++tally.msg1_erased;
    }
    if (out.msg2.has_value()) {
        if (*out.msg2 != m2) ++tally.msg2_undetected;
    } else {
        ++tally.msg2_erased;
    }
    switch (out.stage) {
        case DecodeOutcome::Stage::Step1: ++tally.step1_decoded; break;
        case DecodeOutcome::Stage::Step2: ++tally.step2_decoded; break;
        case DecodeOutcome::Stage::DoubleErasure: ++tally.double_erasure; break;
    }
}

}  // namespace

namespace {

TrialTally run_trials_impl(const JointType* p_ux, const Codebook* shared, const Channel& w_y,
                           const RateConfig& rc, std::int64_t trials, std::uint64_t seed,
                           int threads) {
    if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    const std::size_t y_size = w_y.out_size();
    const std::size_t total = static_cast<std::size_t>(trials);
    std::vector<TrialTally> partials(std::max(1, threads));
    parallel_chunks(total, threads, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
        TrialTally local;
        for (std::size_t t = begin; t < end; ++t) {
            Rng rng(derive_seed(seed, "trial", t));
            std::size_t m1 = 0, m2 = 0;
            const Codebook* cb = shared;
            Codebook fresh;
            if (p_ux != nullptr) {
                fresh = sample_codebook(*p_ux, rc.r1(), rc.r2(),
                                        derive_seed(seed, "trial-codebook", t));
                cb = &fresh;
            } else {
                m1 = static_cast<std::size_t>(rng.next_below(cb->m1_count()));
                m2 = static_cast<std::size_t>(rng.next_below(cb->m2_count()));
            }
            const std::vector<int> y = transmit(cb->satellites[m2][m1], w_y, rng);
            classify(decode_y(y, *cb, rc, y_size), m1, m2, local);
            ++local.trials;
        }
        partials[chunk] = local;
    });

    TrialTally tally;
    tally.seed = seed;
    tally.n = p_ux != nullptr ? static_cast<std::size_t>(p_ux->n()) : shared->n;
    for (const auto& part : partials) tally.merge(part);
    return tally;
}

}  // namespace

TrialTally run_trials(const JointType& p_ux, const Channel& w_y, const RateConfig& rc,
                      std::int64_t trials, std::uint64_t seed, CodebookPolicy policy,
                      int threads) {
    if (p_ux.rank() != 2) throw std::invalid_argument("run_trials: rank-2 joint type expected");
    if (p_ux.sizes()[1] != w_y.in_size()) {
        throw std::invalid_argument("run_trials: channel input must match the X alphabet");
    }
    if (policy == CodebookPolicy::Fixed) {
        const Codebook shared =
            sample_codebook(p_ux, rc.r1(), rc.r2(), derive_seed(seed, "fixed-codebook", 0));
        return run_trials_impl(nullptr, &shared, w_y, rc, trials, seed, threads);
    }
    return run_trials_impl(&p_ux, nullptr, w_y, rc, trials, seed, threads);
}

TrialTally run_trials_fixed(const Codebook& cb, const Channel& w_y, const RateConfig& rc,
                            std::int64_t trials, std::uint64_t seed, int threads) {
    if (cb.x_size() != w_y.in_size()) {
        throw std::invalid_argument("run_trials_fixed: channel input must match the X alphabet");
    }
    return run_trials_impl(nullptr, &cb, w_y, rc, trials, seed, threads);
}

std::pair<double, double> wilson_interval(std::int64_t count, std::int64_t trials, double z) {
    if (trials < 1) throw std::invalid_argument("wilson_interval: trials must be >= 1");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(count) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

ProbEstimate estimate(std::int64_t count, std::int64_t trials) {
    ProbEstimate e;
    e.count = count;
    e.trials = trials;
    e.p = static_cast<double>(count) / static_cast<double>(trials);
    if (count == 0) {
        e.lo = 0.0;
        e.hi = std::min(1.0, 3.0 / static_cast<double>(trials));  // rule of three
    } else {
        std::tie(e.lo, e.hi) = wilson_interval(count, trials, 1.959963984540054);
    }
    return e;
}

}  // namespace

ErrorEstimates estimate_error_probs(const TrialTally& tally) {
    if (tally.trials < 1) throw std::invalid_argument("estimate_error_probs: empty tally");
    ErrorEstimates est;
    est.e1_undetected = estimate(tally.msg1_undetected, tally.trials);
    est.e1_total = estimate(tally.msg1_undetected + tally.msg1_erased, tally.trials);
    est.e2_undetected = estimate(tally.msg2_undetected, tally.trials);
    est.e2_total = estimate(tally.msg2_undetected + tally.msg2_erased, tally.trials);
    return est;
}

ExponentFit fit_exponent(const std::vector<std::pair<std::size_t, double>>& estimates) {
    ExponentFit fit;
    for (const auto& [n, p] : estimates) {
        if (p > 0.0) fit.points.emplace_back(n, p);
    }
    if (fit.points.size() < 3) return fit;
    for (std::size_t i = 1; i < fit.points.size(); ++i) {
        if (fit.points[i].first <= fit.points[i - 1].first) {
            throw std::invalid_argument("fit_exponent: blocklengths must be strictly increasing");
        }
    }
    const double m = static_cast<double>(fit.points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [n, p] : fit.points) {
        const double x = static_cast<double>(n);
        const double y = -std::log2(p);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    for (const auto& [n, p] : fit.points) {
        fit.residuals.push_back(-std::log2(p) - (fit.slope * static_cast<double>(n) + fit.intercept));
    }
    fit.valid = true;
    return fit;
}

ExponentFit empirical_exponent(const std::vector<TrialTally>& series, ErrorMetric metric) {
    std::vector<std::pair<std::size_t, double>> points;
    for (const auto& tally : series) {
        const ErrorEstimates est = estimate_error_probs(tally);
        double p = 0.0;
        switch (metric) {
            case ErrorMetric::Msg1Total: p = est.e1_total.p; break;
            case ErrorMetric::Msg1Undetected: p = est.e1_undetected.p; break;
            case ErrorMetric::Msg2Total: p = est.e2_total.p; break;
            case ErrorMetric::Msg2Undetected: p = est.e2_undetected.p; break;
        }
        points.emplace_back(tally.n, p);
    }
    return fit_exponent(points);
}

JointType quantize_to_type(const UxDist& target, std::size_t n) {
    if (n < 1) throw std::invalid_argument("quantize_to_type: n must be >= 1");
    const auto& p = target.joint().probs();
    const std::size_t cells = p.size();
    std::vector<std::int64_t> counts(cells);
    std::vector<double> frac(cells);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double scaled = p[i] * static_cast<double>(n);
        counts[i] = static_cast<std::int64_t>(std::floor(scaled));
        frac[i] = scaled - std::floor(scaled);
        assigned += counts[i];
    }
    std::int64_t remaining = static_cast<std::int64_t>(n) - assigned;
    std::vector<std::size_t> order(cells);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (frac[a] != frac[b]) return frac[a] > frac[b];
        const bool a_zero = counts[a] == 0 && p[a] > 0.0;
        const bool b_zero = counts[b] == 0 && p[b] > 0.0;
        if (a_zero != b_zero) return a_zero;  // ties toward larger joint support
        return a < b;
    });
    for (std::size_t i = 0; remaining > 0; i = (i + 1) % cells) {
        ++counts[order[i]];
        --remaining;
    }
    return JointType({target.u_size(), target.x_size()}, std::move(counts),
                     static_cast<std::int64_t>(n));
}

}  // namespace abcx
