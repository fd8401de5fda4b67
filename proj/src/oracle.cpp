#include "abcx/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "abcx/info.hpp"

namespace abcx {

namespace {

struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

double pow_size(std::size_t base, std::size_t exp) {
    double v = 1.0;
    for (std::size_t i = 0; i < exp; ++i) v *= static_cast<double>(base);
    return v;
}

}  // namespace

ExactErrorProbs exact_error_probs(const Codebook& cb, const Channel& w_y, const RateConfig& rc,
                                  std::size_t sent_m1, std::size_t sent_m2,
                                  const OracleBudget& budget) {
    if (sent_m1 >= cb.m1_count() || sent_m2 >= cb.m2_count()) {
        throw std::invalid_argument("exact_error_probs: transmitted message out of range");
    }
    const std::size_t ny = w_y.out_size();
    if (pow_size(ny, cb.n) > static_cast<double>(budget.max_outputs)) {
        throw std::invalid_argument("exact_error_probs: output space exceeds the oracle budget");
    }
    const std::vector<int>& x = cb.satellites[sent_m2][sent_m1];
    const DecodeThresholds th = DecodeThresholds::from(rc);

    std::array<std::array<Kahan, 3>, 3> acc{};
    std::vector<int> y(cb.n, 0);
    // mixed-radix walk over Y^n, last position fastest
    for (;;) {
        double prob = 1.0;
        for (std::size_t i = 0; i < cb.n; ++i) {
            prob *= w_y(static_cast<std::size_t>(x[i]), static_cast<std::size_t>(y[i]));
        }
        if (prob > 0.0) {
            const DecodeOutcome out = detail::decode_y_with(y, cb, th, ny, /*exhaustive=*/true);
            const int s1 = out.msg1.has_value() ? (*out.msg1 == sent_m1 ? 0 : 1) : 2;
            const int s2 = out.msg2.has_value() ? (*out.msg2 == sent_m2 ? 0 : 1) : 2;
            acc[static_cast<std::size_t>(s1)][static_cast<std::size_t>(s2)].add(prob);
        }
        std::size_t i = cb.n;
        for (;;) {
            if (i == 0) goto done;
            --i;
            if (++y[i] < static_cast<int>(ny)) break;
            y[i] = 0;
        }
    }
done:
    ExactErrorProbs out;
    Kahan total;
    for (int s1 = 0; s1 < 3; ++s1) {
        for (int s2 = 0; s2 < 3; ++s2) {
            const double m = acc[static_cast<std::size_t>(s1)][static_cast<std::size_t>(s2)].sum;
            out.mass[static_cast<std::size_t>(s1)][static_cast<std::size_t>(s2)] = m;
            total.add(m);
            if (s1 != 0) out.e1_total += m;
            if (s1 == 1) out.e1_undetected += m;
            if (s2 != 0) out.e2_total += m;
            if (s2 == 1) out.e2_undetected += m;
        }
    }
    out.total_mass = total.sum;
    return out;
}

ExactErrorProbs exact_error_probs_avg(const Codebook& cb, const Channel& w_y,
                                      const RateConfig& rc, const OracleBudget& budget) {
    ExactErrorProbs avg;
    const double scale = 1.0 / static_cast<double>(cb.m1_count() * cb.m2_count());
    for (std::size_t m2 = 0; m2 < cb.m2_count(); ++m2) {
        for (std::size_t m1 = 0; m1 < cb.m1_count(); ++m1) {
            const ExactErrorProbs one = exact_error_probs(cb, w_y, rc, m1, m2, budget);
            avg.e1_total += scale * one.e1_total;
            avg.e1_undetected += scale * one.e1_undetected;
            avg.e2_total += scale * one.e2_total;
            avg.e2_undetected += scale * one.e2_undetected;
            for (std::size_t a = 0; a < 3; ++a) {
                for (std::size_t b = 0; b < 3; ++b) avg.mass[a][b] += scale * one.mass[a][b];
            }
            avg.total_mass += scale * one.total_mass;
        }
    }
    return avg;
}

namespace {

// Precomputed per-row grid statistics: the composition rows over the full
// output simplex with their weighted divergence and entropy contributions.
struct RowOptions {
    std::vector<double> probs;  // option-major, each of length cols
    std::vector<double> d_term;  // weight * KL(row || ref_row), may be +inf
    std::vector<double> h_term;  // weight * H(row)
    std::size_t count = 0;
};

RowOptions build_row_options(std::span<const double> ref_row, double weight, std::size_t cols,
                             std::int64_t k) {
    RowOptions opt;
    for_each_composition(k, cols, [&](std::span<const std::int64_t> comp) {
        double d = 0.0, h = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double p = static_cast<double>(comp[c]) / static_cast<double>(k);
            opt.probs.push_back(p);
            if (p > 0.0) {
                h -= p * std::log2(p);
                if (ref_row[c] <= 0.0) {
                    d = kInf;
                } else if (d != kInf) {
                    d += p * std::log2(p / ref_row[c]);
                }
            }
        }
        opt.d_term.push_back(weight * d);
        opt.h_term.push_back(weight * h);
        ++opt.count;
    });
    return opt;
}

}  // namespace

double grid_exponent(GridObjective objective, const GridParams& params, const UxDist& p_ux,
                     const Channel& w_y, std::int64_t k, const OracleBudget& budget) {
    if (k < 1) throw std::invalid_argument("grid_exponent: k must be >= 1");
    const bool marginal = objective == GridObjective::Marginal;
    const std::size_t nu = p_ux.u_size();
    const std::size_t nx = p_ux.x_size();
    const std::size_t rows = marginal ? nu : nu * nx;
    const std::size_t cols = w_y.out_size();

    const Channel ref = marginal ? induced_u_channel(lift_to_ux(w_y, nu), p_ux)
                                 : lift_to_ux(w_y, nu);
    const std::vector<double> weights = marginal ? p_ux.marginal_u() : p_ux.joint().probs();

    std::vector<RowOptions> options(rows);
    double total_points = 1.0;
    for (std::size_t r = 0; r < rows; ++r) {
        options[r] = build_row_options(ref.row(r), weights[r], cols, k);
        total_points *= static_cast<double>(options[r].count);
    }
    if (total_points > static_cast<double>(budget.max_grid_points)) {
        throw std::invalid_argument("grid_exponent: grid size exceeds the oracle budget");
    }

    const std::vector<double>& p_u = p_ux.marginal_u();
    const std::vector<double>& x_given_u = p_ux.x_given_u().flat();
    const double r12 = params.r1 + params.r2;

    // Depth-incremental sums: divergence, conditional entropy, and the output
    // marginal, extended one row per level.
    std::vector<double> d_at(rows + 1, 0.0), h_at(rows + 1, 0.0);
    std::vector<double> q_at((rows + 1) * cols, 0.0);
    std::vector<std::size_t> pick(rows, 0);
    std::vector<double> vu(marginal ? 0 : nu * cols);

    double best = kInf;
    std::size_t depth = 0;
    for (;;) {
        if (depth == rows) {
            const double d = d_at[rows];
            if (d != kInf) {
                const double* q = q_at.data() + rows * cols;
                const double h_out = entropy_bits({q, cols});
                const double mi = std::max(0.0, h_out - h_at[rows]);
                double value = kInf;
                switch (objective) {
                    case GridObjective::Marginal:
                        value = d + params.lambda * positive_part(mi - params.r2);
                        break;
                    case GridObjective::Joint:
                        value = d + params.lambda * positive_part(mi - r12);
                        break;
                    case GridObjective::Penalized: {
                        std::fill(vu.begin(), vu.end(), 0.0);
                        double h_u = 0.0;
                        for (std::size_t u = 0; u < nu; ++u) {
                            for (std::size_t x = 0; x < nx; ++x) {
                                const double px = x_given_u[u * nx + x];
                                if (px <= 0.0) continue;
                                const double* row =
                                    options[u * nx + x].probs.data() + pick[u * nx + x] * cols;
                                for (std::size_t y = 0; y < cols; ++y) vu[u * cols + y] += px * row[y];
                            }
                            h_u += p_u[u] * entropy_bits({vu.data() + u * cols, cols});
                        }
                        const double mi_u = std::max(0.0, h_out - h_u);
                        value = d + params.lambda * positive_part(mi - r12) -
                                positive_part(mi_u - params.r2_pen);
                        break;
                    }
                    case GridObjective::SpherePacking:
                        value = (mi <= params.r_cap + 1e-12) ? d : kInf;
                        break;
                }
                if (value < best) best = value;
            }
            // step the odometer
            std::size_t r = rows;
            for (;;) {
                if (r == 0) return best;
                --r;
                if (++pick[r] < options[r].count) break;
                pick[r] = 0;
            }
            depth = r;
        }
        // extend partial sums through row `depth`
        const RowOptions& opt = options[depth];
        const std::size_t i = pick[depth];
        d_at[depth + 1] = d_at[depth] + opt.d_term[i];
        h_at[depth + 1] = h_at[depth] + opt.h_term[i];
        const double* row = opt.probs.data() + i * cols;
        const double* q_prev = q_at.data() + depth * cols;
        double* q_next = q_at.data() + (depth + 1) * cols;
        const double weight = weights[depth];
        for (std::size_t c = 0; c < cols; ++c) q_next[c] = q_prev[c] + weight * row[c];
        ++depth;
    }
}

AuditResult unambiguity_audit(const Codebook& cb, const DecodeThresholds& th, std::size_t y_size,
                              const OracleBudget& budget) {
    if (pow_size(y_size, cb.n) > static_cast<double>(budget.max_outputs)) {
        throw std::invalid_argument("unambiguity_audit: output space exceeds the oracle budget");
    }
    AuditResult result;
    std::vector<int> y(cb.n, 0);
    for (;;) {
        ++result.outputs_checked;
        const auto pair_mi = detail::pair_empirical_mi(y, cb, y_size);
        const auto sat1 = detail::satisfiers_exhaustive(pair_mi, th.r12, th.r12_tilde, th.lambda12);
        const auto cloud_mi = detail::cloud_empirical_mi(y, cb, y_size);
        const auto sat2 = detail::satisfiers_exhaustive(cloud_mi, th.r2, th.r2_tilde, th.lambda2);
        if (result.unambiguous && (sat1.size() > 1 || sat2.size() > 1)) {
            result.unambiguous = false;
            result.witness_y = y;
            result.witness_satisfiers = static_cast<int>(std::max(sat1.size(), sat2.size()));
            result.witness_step = sat1.size() > 1 ? 1 : 2;
        }
        if (result.fast_matches_exhaustive) {
            const DecodeOutcome fast = detail::decode_y_with(y, cb, th, y_size, false);
            const DecodeOutcome slow = detail::decode_y_with(y, cb, th, y_size, true);
            if (!(fast == slow)) {
                result.fast_matches_exhaustive = false;
                if (result.witness_y.empty()) result.witness_y = y;
            }
        }
        std::size_t i = cb.n;
        for (;;) {
            if (i == 0) return result;
            --i;
            if (++y[i] < static_cast<int>(y_size)) break;
            y[i] = 0;
        }
    }
}

}  // namespace abcx
