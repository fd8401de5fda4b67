#include "abcx/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace abcx {

RateConfig::RateConfig(double r1, double r2, double r1_tilde, double r2_tilde, double lambda12,
                       double lambda2)
    : r1_(r1), r2_(r2), r1_tilde_(r1_tilde), r2_tilde_(r2_tilde), lambda12_(lambda12),
      lambda2_(lambda2) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(r1) || !finite(r2) || !finite(r1_tilde) || !finite(r2_tilde) ||
        !finite(lambda12) || !finite(lambda2)) {
        throw std::invalid_argument("RateConfig: all fields must be finite");
    }
    if (r1 < 0.0 || r2 < 0.0) throw std::invalid_argument("RateConfig: rates must be >= 0");
    if (r1_tilde < r1) throw std::invalid_argument("RateConfig: R1~ must be >= R1");
    if (r2_tilde < r2) throw std::invalid_argument("RateConfig: R2~ must be >= R2");
    if (lambda12 < 1.0) throw std::invalid_argument("RateConfig: lambda12 must be >= 1");
    if (lambda2 < 1.0) throw std::invalid_argument("RateConfig: lambda2 must be >= 1");
}

double j_joint(const Channel& v, const UxDist& p_ux, double r12) {
    if (v.in_size() != p_ux.u_size() * p_ux.x_size()) {
        throw std::invalid_argument("j_joint: channel input must be U x X");
    }
    return positive_part(mutual_information(p_ux.joint(), v) - r12);
}

double j_marginal(const Channel& v_hat, const Distribution& p_u, double r2) {
    if (v_hat.in_size() != p_u.size()) throw std::invalid_argument("j_marginal: alphabet mismatch");
    return positive_part(mutual_information(p_u, v_hat) - r2);
}

Channel induced_u_channel(const Channel& v, const UxDist& p_ux) {
    const std::size_t nu = p_ux.u_size();
    const std::size_t nx = p_ux.x_size();
    const std::size_t ny = v.out_size();
    if (v.in_size() != nu * nx) {
        throw std::invalid_argument("induced_u_channel: channel input must be U x X");
    }
    std::vector<std::vector<double>> rows(nu, std::vector<double>(ny, 0.0));
    for (std::size_t u = 0; u < nu; ++u) {
        if (p_ux.marginal_u()[u] > 0.0) {
            for (std::size_t x = 0; x < nx; ++x) {
                const double px = p_ux.x_given_u()(u, x);
                if (px <= 0.0) continue;
                for (std::size_t y = 0; y < ny; ++y) rows[u][y] += px * v(u * nx + x, y);
            }
        } else {
            for (std::size_t y = 0; y < ny; ++y) rows[u][y] = 1.0 / static_cast<double>(ny);
        }
    }
    return Channel(Alphabet(nu), Alphabet(ny), std::move(rows));
}

Channel lift_to_ux(const Channel& w_y, std::size_t u_size) {
    std::vector<std::vector<double>> rows;
    rows.reserve(u_size * w_y.in_size());
    for (std::size_t u = 0; u < u_size; ++u) {
        for (std::size_t x = 0; x < w_y.in_size(); ++x) {
            auto r = w_y.row(x);
            rows.emplace_back(r.begin(), r.end());
        }
    }
    return Channel(Alphabet(u_size * w_y.in_size()), Alphabet(w_y.out_size()), std::move(rows));
}

namespace {

struct MinProblem {
    std::size_t rows = 0, cols = 0;
    std::vector<double> weights;  // one per row; weight-0 rows are pinned to ref
    std::vector<double> ref;      // reference channel, flat
    std::function<double(std::span<const double>)> objective;
    std::function<bool(std::span<const double>)> feasible;  // null = unconstrained
};

constexpr long kGridCap = 3'000'000;

// Coarse grid over the support cells of ref, then multi-start coordinate
// descent with shrinking steps projected onto the per-row simplex.
SolveResult minimize_over_channel(const MinProblem& prob, const SolverSettings& st) {
    const std::size_t rows = prob.rows, cols = prob.cols;
    std::vector<std::vector<std::size_t>> support(rows);
    std::vector<std::size_t> free_rows;
    for (std::size_t r = 0; r < rows; ++r) {
        if (prob.weights[r] <= 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) {
            if (prob.ref[r * cols + c] > 0.0) support[r].push_back(c);
        }
        free_rows.push_back(r);
    }

    // Shrink the grid resolution when the full product would be oversized;
    // the descent phase recovers the accuracy.
    int k = std::max(2, st.grid_k);
    auto grid_total = [&](int kk) {
        double total = 1.0;
        for (std::size_t r : free_rows) {
            const std::size_t m = support[r].size();
            double opts = 1.0;  // compositions of kk into m parts = C(kk+m-1, m-1)
            for (std::size_t i = 1; i < m; ++i) {
                opts = opts * static_cast<double>(kk + static_cast<int>(i)) / static_cast<double>(i);
            }
            total *= opts;
            if (total > 1e18) return 1e18;
        }
        return total;
    };
    while (k > 2 && grid_total(k) > static_cast<double>(kGridCap)) {
        k = std::max(2, (2 * k) / 3);
    }

    // Per-row grid options over the support cells.
    std::vector<std::vector<std::vector<double>>> options(rows);
    for (std::size_t r : free_rows) {
        const std::size_t m = support[r].size();
        for_each_composition(k, m, [&](std::span<const std::int64_t> comp) {
            std::vector<double> row(cols, 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                row[support[r][j]] = static_cast<double>(comp[j]) / static_cast<double>(k);
            }
            options[r].push_back(std::move(row));
        });
    }

    std::vector<double> point(prob.ref);
    struct Start {
        double value;
        long order;
        std::vector<double> flat;
    };
    std::vector<Start> starts;
    const std::size_t max_starts = static_cast<std::size_t>(std::max(1, st.starts));
    auto offer_start = [&](double value, long order, const std::vector<double>& flat) {
        if (!std::isfinite(value)) return;
        if (starts.size() == max_starts && value >= starts.back().value) return;
        auto pos = std::upper_bound(starts.begin(), starts.end(), value,
                                    [](double v, const Start& s) { return v < s.value; });
        starts.insert(pos, Start{value, order, flat});
        if (starts.size() > max_starts) starts.pop_back();
    };

    long grid_points = 0;
    if (!free_rows.empty()) {
        std::vector<std::size_t> pick(free_rows.size(), 0);
        for (std::size_t i = 0; i < free_rows.size(); ++i) {
            const std::size_t r = free_rows[i];
            const auto& row = options[r][0];
            std::copy(row.begin(), row.end(), point.begin() + static_cast<std::ptrdiff_t>(r * cols));
        }
        bool done = false;
        while (!done) {
            ++grid_points;
            if (!prob.feasible || prob.feasible(point)) {
                offer_start(prob.objective(point), grid_points, point);
            }
            std::size_t i = free_rows.size();
            for (;;) {
                if (i == 0) {
                    done = true;
                    break;
                }
                --i;
                const std::size_t r = free_rows[i];
                if (++pick[i] < options[r].size()) {
                    const auto& row = options[r][pick[i]];
                    std::copy(row.begin(), row.end(),
                              point.begin() + static_cast<std::ptrdiff_t>(r * cols));
                    break;
                }
                pick[i] = 0;
                const auto& row = options[r][0];
                std::copy(row.begin(), row.end(),
                          point.begin() + static_cast<std::ptrdiff_t>(r * cols));
            }
        }
    } else {
        ++grid_points;
        if (!prob.feasible || prob.feasible(point)) {
            offer_start(prob.objective(point), 1, point);
        }
    }

    // The reference channel itself is the canonical start (it need not lie on
    // the grid lattice).
    std::vector<Start> all_starts;
    if (!prob.feasible || prob.feasible(prob.ref)) {
        all_starts.push_back(Start{prob.objective(prob.ref), 0, prob.ref});
    }
    for (auto& s : starts) all_starts.push_back(std::move(s));

    SolveResult result;
    result.rows = rows;
    result.cols = cols;
    result.grid_points = grid_points;
    result.grid_k = k;
    if (all_starts.empty()) {
        // Nothing feasible anywhere (constrained problems only).
        result.value = kInf;
        result.argmin = prob.ref;
        return result;
    }

    double best_value = kInf;
    std::vector<double> best_flat;
    int total_moves = 0;
    std::vector<double> cand;
    for (const auto& start : all_starts) {
        std::vector<double> cur = start.flat;
        double f_cur = start.value;
        double step = 1.0 / static_cast<double>(k);
        for (int iter = 0; iter < st.descent_steps; ++iter) {
            double f_move = f_cur;
            std::vector<double> move_flat;
            for (std::size_t r : free_rows) {
                const auto& sup = support[r];
                if (sup.size() < 2) continue;
                for (std::size_t a : sup) {
                    const double avail = cur[r * cols + a];
                    if (avail <= 0.0) continue;
                    const double amount = std::min(step, avail);
                    for (std::size_t b : sup) {
                        if (b == a) continue;
                        cand = cur;
                        cand[r * cols + a] -= amount;
                        cand[r * cols + b] += amount;
                        if (prob.feasible && !prob.feasible(cand)) continue;
                        const double f = prob.objective(cand);
                        if (f < f_move - 1e-15) {
                            f_move = f;
                            move_flat = cand;
                        }
                    }
                }
            }
            if (!move_flat.empty()) {
                cur = std::move(move_flat);
                f_cur = f_move;
                ++total_moves;
            } else {
                step *= st.shrink;
                if (step < 1e-12) break;
            }
        }
        if (f_cur < best_value) {
            best_value = f_cur;
            best_flat = std::move(cur);
        }
    }
    result.value = best_value;
    result.argmin = std::move(best_flat);
    result.descent_iters = total_moves;
    return result;
}

}  // namespace

SolveResult exponent_marginal(double lambda, double r2_arg, const UxDist& p_ux,
                              const Channel& w_y, const SolverSettings& settings) {
    if (!(lambda > 0.0)) throw std::invalid_argument("exponent_marginal: lambda must be > 0");
    const Channel w_yu = induced_u_channel(lift_to_ux(w_y, p_ux.u_size()), p_ux);
    const std::size_t rows = p_ux.u_size();
    const std::size_t cols = w_y.out_size();
    MinProblem prob;
    prob.rows = rows;
    prob.cols = cols;
    prob.weights = p_ux.marginal_u();
    prob.ref = w_yu.flat();
    const std::vector<double> weights = prob.weights;
    const std::vector<double> ref = prob.ref;
    prob.objective = [=](std::span<const double> v) {
        const double d = kernel::conditional_kl_flat(v, ref, weights, rows, cols);
        const double mi = kernel::mutual_information_flat(weights, v, rows, cols);
        return d + lambda * positive_part(mi - r2_arg);
    };
    return minimize_over_channel(prob, settings);
}

namespace {

MinProblem joint_problem(const UxDist& p_ux, const Channel& w_y) {
    MinProblem prob;
    prob.rows = p_ux.u_size() * p_ux.x_size();
    prob.cols = w_y.out_size();
    prob.weights = p_ux.joint().probs();
    prob.ref = lift_to_ux(w_y, p_ux.u_size()).flat();
    return prob;
}

}  // namespace

SolveResult exponent_joint(double lambda, double r1_arg, double r2_arg, const UxDist& p_ux,
                           const Channel& w_y, const SolverSettings& settings) {
    if (!(lambda > 0.0)) throw std::invalid_argument("exponent_joint: lambda must be > 0");
    MinProblem prob = joint_problem(p_ux, w_y);
    const std::size_t rows = prob.rows, cols = prob.cols;
    const std::vector<double> weights = prob.weights;
    const std::vector<double> ref = prob.ref;
    const double r12 = r1_arg + r2_arg;
    prob.objective = [=](std::span<const double> v) {
        const double d = kernel::conditional_kl_flat(v, ref, weights, rows, cols);
        const double mi = kernel::mutual_information_flat(weights, v, rows, cols);
        return d + lambda * positive_part(mi - r12);
    };
    return minimize_over_channel(prob, settings);
}

SolveResult exponent_penalized(double lambda, double r1_arg, double r2_arg, double r2_pen,
                               const UxDist& p_ux, const Channel& w_y,
                               const SolverSettings& settings) {
    if (!(lambda > 0.0)) throw std::invalid_argument("exponent_penalized: lambda must be > 0");
    MinProblem prob = joint_problem(p_ux, w_y);
    const std::size_t rows = prob.rows, cols = prob.cols;
    const std::size_t nu = p_ux.u_size();
    const std::size_t nx = p_ux.x_size();
    const std::vector<double> weights = prob.weights;
    const std::vector<double> ref = prob.ref;
    const std::vector<double> p_u = p_ux.marginal_u();
    const std::vector<double> x_given_u = p_ux.x_given_u().flat();
    const double r12 = r1_arg + r2_arg;
    auto induced = std::make_shared<std::vector<double>>(nu * cols);
    prob.objective = [=](std::span<const double> v) {
        const double d = kernel::conditional_kl_flat(v, ref, weights, rows, cols);
        const double mi = kernel::mutual_information_flat(weights, v, rows, cols);
        auto& vu = *induced;
        std::fill(vu.begin(), vu.end(), 0.0);
        for (std::size_t u = 0; u < nu; ++u) {
            for (std::size_t x = 0; x < nx; ++x) {
                const double px = x_given_u[u * nx + x];
                if (px <= 0.0) continue;
                const double* vr = v.data() + (u * nx + x) * cols;
                for (std::size_t y = 0; y < cols; ++y) vu[u * cols + y] += px * vr[y];
            }
        }
        const double mi_u = kernel::mutual_information_flat(p_u, vu, nu, cols);
        return d + lambda * positive_part(mi - r12) - positive_part(mi_u - r2_pen);
    };
    return minimize_over_channel(prob, settings);
}

SolveResult sphere_packing(double r_cap, const UxDist& p_ux, const Channel& w_y,
                           const SolverSettings& settings) {
    if (r_cap < 0.0) throw std::invalid_argument("sphere_packing: rate must be >= 0");
    MinProblem prob = joint_problem(p_ux, w_y);
    const std::size_t rows = prob.rows, cols = prob.cols;
    const std::vector<double> weights = prob.weights;
    const std::vector<double> ref = prob.ref;
    prob.objective = [=](std::span<const double> v) {
        return kernel::conditional_kl_flat(v, ref, weights, rows, cols);
    };
    prob.feasible = [=](std::span<const double> v) {
        return kernel::mutual_information_flat(weights, v, rows, cols) <= r_cap + 1e-12;
    };
    return minimize_over_channel(prob, settings);
}

ExponentReport theorem_bounds(const RateConfig& rc, const UxDist& p_ux, const Channel& w_y,
                              const SolverSettings& settings) {
    ExponentReport rep;
    rep.delta2 = rc.delta2();
    rep.delta12 = rc.delta12();
    rep.pen_low = exponent_penalized(1.0 / rc.lambda12(), rc.r1_tilde(), rc.r2_tilde(), rc.r2(),
                                     p_ux, w_y, settings);
    rep.pen_high =
        exponent_penalized(rc.lambda12(), rc.r1(), rc.r2(), rc.r2(), p_ux, w_y, settings);
    rep.joint_low = exponent_joint(rc.lambda12(), rc.r1(), rc.r2(), p_ux, w_y, settings);
    rep.marg_low = exponent_marginal(1.0 / rc.lambda2(), rc.r2_tilde(), p_ux, w_y, settings);
    rep.marg_high = exponent_marginal(rc.lambda2(), rc.r2(), p_ux, w_y, settings);
    recombine_bounds(rep);
    return rep;
}

void recombine_bounds(ExponentReport& rep) {
    rep.e1_bound = positive_part(rep.pen_low.value);
    rep.e1hat_bound = positive_part(rep.pen_high.value + rep.delta12);
    rep.e2_bound = positive_part(std::min(rep.joint_low.value + rep.delta12,
                                          std::max(rep.pen_low.value, rep.marg_low.value)));
    rep.e2hat_bound =
        positive_part(std::min(rep.joint_low.value + rep.delta12,
                               std::max(rep.pen_low.value, rep.marg_high.value + rep.delta2)));
}

RegionCheck rate_region_check(const UxDist& p_ux, const Channel& w_y, const Channel& w_z,
                              double r1, double r2) {
    RegionCheck out;
    const Channel lifted_y = lift_to_ux(w_y, p_ux.u_size());
    out.i_xy_given_u = conditional_mutual_information(p_ux, lifted_y);
    const Channel u_to_z = induced_u_channel(lift_to_ux(w_z, p_ux.u_size()), p_ux);
    out.i_uz = mutual_information(p_ux.marginal_u_dist(), u_to_z);
    out.i_xy = mutual_information(p_ux.marginal_x_dist(), w_y);
    out.slack_r1 = out.i_xy_given_u - r1;
    out.slack_r2 = out.i_uz - r2;
    out.slack_sum = out.i_xy - r1 - r2;
    out.inside = out.slack_r1 >= 0.0 && out.slack_r2 >= 0.0 && out.slack_sum >= 0.0;
    return out;
}

}  // namespace abcx
