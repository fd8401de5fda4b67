#include "abcx/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "abcx/config.hpp"
#include "abcx/parallel.hpp"
#include "abcx/rng.hpp"

namespace abcx {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_flat(const std::vector<double>& flat, std::size_t cols) {
    std::string out;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        if (i > 0) out += (i % cols == 0) ? ';' : ',';
        out += fmt(flat[i]);
    }
    return out;
}

struct Loaded {
    RunConfig config;
    fs::path out;
};

Loaded load(const RunOptions& options) {
    RunConfig config = load_config(options.config_path);
    if (options.out_dir) config.out_dir = *options.out_dir;
    if (options.seed_override && config.simulation) {
        config.simulation->seed = *options.seed_override;
    }
    fs::path out(config.out_dir);
    fs::create_directories(out);
    return Loaded{std::move(config), std::move(out)};
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

void append_solve(std::ostringstream& os, const std::string& name, const SolveResult& s) {
    os << name << "_bits = " << fmt(s.value) << "\n";
    os << name << "_grid_k = " << s.grid_k << "\n";
    os << name << "_grid_points = " << s.grid_points << "\n";
    os << name << "_descent_moves = " << s.descent_iters << "\n";
    os << name << "_argmin = " << fmt_flat(s.argmin, s.cols) << "\n";
}

std::string exponent_report_text(const RunConfig& config, const ExponentReport& rep) {
    std::ostringstream os;
    os << "command = exponents\n";
    os << "unit = bits\n";
    os << "penalty_marginal = induced\n";  // J(R2) penalty taken on the U-channel induced by V
    os << "r1 = " << fmt(config.rates.r1()) << "\n";
    os << "r2 = " << fmt(config.rates.r2()) << "\n";
    os << "r1_tilde = " << fmt(config.rates.r1_tilde()) << "\n";
    os << "r2_tilde = " << fmt(config.rates.r2_tilde()) << "\n";
    os << "lambda12 = " << fmt(config.rates.lambda12()) << "\n";
    os << "lambda2 = " << fmt(config.rates.lambda2()) << "\n";
    os << "delta12_bits = " << fmt(rep.delta12) << "\n";
    os << "delta2_bits = " << fmt(rep.delta2) << "\n";
    os << "e1_bound_bits = " << fmt(rep.e1_bound) << "\n";
    os << "e1hat_bound_bits = " << fmt(rep.e1hat_bound) << "\n";
    os << "e2_bound_bits = " << fmt(rep.e2_bound) << "\n";
    os << "e2hat_bound_bits = " << fmt(rep.e2hat_bound) << "\n";
    append_solve(os, "pen_low", rep.pen_low);
    append_solve(os, "pen_high", rep.pen_high);
    append_solve(os, "joint_low", rep.joint_low);
    append_solve(os, "marg_low", rep.marg_low);
    append_solve(os, "marg_high", rep.marg_high);
    return os.str();
}

double output_space(std::size_t y_size, std::size_t n) {
    double v = 1.0;
    for (std::size_t i = 0; i < n; ++i) v *= static_cast<double>(y_size);
    return v;
}

}  // namespace

int cmd_exponents(const RunOptions& options) {
    try {
        Loaded loaded = load(options);
        const ExponentReport rep =
            theorem_bounds(loaded.config.rates, loaded.config.p_ux, loaded.config.w_y,
                           loaded.config.solver);
        write_file(loaded.out / "exponents.txt", exponent_report_text(loaded.config, rep));
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "exponents: " << e.what() << "\n";
        return kExitConfig;
    }
}

namespace {

const char* kSimulateHeader =
    "n[symbols]\ttrials[count]\tm1[count]\tm2[count]"
    "\tmsg1_undetected[count]\tmsg1_erased[count]\tmsg2_undetected[count]\tmsg2_erased[count]"
    "\tstep1[count]\tstep2[count]\tdouble_erasure[count]"
    "\te1_total[prob]\te1_total_lo[prob]\te1_total_hi[prob]"
    "\te1_und[prob]\te1_und_lo[prob]\te1_und_hi[prob]"
    "\te2_total[prob]\te2_total_lo[prob]\te2_total_hi[prob]"
    "\te2_und[prob]\te2_und_lo[prob]\te2_und_hi[prob]"
    "\texact_e1_total[prob]\texact_e1_und[prob]\texact_e2_total[prob]\texact_e2_und[prob]\n";

void append_estimate(std::ostringstream& os, const ProbEstimate& e) {
    os << "\t" << fmt(e.p) << "\t" << fmt(e.lo) << "\t" << fmt(e.hi);
}

void append_fit(std::ostringstream& os, const char* name, const ExponentFit& fit) {
    os << name << "_fit_valid = " << (fit.valid ? "true" : "false") << "\n";
    if (fit.valid) {
        os << name << "_slope_bits_per_symbol = " << fmt(fit.slope) << "\n";
        os << name << "_intercept_bits = " << fmt(fit.intercept) << "\n";
        std::string res;
        for (std::size_t i = 0; i < fit.residuals.size(); ++i) {
            if (i > 0) res += ",";
            res += fmt(fit.residuals[i]);
        }
        os << name << "_residuals_bits = " << res << "\n";
    }
}

}  // namespace

int cmd_simulate(const RunOptions& options) {
    try {
        Loaded loaded = load(options);
        const RunConfig& config = loaded.config;
        if (!config.simulation) throw ConfigError("simulation: section required for simulate");
        const SimulationSettings& sim = *config.simulation;
        const std::size_t y_size = config.w_y.out_size();

        std::ostringstream data;
        data << kSimulateHeader;
        std::vector<TrialTally> tallies;
        for (std::size_t n : sim.blocklengths) {
            const JointType type = quantize_to_type(config.p_ux, n);
            const TrialTally tally = run_trials(type, config.w_y, config.rates, sim.trials,
                                                sim.seed, sim.policy, options.threads);
            tallies.push_back(tally);
            const ErrorEstimates est = estimate_error_probs(tally);
            const Codebook cb = sample_codebook(type, config.rates.r1(), config.rates.r2(),
                                                derive_seed(sim.seed, "fixed-codebook", 0));
            data << n << "\t" << tally.trials << "\t" << cb.m1_count() << "\t" << cb.m2_count()
                 << "\t" << tally.msg1_undetected << "\t" << tally.msg1_erased << "\t"
                 << tally.msg2_undetected << "\t" << tally.msg2_erased << "\t"
                 << tally.step1_decoded << "\t" << tally.step2_decoded << "\t"
                 << tally.double_erasure;
            append_estimate(data, est.e1_total);
            append_estimate(data, est.e1_undetected);
            append_estimate(data, est.e2_total);
            append_estimate(data, est.e2_undetected);
            const bool exact_ok = sim.policy == CodebookPolicy::Fixed &&
                                  output_space(y_size, n) <=
                                      static_cast<double>(config.oracle.max_outputs);
            if (exact_ok) {
                const ExactErrorProbs exact = exact_error_probs_avg(cb, config.w_y, config.rates,
                                                                    config.oracle.budget());
                data << "\t" << fmt(exact.e1_total) << "\t" << fmt(exact.e1_undetected) << "\t"
                     << fmt(exact.e2_total) << "\t" << fmt(exact.e2_undetected);
            } else {
                data << "\tna\tna\tna\tna";
            }
            data << "\n";
        }
        write_file(loaded.out / "simulate.tsv", data.str());

        std::ostringstream summary;
        summary << "command = simulate\n";
        summary << "seed = " << sim.seed << "\n";
        summary << "trials_per_n = " << sim.trials << "\n";
        summary << "codebook_policy = "
                << (sim.policy == CodebookPolicy::FreshPerTrial ? "fresh" : "fixed") << "\n";
        append_fit(summary, "e1_total", empirical_exponent(tallies, ErrorMetric::Msg1Total));
        append_fit(summary, "e1_und", empirical_exponent(tallies, ErrorMetric::Msg1Undetected));
        append_fit(summary, "e2_total", empirical_exponent(tallies, ErrorMetric::Msg2Total));
        append_fit(summary, "e2_und", empirical_exponent(tallies, ErrorMetric::Msg2Undetected));
        write_file(loaded.out / "simulate_summary.txt", summary.str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitConfig;
    }
}

namespace {

RateConfig with_axis(const RateConfig& rc, const std::string& axis, double value) {
    double r1 = rc.r1(), r2 = rc.r2(), r1t = rc.r1_tilde(), r2t = rc.r2_tilde();
    double l12 = rc.lambda12(), l2 = rc.lambda2();
    if (axis == "r1") r1 = value;
    else if (axis == "r2") r2 = value;
    else if (axis == "r1_tilde") r1t = value;
    else if (axis == "r2_tilde") r2t = value;
    else if (axis == "lambda12") l12 = value;
    else if (axis == "lambda2") l2 = value;
    return RateConfig(r1, r2, r1t, r2t, l12, l2);
}

}  // namespace

int cmd_sweep(const RunOptions& options) {
    try {
        Loaded loaded = load(options);
        const RunConfig& config = loaded.config;
        if (!config.sweep) throw ConfigError("sweep: section required for sweep");
        const SweepSettings& sweep = *config.sweep;

        // Validate every point before spending any solver time.
        std::vector<RateConfig> points;
        for (double v : sweep.grid) {
            try {
                points.push_back(with_axis(config.rates, sweep.axis, v));
            } catch (const std::invalid_argument& e) {
                throw ConfigError("sweep: grid value " + fmt(v) + " invalid: " + e.what());
            }
        }
        std::vector<ExponentReport> reports(points.size());
        parallel_chunks(points.size(), options.threads,
                        [&](std::size_t begin, std::size_t end, std::size_t) {
                            for (std::size_t i = begin; i < end; ++i) {
                                reports[i] = theorem_bounds(points[i], config.p_ux, config.w_y,
                                                            config.solver);
                            }
                        });
        std::ostringstream data;
        data << sweep.axis
             << "[bits]\te1_bound[bits]\te1hat_bound[bits]\te2_bound[bits]\te2hat_bound[bits]"
             << "\tpen_low[bits]\tpen_high[bits]\tjoint_low[bits]\tmarg_low[bits]\tmarg_high[bits]\n";
        for (std::size_t i = 0; i < points.size(); ++i) {
            const ExponentReport& rep = reports[i];
            data << fmt(sweep.grid[i]) << "\t" << fmt(rep.e1_bound) << "\t" << fmt(rep.e1hat_bound)
                 << "\t" << fmt(rep.e2_bound) << "\t" << fmt(rep.e2hat_bound) << "\t"
                 << fmt(rep.pen_low.value) << "\t" << fmt(rep.pen_high.value) << "\t"
                 << fmt(rep.joint_low.value) << "\t" << fmt(rep.marg_low.value) << "\t"
                 << fmt(rep.marg_high.value) << "\n";
        }
        write_file(loaded.out / "sweep.tsv", data.str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return kExitConfig;
    }
}

namespace {

enum class CheckStatus { Pass, Fail, Skip };

struct Check {
    std::string name;
    CheckStatus status;
    std::string detail;
};

const char* status_str(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "PASS";
        case CheckStatus::Fail: return "FAIL";
        default: return "SKIP";
    }
}

}  // namespace

int cmd_verify(const RunOptions& options) {
    std::optional<Loaded> maybe_loaded;
    try {
        maybe_loaded = load(options);
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitConfig;
    }
    const Loaded& loaded = *maybe_loaded;
    const RunConfig& config = loaded.config;
    const RateConfig& rc = config.rates;
    std::vector<Check> checks;
    auto add = [&](std::string name, CheckStatus status, std::string detail) {
        checks.push_back({std::move(name), status, std::move(detail)});
    };

    try {
        const double tol = config.oracle.solver_tolerance_bits;
        const std::int64_t k = config.oracle.grid_k;
        struct Case {
            const char* name;
            GridObjective objective;
            GridParams params;
            double solver_value;
        };
        std::vector<Case> cases;
        cases.push_back({"solver_vs_grid_marginal", GridObjective::Marginal,
                         GridParams{rc.lambda2(), 0.0, rc.r2(), 0.0, 0.0},
                         exponent_marginal(rc.lambda2(), rc.r2(), config.p_ux, config.w_y,
                                           config.solver)
                             .value});
        cases.push_back({"solver_vs_grid_joint", GridObjective::Joint,
                         GridParams{rc.lambda12(), rc.r1(), rc.r2(), 0.0, 0.0},
                         exponent_joint(rc.lambda12(), rc.r1(), rc.r2(), config.p_ux, config.w_y,
                                        config.solver)
                             .value});
        cases.push_back({"solver_vs_grid_penalized", GridObjective::Penalized,
                         GridParams{rc.lambda12(), rc.r1(), rc.r2(), rc.r2(), 0.0},
                         exponent_penalized(rc.lambda12(), rc.r1(), rc.r2(), rc.r2(), config.p_ux,
                                            config.w_y, config.solver)
                             .value});
        cases.push_back({"solver_vs_grid_sphere", GridObjective::SpherePacking,
                         GridParams{1.0, 0.0, 0.0, 0.0, rc.r12_tilde()},
                         sphere_packing(rc.r12_tilde(), config.p_ux, config.w_y, config.solver)
                             .value});
        for (const Case& c : cases) {
            try {
                const double oracle_value = grid_exponent(c.objective, c.params, config.p_ux,
                                                          config.w_y, k, config.oracle.budget());
                double gap;
                if (oracle_value == kInf || c.solver_value == kInf) {
                    gap = (oracle_value == c.solver_value) ? 0.0 : kInf;
                } else {
                    gap = std::abs(oracle_value - c.solver_value);
                }
                add(c.name, gap <= tol ? CheckStatus::Pass : CheckStatus::Fail,
                    "solver=" + fmt(c.solver_value) + " grid=" + fmt(oracle_value) +
                        " gap=" + fmt(gap) + " tol=" + fmt(tol));
            } catch (const std::invalid_argument& e) {
                add(c.name, CheckStatus::Skip, e.what());
            }
        }

        // Monte Carlo against the exact oracle on a fixed codebook.
        if (config.simulation) {
            const SimulationSettings& sim = *config.simulation;
            std::optional<std::size_t> pick;
            for (std::size_t n : sim.blocklengths) {
                if (output_space(config.w_y.out_size(), n) <=
                    static_cast<double>(config.oracle.max_outputs)) {
                    pick = n;
                }
            }
            if (!pick) {
                add("mc_vs_exact", CheckStatus::Skip, "no blocklength within the output budget");
                add("unambiguity", CheckStatus::Skip, "no blocklength within the output budget");
                add("fast_path_equivalence", CheckStatus::Skip,
                    "no blocklength within the output budget");
            } else {
                const JointType type = quantize_to_type(config.p_ux, *pick);
                const TrialTally tally = run_trials(type, config.w_y, rc, sim.trials, sim.seed,
                                                    CodebookPolicy::Fixed, options.threads);
                const Codebook cb = sample_codebook(type, rc.r1(), rc.r2(),
                                                    derive_seed(sim.seed, "fixed-codebook", 0));
                const ExactErrorProbs exact =
                    exact_error_probs_avg(cb, config.w_y, rc, config.oracle.budget());
                struct Pair {
                    std::int64_t count;
                    double exact;
                };
                const Pair pairs[4] = {
                    {tally.msg1_undetected + tally.msg1_erased, exact.e1_total},
                    {tally.msg1_undetected, exact.e1_undetected},
                    {tally.msg2_undetected + tally.msg2_erased, exact.e2_total},
                    {tally.msg2_undetected, exact.e2_undetected}};
                bool ok = true;
                std::string detail = "n=" + std::to_string(*pick);
                for (const Pair& p : pairs) {
                    const auto [lo, hi] = wilson_interval(p.count, tally.trials, 3.0);
                    ok = ok && p.exact >= lo && p.exact <= hi;
                    detail += " [" + fmt(lo) + "," + fmt(hi) + "]/" + fmt(p.exact);
                }
                add("mc_vs_exact", ok ? CheckStatus::Pass : CheckStatus::Fail, detail);

                const AuditResult audit = unambiguity_audit(cb, DecodeThresholds::from(rc),
                                                            config.w_y.out_size(),
                                                            config.oracle.budget());
                add("unambiguity", audit.unambiguous ? CheckStatus::Pass : CheckStatus::Fail,
                    "outputs=" + std::to_string(audit.outputs_checked));
                add("fast_path_equivalence",
                    audit.fast_matches_exhaustive ? CheckStatus::Pass : CheckStatus::Fail,
                    "outputs=" + std::to_string(audit.outputs_checked));
            }
        } else {
            add("mc_vs_exact", CheckStatus::Skip, "no simulation section");
            add("unambiguity", CheckStatus::Skip, "no simulation section");
            add("fast_path_equivalence", CheckStatus::Skip, "no simulation section");
        }

        // Structural invariants on the configured operating point.
        const ExponentReport rep = theorem_bounds(rc, config.p_ux, config.w_y, config.solver);
        const double joint_lo =
            exponent_joint(1.0 / rc.lambda12(), rc.r1_tilde(), rc.r2_tilde(), config.p_ux,
                           config.w_y, config.solver)
                .value;
        const double sphere = sphere_packing(rc.r12_tilde(), config.p_ux, config.w_y,
                                             config.solver)
                                  .value;
        add("penalized_le_joint",
            rep.pen_low.value <= joint_lo + 1e-9 ? CheckStatus::Pass : CheckStatus::Fail,
            fmt(rep.pen_low.value) + " <= " + fmt(joint_lo));
        add("weak_duality", joint_lo <= sphere + 1e-9 ? CheckStatus::Pass : CheckStatus::Fail,
            fmt(joint_lo) + " <= " + fmt(sphere));
        add("undetected_ge_total",
            rep.e1hat_bound >= rep.e1_bound - 1e-9 ? CheckStatus::Pass : CheckStatus::Fail,
            fmt(rep.e1hat_bound) + " >= " + fmt(rep.e1_bound));
        const bool nonneg = rep.e1_bound >= 0.0 && rep.e1hat_bound >= 0.0 && rep.e2_bound >= 0.0 &&
                            rep.e2hat_bound >= 0.0;
        add("bounds_nonnegative", nonneg ? CheckStatus::Pass : CheckStatus::Fail, "");
        ExponentReport replay = rep;
        recombine_bounds(replay);
        const bool recombines = replay.e1_bound == rep.e1_bound &&
                                replay.e1hat_bound == rep.e1hat_bound &&
                                replay.e2_bound == rep.e2_bound &&
                                replay.e2hat_bound == rep.e2hat_bound;
        add("breakdown_recombines", recombines ? CheckStatus::Pass : CheckStatus::Fail, "");
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitConfig;
    }

    std::ostringstream os;
    bool any_fail = false, any_skip = false;
    for (const Check& c : checks) {
        os << "[" << status_str(c.status) << "] " << c.name;
        if (!c.detail.empty()) os << " " << c.detail;
        os << "\n";
        any_fail = any_fail || c.status == CheckStatus::Fail;
        any_skip = any_skip || c.status == CheckStatus::Skip;
    }
    std::cout << os.str();
    try {
        write_file(loaded.out / "verify.txt", os.str());
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitConfig;
    }
    if (any_fail) return kExitCheckFailed;
    if (any_skip) return kExitSkipped;
    return kExitOk;
}

}  // namespace abcx
