#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abcx/info.hpp"
#include "abcx/types.hpp"

// The exponent engine: modified random coding exponents for superposition
// coding (marginal, joint, penalized), the sphere packing exponent, and the
// four decoder bounds assembled from them. Minimizations run over conditional
// distributions by coarse grid enumeration followed by multi-start coordinate
// descent with shrinking steps, restricted row-by-row to the support of the
// reference channel (only that face carries finite divergence).

namespace abcx {

// Operating rates and decoder thresholds, bits/symbol.
class RateConfig {
  public:
    RateConfig(double r1, double r2, double r1_tilde, double r2_tilde, double lambda12,
               double lambda2);

    double r1() const { return r1_; }
    double r2() const { return r2_; }
    double r1_tilde() const { return r1_tilde_; }
    double r2_tilde() const { return r2_tilde_; }
    double lambda12() const { return lambda12_; }
    double lambda2() const { return lambda2_; }

    double r12() const { return r1_ + r2_; }
    double r12_tilde() const { return r1_tilde_ + r2_tilde_; }
    double delta2() const { return r2_tilde_ - r2_; }
    double delta12() const { return r12_tilde() - r12(); }

  private:
    double r1_, r2_, r1_tilde_, r2_tilde_, lambda12_, lambda2_;
};

struct SolverSettings {
    int grid_k = 20;          // per-row grid resolution for seeding
    int descent_steps = 200;  // coordinate descent iterations per start
    double shrink = 0.7;      // step shrink factor when no move improves
    double tolerance = 1e-3;  // target accuracy, bits
    int starts = 8;           // descent starts taken from the best grid points
};

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// |I_V(UX ^ Y) - r12|+ for V: U x X -> Y under the fixed P_UX.
double j_joint(const Channel& v, const UxDist& p_ux, double r12);

// |I_Vhat(U ^ Y) - r2|+ for Vhat: U -> Y under P_U.
double j_marginal(const Channel& v_hat, const Distribution& p_u, double r2);

// U -> Y channel obtained by averaging V over P(x|u); P(u)=0 rows uniform.
Channel induced_u_channel(const Channel& v, const UxDist& p_ux);

// W(y|u,x) := W_Y(y|x) for every u.
Channel lift_to_ux(const Channel& w_y, std::size_t u_size);

struct SolveResult {
    double value = 0.0;          // bits, may be +inf (sphere packing only)
    std::vector<double> argmin;  // flat row-major channel achieving the value
    std::size_t rows = 0, cols = 0;
    long grid_points = 0;  // grid evaluations performed
    int grid_k = 0;
    int descent_iters = 0;  // total committed descent moves

    Channel argmin_channel() const { return Channel::from_flat(rows, cols, argmin); }
};

// min over Vhat: U -> Y of D(Vhat || W_{Y|U} | P_U) + lambda * |I(U^Y) - r2_arg|+
SolveResult exponent_marginal(double lambda, double r2_arg, const UxDist& p_ux,
                              const Channel& w_y, const SolverSettings& settings = {});

// min over V: U x X -> Y of D(V || W | P_UX) + lambda * |I(UX^Y) - r1 - r2|+
SolveResult exponent_joint(double lambda, double r1_arg, double r2_arg, const UxDist& p_ux,
                           const Channel& w_y, const SolverSettings& settings = {});

// As exponent_joint minus |I(U^Y) - r2_pen|+ of the induced U channel; a
// difference of convex functions, hence the multi-start. May be negative.
SolveResult exponent_penalized(double lambda, double r1_arg, double r2_arg, double r2_pen,
                               const UxDist& p_ux, const Channel& w_y,
                               const SolverSettings& settings = {});

// min D(V || W | P_UX) subject to I_V(UX^Y) <= r_cap; +inf when no V with
// finite divergence meets the cap.
SolveResult sphere_packing(double r_cap, const UxDist& p_ux, const Channel& w_y,
                           const SolverSettings& settings = {});

// The four decoder bounds. Each assembled bound is clamped at 0 (an exponent
// lower bound below 0 carries no information); the raw constituents are kept
// so reports can replay the arithmetic.
struct ExponentReport {
    double e1_bound = 0.0;
    double e1hat_bound = 0.0;
    double e2_bound = 0.0;
    double e2hat_bound = 0.0;

    // constituents
    SolveResult pen_low;      // E-_{r,1/l12}(R1~, R2~, R2)
    SolveResult pen_high;     // E-_{r,l12}(R1, R2, R2)
    SolveResult joint_low;    // E_{r,l12}(R1, R2)
    SolveResult marg_low;     // E_{r,1/l2}(R2~)
    SolveResult marg_high;    // E_{r,l2}(R2)
    double delta2 = 0.0;
    double delta12 = 0.0;
};

ExponentReport theorem_bounds(const RateConfig& rc, const UxDist& p_ux, const Channel& w_y,
                              const SolverSettings& settings = {});

// Replays the bound assembly from the stored constituents; used to check that
// a report's breakdown recombines to the reported bounds bit-for-bit.
void recombine_bounds(ExponentReport& report);

struct RegionCheck {
    double i_xy_given_u = 0.0;
    double i_uz = 0.0;
    double i_xy = 0.0;
    double slack_r1 = 0.0;   // i_xy_given_u - r1
    double slack_r2 = 0.0;   // i_uz - r2
    double slack_sum = 0.0;  // i_xy - r1 - r2
    bool inside = false;
};

RegionCheck rate_region_check(const UxDist& p_ux, const Channel& w_y, const Channel& w_z,
                              double r1, double r2);

}  // namespace abcx
