#pragma once

#include "ggames/attack_function.hpp"
#include "ggames/dist.hpp"
#include "ggames/report.hpp"

namespace ggames::onesignal {

/// One private signal z = A - theta + rho over the attack's net size, with
/// a general symmetric differentiable error law (cdf G, density g). Agents
/// attack iff z clears a cutoff.
struct Prop5Params {
    double delta = 0.2;
    double gamma = 0.1;
    double c = 0.5;
    ErrorDistribution dist_rho = ErrorDistribution::normal(1e4);

    void validate() const;
    double t_lo() const { return delta + gamma; }
    double t_hi() const { return 1.0 - delta - gamma; }
};

struct Prop5Check {
    double margin_odds = 0.0;         // (1-c)/c minus the worst posterior-odds ratio
    double margin_signal_mass = 0.0;  // G(gamma) - (1 - delta)
    double margin_density = 0.0;      // 1 - g(delta - gamma)
    double worst_xi = 0.0;
    bool xi_boundary_monotone = false;
    bool satisfied = false;
};

/// Worst-case evaluation of the three sufficient conditions on a
/// (xi, alpha, beta) grid with xi in [1-delta-gamma, xi_max].
Prop5Check check_prop5_conditions(const Prop5Params& p, double xi_max, int grid_points = 201);

struct GridOptions1s {
    int intervals_per_side = 1000;
    double halfwidth = 0.0;  // 0 -> halfwidth_sds * noise stddev
    double halfwidth_sds = 5.0;
    double cutoff_tol = 1e-10;  // posterior tolerance at the cutoff

    double resolved_halfwidth(const Prop5Params& p) const;
};

/// Posterior P[theta < t | z, A] in the wide-uniform-prior limit (exact
/// through the cdf on the flat tails of A).
double posterior_below_t(double z, const AttackFunction& A, const Prop5Params& p);

struct CutoffResult {
    double z = 0.0;
    double band_center = 0.0;         // (1 - 2t)/2, the model's central signal value
    double offset_from_lemma4 = 0.0;  // z - (1 - delta - t)
    bool in_band = false;             // |z - band_center| < gamma
};

/// Signal value where the posterior of {theta < t} equals c; agents attack
/// at or above it. Bisection over [center - gamma - 1, center + gamma + 1];
/// a missing crossing raises NumericalError.
CutoffResult attack_cutoff(const AttackFunction& A_n, const Prop5Params& p,
                           double tol = 1e-10);

/// One best-response step: A_{n+1}(theta) = 1 - G(z_n - A_n(theta) + theta).
/// Output violating the iteration bounds raises NumericalError.
AttackFunction best_response(const AttackFunction& A_n, double z_n, const Prop5Params& p);

/// Cutoff recomputation plus best response from the (1-delta)/delta step at
/// t until the sup-norm delta falls below sup_tol. The report records the
/// per-iterate cutoff, slope extremes and bound checks; the slope bound
/// g(delta-gamma)/(1-g(delta-gamma)) is attached for diagnostics.
EquilibriumReport iterate_to_equilibrium(double t, const Prop5Params& p, int max_iter = 200,
                                         double sup_tol = 1e-6, const GridOptions1s& grid = {});

}  // namespace ggames::onesignal
