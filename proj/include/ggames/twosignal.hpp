#pragma once

#include <vector>

#include "ggames/attack_function.hpp"
#include "ggames/dist.hpp"
#include "ggames/report.hpp"

namespace ggames::twosignal {

/// Two-signal environment: x = theta + eps_x over the fundamental,
/// y = A + eps_y over the aggregate attack; an agent attacks when the
/// posterior probability of success is at least the cost c (ties attack).
struct Params {
    double c = 0.5;
    ErrorDistribution dist_x = ErrorDistribution::normal(1.0);
    ErrorDistribution dist_y = ErrorDistribution::normal(1.0);

    void validate() const;
};

/// Parameters of the sufficient conditions for a continuum of equilibria
/// (attack-odds bound and signal-mass bound) plus the side conditions
/// 1 - delta >= gamma and 1 > 3 delta + 2 gamma.
struct Prop4Params {
    double delta = 0.2;
    double gamma = 0.1;
    double xi = 0.85;
    double c = 0.5;
    ErrorDistribution dist_x = ErrorDistribution::normal(1.0);
    ErrorDistribution dist_y = ErrorDistribution::normal(1.0);

    void validate() const;
    double t_lo() const { return delta + gamma; }
    double t_hi() const { return 1.0 - delta - gamma; }
    Params base() const { return Params{c, dist_x, dist_y}; }
};

struct GridOptions {
    int intervals_per_side = 1000;  // theta cells per side of the switch
    double halfwidth = 0.0;         // window half width; 0 -> halfwidth_sds * max stddev
    double halfwidth_sds = 5.0;
    int signal_x_points = 1201;     // y-threshold table resolution in x
    int u_points = 1200;            // probability-space x-integration intervals (even)
    double threshold_tol = 1e-12;   // y-threshold bisection tolerance
    int workers = 0;

    double resolved_halfwidth(const Params& p) const;
};

/// Posterior probability of success given signals (x, y) under the
/// conjectured attack function A, in the wide-uniform-prior limit (flat
/// tails of A make the limit exact). For signal pairs carrying no
/// likelihood the value degenerates to the nearest-support classification
/// {0, 1}.
double posterior_success(double x, double y, const AttackFunction& A, const Params& p);

/// Posterior odds of {theta >= t} against {theta < t} given (x, y) -- the
/// likelihood-ratio diagnostic whose bound (1-c)/c drives the attack
/// decision under the iteration bounds. Returns +inf when only the upper
/// region carries mass.
double posterior_odds_above(double x, double y, const AttackFunction& A, const Params& p,
                            double t);

struct ConsistencyReport {
    std::vector<double> theta;
    std::vector<double> residual;
    double max_residual = 0.0;
    double theta_at_max = 0.0;
    double tol = 0.0;
    bool passed = false;
};

/// Equilibrium consistency: for every grid theta, the mass of signal pairs
/// whose posterior clears c must reproduce A(theta). Requires a
/// log-concave y-noise (the attack set is then an upper set in y for each
/// x, located by bisection and integrated exactly through the y-cdf).
ConsistencyReport verify_consistency(const AttackFunction& A, const Params& p, double tol,
                                     const GridOptions& grid = {});

/// The indicator step A(theta) = 1{theta < t}, exactly self-consistent for
/// uniform action noise with half width sigma < 1/2 (signal clusters do not
/// overlap). Throws std::domain_error when sigma is outside (0, 1/2).
AttackFunction build_step_equilibrium(double t, double sigma, double halfwidth = 5.0,
                                      int intervals_per_side = 1000);

struct Prop4Check {
    double margin_attack_odds = 0.0;  // (1-c)/c minus the worst-case odds factor
    double margin_signal_mass = 0.0;  // F_x(xi) F_y(gamma) minus (1 - delta)
    double worst_eta = 0.0;
    bool side_conditions_ok = false;
    bool eta_boundary_monotone = false;  // odds factor still shrinking at eta_max
    bool satisfied = false;
};

/// Worst-case numerical evaluation of the two sufficient conditions over an
/// eta grid on [1-delta-gamma, eta_max] with sup/inf over shift sub-grids.
Prop4Check check_prop4_conditions(const Prop4Params& p, double eta_max, int grid_points = 201);

/// One best-response step: agents attack on the signal set where the
/// posterior against the conjecture A_n clears c; the induced attack mass
/// is returned on the same grid. Output violating the iteration bounds
/// (>= 1-delta left of the switch, <= delta right of it) raises
/// NumericalError.
AttackFunction best_response(const AttackFunction& A_n, const Prop4Params& p,
                             const GridOptions& grid = {});

/// The decision rule induced by a conjecture: for each tabulated x, the
/// smallest y at which an agent attacks. This is the cutoff strategy the
/// agent-based simulator consumes.
struct ThresholdCurve {
    std::vector<double> x;
    std::vector<double> yhat;
};

ThresholdCurve threshold_curve(const AttackFunction& A, const Params& p,
                               const GridOptions& grid = {});

/// Best-response iteration from the 1-delta/delta step at t until the
/// sup-norm delta falls below sup_tol. Throws ConvergenceError (with the
/// delta trace) when max_iter is exhausted.
EquilibriumReport iterate_to_equilibrium(double t, const Prop4Params& p, int max_iter = 200,
                                         double sup_tol = 1e-6, const GridOptions& grid = {});

}  // namespace ggames::twosignal
