#include "ggames/onesignal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ggames/common.hpp"

namespace ggames::onesignal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SplitMass {
    double below = 0.0;
    double above = 0.0;
    // smallest |density argument| reached on each side; breaks the tie when
    // both masses underflow (the side with the smaller argument dominates
    // in the limit for a symmetric unimodal law)
    double min_arg_below = std::numeric_limits<double>::infinity();
    double min_arg_above = std::numeric_limits<double>::infinity();

    double posterior_below() const {
        const double total = below + above;
        if (total > 0.0) return below / total;
        if (min_arg_above < min_arg_below) return 0.0;
        return 1.0;  // tie reads as the attack side (ties attack)
    }
};

// distance from 0 to the interval [lo, hi]
double interval_arg(double lo, double hi) {
    if (lo > 0.0) return lo;
    if (hi < 0.0) return -hi;
    return 0.0;
}

// Likelihood mass below / at-or-above the switch given signal z. Constant
// stretches (the tails) integrate exactly through the cdf; grid cells use
// three-point Simpson with the linear interpolant of A (the grid is far
// finer than the noise scale).
SplitMass split_mass(double z, const AttackFunction& A, const ErrorDistribution& rho) {
    if (!A.has_jump()) {
        throw std::domain_error("onesignal: conjecture needs a switch point");
    }
    const auto& th = A.grid();
    const auto& av = A.values();
    const std::size_t rb = A.right_begin();

    SplitMass out;
    out.below = std::max(rho.cdf(z - av.front() + th.front()), 0.0);
    out.min_arg_below = interval_arg(-kInf, z - av.front() + th.front());
    out.above = std::max(1.0 - rho.cdf(z - av.back() + th.back()), 0.0);
    out.min_arg_above = interval_arg(z - av.back() + th.back(), kInf);

    auto cell = [&](std::size_t i, double& mass, double& min_arg) {
        const double a = th[i], b = th[i + 1];
        const double va = av[i], vb = av[i + 1];
        const double ua = z - va + a;
        const double ub = z - vb + b;
        const double um = z - 0.5 * (va + vb) + 0.5 * (a + b);
        mass += (b - a) / 6.0 * (rho.pdf(ua) + 4.0 * rho.pdf(um) + rho.pdf(ub));
        min_arg = std::min(min_arg, interval_arg(std::min(ua, ub), std::max(ua, ub)));
    };
    for (std::size_t i = 0; i + 1 < rb; ++i) cell(i, out.below, out.min_arg_below);
    for (std::size_t i = rb; i + 1 < th.size(); ++i) cell(i, out.above, out.min_arg_above);
    return out;
}

}  // namespace

void Prop5Params::validate() const {
    if (!(delta > 0.0 && gamma > 0.0)) {
        throw std::domain_error("onesignal: delta and gamma must be positive");
    }
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("onesignal: c must lie in (0,1)");
    if (!(delta + gamma < 1.0 - delta - gamma)) {
        throw std::domain_error("onesignal: switch interval [delta+gamma, 1-delta-gamma] is empty");
    }
}

double GridOptions1s::resolved_halfwidth(const Prop5Params& p) const {
    if (halfwidth > 0.0) return halfwidth;
    return halfwidth_sds * p.dist_rho.stddev();
}

Prop5Check check_prop5_conditions(const Prop5Params& p, double xi_max, int grid_points) {
    p.validate();
    const double xi_lo = 1.0 - p.delta - p.gamma;
    if (!(xi_max >= xi_lo)) {
        throw std::domain_error("onesignal: xi_max must be >= 1 - delta - gamma");
    }
    if (grid_points < 9) throw std::domain_error("onesignal: grid_points must be >= 9");

    const auto& G = p.dist_rho;
    Prop5Check out;
    out.margin_signal_mass = G.cdf(p.gamma) - (1.0 - p.delta);
    out.margin_density = 1.0 - G.pdf(p.delta - p.gamma);

    // Posterior-odds ratio [1 - G(xi - alpha)] / G(xi - beta) bounded by
    // (1-c)/c, worst case over alpha in [0,delta], beta in [1-delta,1].
    const double odds_cap = (1.0 - p.c) / p.c;
    auto ratio_at = [&](double xi) {
        double sup_num = 0.0, inf_den = kInf;
        for (int i = 0; i < grid_points; ++i) {
            const double w = static_cast<double>(i) / (grid_points - 1);
            sup_num = std::max(sup_num, 1.0 - G.cdf(xi - w * p.delta));
            inf_den = std::min(inf_den, G.cdf(xi - (1.0 - p.delta) - w * p.delta));
        }
        if (sup_num == 0.0) return 0.0;
        if (inf_den == 0.0) return kInf;
        return sup_num / inf_den;
    };

    double worst = -kInf, prev = kInf;
    bool monotone_tail = true;
    for (int i = 0; i < grid_points; ++i) {
        const double xi = xi_lo + (xi_max - xi_lo) * static_cast<double>(i) / (grid_points - 1);
        const double r = ratio_at(xi);
        if (r > worst) {
            worst = r;
            out.worst_xi = xi;
        }
        if (i + 1 == grid_points) monotone_tail = r <= prev + 1e-15;
        prev = r;
    }
    out.margin_odds = odds_cap - worst;
    out.xi_boundary_monotone = monotone_tail;
    out.satisfied =
        out.margin_odds >= 0.0 && out.margin_signal_mass >= 0.0 && out.margin_density > 0.0;
    return out;
}

double posterior_below_t(double z, const AttackFunction& A, const Prop5Params& p) {
    p.validate();
    return split_mass(z, A, p.dist_rho).posterior_below();
}

CutoffResult attack_cutoff(const AttackFunction& A_n, const Prop5Params& p, double tol) {
    p.validate();
    const double t = A_n.jump();
    CutoffResult out;
    out.band_center = 0.5 - t;

    double lo = out.band_center - p.gamma - 1.0;
    double hi = out.band_center + p.gamma + 1.0;
    auto post = [&](double z) { return posterior_below_t(z, A_n, p); };
    const double p_lo = post(lo), p_hi = post(hi);
    if (!(p_lo < p.c && p_hi >= p.c)) {
        throw NumericalError("onesignal: no cutoff crossing inside [" + format_double(lo) + ", " +
                             format_double(hi) + "] (posterior " + format_double(p_lo) + " .. " +
                             format_double(p_hi) + ")");
    }
    // The posterior rises in z under the iteration bounds.
    for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double pm = post(mid);
        if (std::fabs(pm - p.c) <= tol && hi - lo <= 1e-9) break;
        if (pm < p.c) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.z = 0.5 * (lo + hi);
    out.offset_from_lemma4 = out.z - (1.0 - p.delta - t);
    out.in_band = std::fabs(out.z - out.band_center) < p.gamma;
    return out;
}

AttackFunction best_response(const AttackFunction& A_n, double z_n, const Prop5Params& p) {
    p.validate();
    const double t = A_n.jump();
    const auto& th = A_n.grid();
    const auto& av = A_n.values();
    std::vector<double> out(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) {
        out[i] = 1.0 - p.dist_rho.cdf(z_n - av[i] + th[i]);
    }
    AttackFunction next(th, std::move(out), t);
    const auto nl = next.side_hull(true);
    const auto nr = next.side_hull(false);
    if (nl.first < 1.0 - p.delta - 1e-9 || nr.second > p.delta + 1e-9) {
        throw NumericalError("onesignal: best response left the iteration bounds (min left " +
                             format_double(nl.first) + ", max right " + format_double(nr.second) +
                             ")");
    }
    return next;
}

EquilibriumReport iterate_to_equilibrium(double t, const Prop5Params& p, int max_iter,
                                         double sup_tol, const GridOptions1s& grid) {
    p.validate();
    if (!(t >= p.t_lo() && t <= p.t_hi())) {
        throw std::domain_error("onesignal: switch point must lie in [delta+gamma, 1-delta-gamma]");
    }
    if (max_iter < 1 || !(sup_tol > 0.0)) {
        throw std::domain_error("onesignal: bad iteration parameters");
    }
    if (grid.resolved_halfwidth(p) < 5.0 * p.dist_rho.stddev() * (1.0 - 1e-12)) {
        throw std::domain_error(
            "onesignal: grid window must cover at least 5 signal standard deviations");
    }

    const double g_dg = p.dist_rho.pdf(p.delta - p.gamma);
    const double slope_bound = g_dg < 1.0 ? g_dg / (1.0 - g_dg) : kInf;

    AttackFunction current = AttackFunction::step(t, grid.resolved_halfwidth(p),
                                                  grid.intervals_per_side, 1.0 - p.delta, p.delta);
    EquilibriumReport report(current);
    report.slope_bound = slope_bound;

    std::vector<double> deltas;
    CutoffResult cut{};
    for (int n = 1; n <= max_iter; ++n) {
        cut = attack_cutoff(current, p, grid.cutoff_tol);
        AttackFunction next = best_response(current, cut.z, p);
        const double d = next.sup_delta_same_grid(current);
        deltas.push_back(d);

        IterationStep step;
        step.n = n;
        step.sup_delta = d;
        step.cutoff = cut.z;
        step.cutoff_in_band = cut.in_band;
        step.max_abs_slope = next.max_abs_slope();
        step.min_left = next.side_hull(true).first;
        step.max_right = next.side_hull(false).second;
        step.bounds_ok =
            step.min_left >= 1.0 - p.delta - 1e-9 && step.max_right <= p.delta + 1e-9;
        report.trace.push_back(step);

        current = std::move(next);
        if (d < sup_tol) {
            report.converged = true;
            report.iterations = n;
            break;
        }
    }
    if (!report.converged) {
        throw ConvergenceError("onesignal: iteration did not reach sup_tol within max_iter",
                               deltas);
    }
    report.limit = current;
    report.cutoff = cut.z;
    report.cutoff_offset = cut.offset_from_lemma4;
    report.monotone_per_side = current.max_signed_slope() <= 1e-9;

    // Consistency of the limit: one more cutoff + best response must move
    // the function by less than the convergence tolerance.
    const CutoffResult final_cut = attack_cutoff(current, p, grid.cutoff_tol);
    const AttackFunction again = best_response(current, final_cut.z, p);
    report.max_residual = again.sup_delta_same_grid(current);
    return report;
}

}  // namespace ggames::onesignal
