#include "ggames/netsignal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ggames/dist.hpp"

namespace ggames::netsignal {

namespace {

void check_alpha(double alpha_z) {
    if (!(alpha_z > 0.0)) throw std::domain_error("netsignal: alpha_z must be > 0");
}

// Residual of the attack-mass equation; roots in A are the fixed points.
double residual(double A, double theta, double z_star, double sqrt_a) {
    return A - (1.0 - normal_cdf(sqrt_a * (z_star - A + theta)));
}

double map_slope(double A, double theta, double z_star, double sqrt_a) {
    return sqrt_a * normal_pdf(sqrt_a * (z_star - A + theta));
}

// Tangency parameter: the S-curve has unit slope where
// sqrt(alpha) phi(u) = 1, i.e. u = +/- sqrt(log(alpha / 2pi)).
double tangency_u(double alpha_z) { return std::sqrt(std::log(alpha_z / kTwoPi)); }

// Root of the residual inside [a_lo, a_hi] (residual must change sign),
// via safeguarded Newton with a bisection fallback.
double solve_bracketed(double a_lo, double a_hi, double theta, double z_star, double sqrt_a,
                       double tol) {
    double r_lo = residual(a_lo, theta, z_star, sqrt_a);
    double r_hi = residual(a_hi, theta, z_star, sqrt_a);
    if (r_lo == 0.0) return a_lo;
    if (r_hi == 0.0) return a_hi;
    if (r_lo > 0.0 || r_hi < 0.0) {
        throw NumericalError("netsignal: lost bracket while refining a fixed point");
    }
    double x = 0.5 * (a_lo + a_hi);
    for (int i = 0; i < 200; ++i) {
        const double r = residual(x, theta, z_star, sqrt_a);
        if (r > 0.0) {
            a_hi = x;
        } else if (r < 0.0) {
            a_lo = x;
        } else {
            return x;
        }
        const double d = 1.0 - map_slope(x, theta, z_star, sqrt_a);
        double next = d != 0.0 ? x - r / d : 0.5 * (a_lo + a_hi);
        if (!(next > a_lo && next < a_hi)) next = 0.5 * (a_lo + a_hi);
        if (std::fabs(next - x) <= tol && a_hi - a_lo <= 4.0 * tol) return next;
        x = next;
    }
    return x;
}

struct Branches {
    bool folded = false;  // alpha_z > 2pi
    double a_fold_lo = 1.0, a_fold_hi = 0.0;
};

Branches branch_geometry(double alpha_z) {
    Branches b;
    if (alpha_z > kTwoPi) {
        const double u = tangency_u(alpha_z);
        b.folded = true;
        b.a_fold_lo = 1.0 - normal_cdf(u);
        b.a_fold_hi = 1.0 - normal_cdf(-u);
    }
    return b;
}

double solve_segment(double a_lo, double a_hi, double theta, double z_star, double alpha_z) {
    const double sqrt_a = std::sqrt(alpha_z);
    const double r_lo = residual(a_lo, theta, z_star, sqrt_a);
    const double r_hi = residual(a_hi, theta, z_star, sqrt_a);
    if (r_lo > 0.0) {
        // Whole segment above the line: the solution collapsed onto the
        // lower segment end; one fixed-point evaluation recovers it to
        // machine precision (the map is flat there).
        return 1.0 - normal_cdf(sqrt_a * (z_star - a_lo + theta));
    }
    if (r_hi < 0.0) {
        return 1.0 - normal_cdf(sqrt_a * (z_star - a_hi + theta));
    }
    return solve_bracketed(a_lo, a_hi, theta, z_star, sqrt_a, 1e-15);
}

struct CompositeFn {
    double z_star, alpha_z;
    bool folded;
    double t_switch;  // only meaningful when folded

    double operator()(double theta) const {
        if (!folded) return solve_segment(0.0, 1.0, theta, z_star, alpha_z);
        if (theta < t_switch) return upper_branch(theta, z_star, alpha_z);
        return lower_branch(theta, z_star, alpha_z);
    }
    double net_size(double theta) const { return (*this)(theta) - theta; }
    // Net-size limits on either side of the switch (the jump spans them).
    double net_left_at_switch() const {
        return upper_branch(t_switch, z_star, alpha_z) - t_switch;
    }
    double net_right_at_switch() const {
        return lower_branch(t_switch, z_star, alpha_z) - t_switch;
    }
};

double resolve_switch(const MultiplicityRegion& region, const BranchPolicy& policy) {
    switch (policy.mode) {
        case BranchPolicy::Mode::RegionCenter:
            return 0.5 * (region.theta_low + region.theta_high);
        case BranchPolicy::Mode::RegionFraction:
            return region.theta_low +
                   std::clamp(policy.value, 0.0, 1.0) * (region.theta_high - region.theta_low);
        case BranchPolicy::Mode::AbsoluteTheta:
            return std::clamp(policy.value, region.theta_low, region.theta_high);
    }
    return 0.5 * (region.theta_low + region.theta_high);
}

// theta at which the (decreasing) net size A_t(theta) - theta equals y.
double theta_at_net_size(const CompositeFn& f, double y) {
    if (f.folded) {
        if (y <= f.net_left_at_switch() && y >= f.net_right_at_switch()) return f.t_switch;
    }
    double lo = -y - 2.0, hi = -y + 2.0;
    // net_size(lo) >= y + 2 - 1 > y and net_size(hi) <= 1 + y - 2 < y.
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::fabs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f.net_size(mid) > y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

FixedPointSet attack_fixed_points(double theta, double z_star, double alpha_z, int grid_bits,
                                  double tol) {
    check_alpha(alpha_z);
    if (grid_bits < 4 || grid_bits > 24) {
        throw std::domain_error("netsignal: grid_bits must lie in [4,24]");
    }
    const double sqrt_a = std::sqrt(alpha_z);
    const std::size_t n = std::size_t{1} << grid_bits;

    FixedPointSet out;
    out.theta = theta;
    out.z_star = z_star;
    out.alpha_z = alpha_z;

    std::vector<double> roots;
    double prev_a = 0.0;
    double prev_r = residual(prev_a, theta, z_star, sqrt_a);
    if (prev_r == 0.0) roots.push_back(prev_a);
    for (std::size_t i = 1; i <= n; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(n);
        const double r = residual(a, theta, z_star, sqrt_a);
        if (r == 0.0) {
            roots.push_back(a);
        } else if (prev_r != 0.0 && (prev_r < 0.0) != (r < 0.0)) {
            double lo = prev_a, hi = a;
            for (int k = 0; k < 200 && hi - lo > tol; ++k) {
                const double mid = 0.5 * (lo + hi);
                const double rm = residual(mid, theta, z_star, sqrt_a);
                if (rm == 0.0) {
                    lo = hi = mid;
                } else if ((rm < 0.0) == (prev_r < 0.0)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_a = a;
        prev_r = r;
    }
    std::sort(roots.begin(), roots.end());
    for (double a : roots) {
        if (!out.solutions.empty() && a - out.solutions.back().value < 4.0 * tol) continue;
        FixedPoint fp;
        fp.value = a;
        fp.slope = map_slope(a, theta, z_star, sqrt_a);
        fp.stable = fp.slope < 1.0;
        out.solutions.push_back(fp);
    }
    return out;
}

MultiplicityRegion multiplicity_region(double z_star, double alpha_z) {
    check_alpha(alpha_z);
    MultiplicityRegion r;
    r.z_star = z_star;
    r.alpha_z = alpha_z;
    if (alpha_z <= kTwoPi) {
        r.empty = true;
        return r;
    }
    const double u = tangency_u(alpha_z);
    const double sqrt_a = std::sqrt(alpha_z);
    // At tangency A = 1 - Phi(u) and theta = u/sqrt(alpha) + A - z_star,
    // which satisfies both the fixed-point equation and the unit-slope
    // condition exactly.
    r.theta_low = u / sqrt_a + (1.0 - normal_cdf(u)) - z_star;
    r.theta_high = -u / sqrt_a + normal_cdf(u) - z_star;
    r.empty = !(r.theta_low < r.theta_high);
    return r;
}

double lower_branch(double theta, double z_star, double alpha_z) {
    check_alpha(alpha_z);
    const Branches b = branch_geometry(alpha_z);
    return solve_segment(0.0, b.folded ? b.a_fold_lo : 1.0, theta, z_star, alpha_z);
}

double upper_branch(double theta, double z_star, double alpha_z) {
    check_alpha(alpha_z);
    const Branches b = branch_geometry(alpha_z);
    return solve_segment(b.folded ? b.a_fold_hi : 0.0, 1.0, theta, z_star, alpha_z);
}

double composite_attack(double theta, double z_star, double alpha_z, const BranchPolicy& policy) {
    check_alpha(alpha_z);
    if (alpha_z <= kTwoPi) return solve_segment(0.0, 1.0, theta, z_star, alpha_z);
    const MultiplicityRegion region = multiplicity_region(z_star, alpha_z);
    const double t = resolve_switch(region, policy);
    return theta < t ? upper_branch(theta, z_star, alpha_z) : lower_branch(theta, z_star, alpha_z);
}

double posterior_success_prob(double z_star, double alpha_z, const BranchPolicy& policy,
                              const PosteriorOptions& opts) {
    check_alpha(alpha_z);
    const double sqrt_a = std::sqrt(alpha_z);

    CompositeFn f{z_star, alpha_z, alpha_z > kTwoPi, 0.0};
    if (f.folded) {
        f.t_switch = resolve_switch(multiplicity_region(z_star, alpha_z), policy);
    }

    auto omega = [&](double theta) { return sqrt_a * normal_pdf(sqrt_a * (z_star - f.net_size(theta))); };

    // Success boundary: net size crosses zero exactly once (it is strictly
    // decreasing, jumping down at the switch).
    const double theta0 = theta_at_net_size(f, 0.0);

    double W = opts.window > 0.0 ? opts.window : 50.0 / sqrt_a;
    double prev = -1.0;
    for (int round = 0; round <= opts.max_doublings; ++round, W *= 2.0) {
        const double theta_lo = theta_at_net_size(f, z_star + W);
        const double theta_hi = theta_at_net_size(f, z_star - W);

        std::vector<double> cuts{theta_lo, theta_hi};
        auto add_cut = [&](double th) {
            if (th > theta_lo && th < theta_hi) cuts.push_back(th);
        };
        add_cut(theta0);
        if (f.folded) add_cut(f.t_switch);
        // Anchors where the likelihood holds its mass (z* +/- k noise sd):
        // without them the adaptive rule can step straight over the hump on
        // a wide, mostly flat piece.
        for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
            add_cut(theta_at_net_size(f, z_star + k / sqrt_a));
        }
        std::sort(cuts.begin(), cuts.end());

        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            if (!(cuts[i] < cuts[i + 1])) continue;
            const double piece = integrate(omega, cuts[i], cuts[i + 1], opts.quad_tol);
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            if (f.net_size(mid) > 0.0) {
                num += piece;
            } else {
                den += piece;
            }
        }
        const double total = num + den;
        if (!(total > 0.0)) {
            throw NumericalError("netsignal: posterior window carries no likelihood mass");
        }
        const double p = num / total;
        if (round > 0 && std::fabs(p - prev) < opts.window_check) return p;
        prev = p;
    }
    throw NumericalError("netsignal: posterior did not stabilize under window doubling");
}

CutoffScan find_equilibrium_cutoffs(double c, double alpha_z, const CutoffScanOptions& opts) {
    check_alpha(alpha_z);
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("netsignal: c must lie in (0,1)");
    if (!(opts.z_lo < opts.z_hi) || opts.points < 3) {
        throw std::domain_error("netsignal: bad cutoff scan window");
    }

    CutoffScan scan;
    scan.window_lo = opts.z_lo;
    scan.window_hi = opts.z_hi;

    auto posterior = [&](double z) {
        return posterior_success_prob(z, alpha_z, opts.policy, opts.posterior);
    };

    const int n = opts.points;
    std::vector<double> zs(static_cast<std::size_t>(n));
    std::vector<double> ps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        zs[static_cast<std::size_t>(i)] =
            opts.z_lo + (opts.z_hi - opts.z_lo) * static_cast<double>(i) / (n - 1);
    }
    parallel_for(static_cast<std::size_t>(n), opts.workers,
                 [&](std::size_t i) { ps[i] = posterior(zs[i]); });

    auto on_level = [&](double p) { return std::fabs(p - c) <= opts.plateau_tol; };

    std::size_t i = 0;
    while (i < zs.size()) {
        if (on_level(ps[i])) {
            std::size_t j = i;
            while (j + 1 < zs.size() && on_level(ps[j + 1])) ++j;
            Cutoff cut;
            cut.kind = Cutoff::Kind::Root;
            cut.z_lo = zs[i];
            cut.z_hi = zs[j];
            cut.z_star = 0.5 * (zs[i] + zs[j]);
            cut.posterior = posterior(cut.z_star);
            scan.cutoffs.push_back(cut);
            i = j + 1;
            continue;
        }
        if (i + 1 < zs.size() && !on_level(ps[i + 1]) &&
            (ps[i] < c) != (ps[i + 1] < c)) {
            double za = zs[i], zb = zs[i + 1];
            double pa = ps[i];
            for (int k = 0; k < 80 && zb - za > opts.refine_dz; ++k) {
                const double mid = 0.5 * (za + zb);
                const double pm = posterior(mid);
                if ((pm < c) == (pa < c)) {
                    za = mid;
                    pa = pm;
                } else {
                    zb = mid;
                }
            }
            const double p_lo = posterior(za);
            const double p_hi = posterior(zb);
            Cutoff cut;
            cut.z_lo = za;
            cut.z_hi = zb;
            cut.z_star = 0.5 * (za + zb);
            cut.posterior = posterior(cut.z_star);
            cut.kind = std::fabs(p_hi - p_lo) > opts.jump_threshold ? Cutoff::Kind::Discontinuity
                                                                    : Cutoff::Kind::Root;
            scan.cutoffs.push_back(cut);
        }
        ++i;
    }
    return scan;
}

}  // namespace ggames::netsignal
