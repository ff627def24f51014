#include "ggames/twosignal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ggames/common.hpp"

namespace ggames::twosignal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Piece of the conjecture with constant attack value (tails, flat sides).
struct ConstPiece {
    double lo, hi;  // theta interval, may be infinite
    double value;
    bool success;
};

// One grid cell with linearly interpolated attack value.
struct LinCell {
    double a, b;
    double va, vb;
    bool success;
};

double interp(const LinCell& c, double th) {
    const double w = (th - c.a) / (c.b - c.a);
    return c.va + w * (c.vb - c.va);
}

/// Likelihood integrals over theta against the conjecture A:
///   side(x, y) = int_R f_x(x - theta) f_y(y - A(theta)) dtheta
/// split into a success part (region selected by the indicator) and its
/// complement. Tails and flat stretches integrate exactly through the x
/// cdf; grid cells use per-cell Simpson with local refinement.
class PosteriorEngine {
  public:
    // Region: success set {A(theta) >= theta} or the half line {theta < t}.
    PosteriorEngine(const AttackFunction& A, const Params& p, bool split_at_t, double t)
        : p_(p) {
        build(A, split_at_t, t);
    }

    // (mass on the selected region, mass on the complement), with per-cell
    // quadrature refinement; used by the pointwise posterior operations.
    std::pair<double, double> num_den(double x, double y, double cell_tol = 1e-13) const {
        double num = 0.0, den = 0.0;
        for (const auto& piece : const_pieces_) {
            const double m = p_.dist_y.pdf(y - piece.value) * x_mass(x, piece.lo, piece.hi);
            (piece.success ? num : den) += m;
        }
        for (const auto& cell : cells_) {
            const double m = cell_mass(cell, x, y, cell_tol);
            (cell.success ? num : den) += m;
        }
        return {num, den};
    }

    // Per-x cache: the x-density factors of every quadrature node and the
    // exact x-mass of every constant piece are independent of y, so the
    // threshold bisection pays for them once.
    struct FxCache {
        std::vector<double> fx;          // 3 Simpson nodes per cell
        std::vector<double> piece_mass;  // per constant piece
    };

    FxCache make_cache(double x) const {
        FxCache cache;
        cache.piece_mass.resize(const_pieces_.size());
        for (std::size_t i = 0; i < const_pieces_.size(); ++i) {
            cache.piece_mass[i] = x_mass(x, const_pieces_[i].lo, const_pieces_[i].hi);
        }
        cache.fx.resize(3 * cells_.size());
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const auto& cell = cells_[i];
            cache.fx[3 * i + 0] = p_.dist_x.pdf(x - cell.a);
            cache.fx[3 * i + 1] = p_.dist_x.pdf(x - 0.5 * (cell.a + cell.b));
            cache.fx[3 * i + 2] = p_.dist_x.pdf(x - cell.b);
        }
        return cache;
    }

    std::pair<double, double> num_den_cached(const FxCache& cache, double y) const {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < const_pieces_.size(); ++i) {
            const double m = p_.dist_y.pdf(y - const_pieces_[i].value) * cache.piece_mass[i];
            (const_pieces_[i].success ? num : den) += m;
        }
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const auto& cell = cells_[i];
            const double s = cache.fx[3 * i + 0] * p_.dist_y.pdf(y - cell.va) +
                             4.0 * cache.fx[3 * i + 1] *
                                 p_.dist_y.pdf(y - 0.5 * (cell.va + cell.vb)) +
                             cache.fx[3 * i + 2] * p_.dist_y.pdf(y - cell.vb);
            const double m = (cell.b - cell.a) / 6.0 * s;
            (cell.success ? num : den) += m;
        }
        return {num, den};
    }

    // Attack decision (ties attack). Signal pairs with zero likelihood are
    // classified by the side of the split value between the fail and
    // success value hulls.
    bool attack(double x, double y, double c, double cell_tol) const {
        const auto [num, den] = num_den(x, y, cell_tol);
        const double total = num + den;
        if (total > 0.0) return (1.0 - c) * num - c * den >= 0.0;
        return y >= fallback_split_;
    }

    bool attack_cached(const FxCache& cache, double y, double c) const {
        const auto [num, den] = num_den_cached(cache, y);
        const double total = num + den;
        if (total > 0.0) return (1.0 - c) * num - c * den >= 0.0;
        return y >= fallback_split_;
    }

    // Zero-likelihood classification for the odds/posterior limits.
    bool impossible_reads_success(double y) const { return y >= fallback_split_; }

    // Smallest attacking y for this x (the attack set is an upper set in y
    // for log-concave y-noise). Returns the clamped search window edge when
    // the set is everything / empty.
    double threshold_y(double x, double c, double tol, double hint) const {
        const FxCache cache = make_cache(x);
        double lo = ymin_, hi = ymax_;
        if (std::isfinite(hint) && hint > lo && hint < hi) {
            // narrow around the previous threshold before full bisection
            const double d = 1e-3 * (ymax_ - ymin_);
            const double a = std::max(lo, hint - d);
            const double b = std::min(hi, hint + d);
            const bool fa = attack_cached(cache, a, c);
            const bool fb = attack_cached(cache, b, c);
            if (fa) {
                hi = a;
            } else if (!fb) {
                lo = b;
            } else {
                lo = a;
                hi = b;
            }
        }
        if (attack_cached(cache, lo, c)) return lo;
        if (!attack_cached(cache, hi, c)) return hi;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (attack_cached(cache, mid, c)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    double ymin() const { return ymin_; }
    double ymax() const { return ymax_; }

  private:
    Params p_;
    std::vector<ConstPiece> const_pieces_;
    std::vector<LinCell> cells_;
    double fallback_split_ = kInf;
    double ymin_ = 0.0, ymax_ = 1.0;

    double x_mass(double x, double lo, double hi) const {
        const double upper = std::isinf(lo) ? 1.0 : p_.dist_x.cdf(x - lo);
        const double lower = std::isinf(hi) ? 0.0 : p_.dist_x.cdf(x - hi);
        return std::max(upper - lower, 0.0);
    }

    double cell_mass(const LinCell& cell, double x, double y, double tol) const {
        auto ig = [&](double th) {
            return p_.dist_x.pdf(x - th) * p_.dist_y.pdf(y - interp(cell, th));
        };
        return simpson(ig, cell.a, cell.b, ig(cell.a), ig(0.5 * (cell.a + cell.b)), ig(cell.b),
                       tol, 0);
    }

    template <class F>
    static double simpson(const F& f, double a, double b, double fa, double fm, double fb,
                          double tol, int depth) {
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::fabs(delta) <= 15.0 * tol || depth >= 8) return left + right + delta / 15.0;
        return simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth + 1) +
               simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth + 1);
    }

    void build(const AttackFunction& A, bool split_at_t, double t) {
        const auto& th = A.grid();
        const auto& av = A.values();
        const double g_lo = A.theta_lo(), g_hi = A.theta_hi();
        const double v_left = av.front(), v_right = av.back();

        auto is_success = [&](double theta, double value) {
            return split_at_t ? theta < t : value >= theta;
        };

        // Left tail: constant v_left on (-inf, g_lo]. The success indicator
        // can flip once inside it (at v_left for the A >= theta region, at
        // t if t < g_lo for the split-at-t region).
        {
            double flip = kInf;
            if (split_at_t) {
                if (t < g_lo) flip = t;
            } else if (v_left < g_lo) {
                flip = v_left;  // success for theta <= v_left
            }
            if (std::isfinite(flip)) {
                const_pieces_.push_back({-kInf, flip, v_left, true});
                const_pieces_.push_back({flip, g_lo, v_left, false});
            } else {
                const_pieces_.push_back({-kInf, g_lo, v_left, true});
            }
        }
        // Right tail: constant v_right on [g_hi, inf).
        {
            double flip = -kInf;
            if (split_at_t) {
                if (t > g_hi) flip = t;
            } else if (v_right > g_hi) {
                flip = v_right;  // success persists up to v_right
            }
            if (std::isfinite(flip)) {
                const_pieces_.push_back({g_hi, flip, v_right, true});
                const_pieces_.push_back({flip, kInf, v_right, false});
            } else {
                const_pieces_.push_back({g_hi, kInf, v_right, false});
            }
        }

        // Flat sides collapse to exact constant pieces; otherwise keep
        // cells for quadrature, splitting any cell whose indicator flips.
        const auto hull_l = A.side_hull(true);
        const auto hull_r = A.side_hull(false);
        const bool const_left = hull_l.first == hull_l.second;
        const bool const_right = hull_r.first == hull_r.second;

        auto push_span = [&](double a, double b, double va, double vb, bool constant) {
            if (!(a < b)) return;
            // indicator flip inside the span?
            double flip = kInf;
            if (split_at_t) {
                if (t > a && t < b) flip = t;
            } else {
                // solve va + s * (theta - a) = theta with linear value
                const double s = constant ? 0.0 : (vb - va) / (b - a);
                if (s != 1.0) {
                    const double root = (va - s * a) / (1.0 - s);
                    if (root > a && root < b) flip = root;
                }
            }
            auto emit = [&](double lo, double hi) {
                if (!(lo < hi)) return;
                const double mid = 0.5 * (lo + hi);
                const double vlo = constant ? va : va + (vb - va) * (lo - a) / (b - a);
                const double vhi = constant ? va : va + (vb - va) * (hi - a) / (b - a);
                const bool succ = is_success(mid, 0.5 * (vlo + vhi));
                if (constant) {
                    const_pieces_.push_back({lo, hi, va, succ});
                } else {
                    cells_.push_back({lo, hi, vlo, vhi, succ});
                }
            };
            if (std::isfinite(flip)) {
                emit(a, flip);
                emit(flip, b);
            } else {
                emit(a, b);
            }
        };

        const std::size_t rb = A.right_begin();
        if (const_left) {
            push_span(g_lo, A.has_jump() ? A.jump() : g_hi, v_left, v_left, true);
        } else {
            const std::size_t last = A.has_jump() ? rb - 1 : th.size() - 1;
            for (std::size_t i = 0; i + 1 <= last; ++i) {
                push_span(th[i], th[i + 1], av[i], av[i + 1], false);
            }
        }
        if (A.has_jump()) {
            if (const_right) {
                push_span(A.jump(), g_hi, v_right, v_right, true);
            } else {
                for (std::size_t i = rb; i + 1 < th.size(); ++i) {
                    push_span(th[i], th[i + 1], av[i], av[i + 1], false);
                }
            }
        }

        // Value hulls of the two classes drive the zero-likelihood
        // classification and the y search window.
        double fail_max = -kInf, succ_min = kInf;
        double vmin = kInf, vmax = -kInf;
        bool any_succ = false, any_fail = false;
        auto note = [&](double v, bool succ) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
            if (succ) {
                any_succ = true;
                succ_min = std::min(succ_min, v);
            } else {
                any_fail = true;
                fail_max = std::max(fail_max, v);
            }
        };
        for (const auto& piece : const_pieces_) note(piece.value, piece.success);
        for (const auto& cell : cells_) {
            note(cell.va, cell.success);
            note(cell.vb, cell.success);
        }
        if (any_succ && any_fail) {
            fallback_split_ = 0.5 * (fail_max + succ_min);
        } else if (any_succ) {
            fallback_split_ = -kInf;  // impossible signals read as success
        } else {
            fallback_split_ = kInf;
        }

        const double reach = p_.dist_y.bounded() ? p_.dist_y.support_halfwidth() + 1e-9
                                                 : 44.0 * p_.dist_y.stddev();
        ymin_ = vmin - reach;
        ymax_ = vmax + reach;
    }
};

}  // namespace

void Params::validate() const {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("twosignal: c must lie in (0,1)");
}

void Prop4Params::validate() const {
    if (!(delta > 0.0 && gamma > 0.0 && xi > 0.0)) {
        throw std::domain_error("twosignal: delta, gamma, xi must be positive");
    }
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("twosignal: c must lie in (0,1)");
    if (!(1.0 - delta >= gamma)) throw std::domain_error("twosignal: requires 1 - delta >= gamma");
    if (!(1.0 > 3.0 * delta + 2.0 * gamma)) {
        throw std::domain_error("twosignal: requires 1 > 3*delta + 2*gamma");
    }
}

double GridOptions::resolved_halfwidth(const Params& p) const {
    if (halfwidth > 0.0) return halfwidth;
    return halfwidth_sds * std::max(p.dist_x.stddev(), p.dist_y.stddev());
}

double posterior_success(double x, double y, const AttackFunction& A, const Params& p) {
    p.validate();
    PosteriorEngine engine(A, p, false, 0.0);
    const auto [num, den] = engine.num_den(x, y);
    const double total = num + den;
    if (total > 0.0) return num / total;
    return engine.attack(x, y, p.c, 1e-13) ? 1.0 : 0.0;
}

double posterior_odds_above(double x, double y, const AttackFunction& A, const Params& p,
                            double t) {
    p.validate();
    PosteriorEngine engine(A, p, true, t);
    const auto [below, above] = engine.num_den(x, y);
    if (below <= 0.0 && above <= 0.0) {
        return engine.impossible_reads_success(y) ? 0.0 : kInf;
    }
    if (below <= 0.0) return kInf;
    return above / below;
}

AttackFunction build_step_equilibrium(double t, double sigma, double halfwidth,
                                      int intervals_per_side) {
    if (!(sigma > 0.0 && sigma < 0.5)) {
        throw std::domain_error(
            "twosignal: step equilibria require action-noise half width in (0, 1/2); "
            "signal clusters overlap otherwise");
    }
    return AttackFunction::step(t, halfwidth, intervals_per_side, 1.0, 0.0);
}

namespace {

// Shared machinery for verify_consistency and best_response: the induced
// attack mass at theta is
//   int f_x(x - theta) [1 - F_y(yhat(x) - A(theta))] dx
// evaluated in probability space u = F_x(x - theta), with the y-threshold
// curve yhat tabulated on an x grid.
struct ResponseContext {
    std::vector<double> xs;      // threshold table abscissae
    std::vector<double> yhat;    // smallest attacking y per x
    std::vector<double> qx;      // x-noise quantiles at the u nodes
    const Params* p = nullptr;

    double yhat_at(double x) const {
        if (x <= xs.front()) return yhat.front();
        if (x >= xs.back()) return yhat.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return yhat[i] + w * (yhat[i + 1] - yhat[i]);
    }

    // Simpson over u in [0,1] of 1 - F_y(yhat(theta + Q_x(u)) - a); exact
    // for flat threshold curves (the integrand is then constant).
    double induced_mass(double theta, double a) const {
        const std::size_t m = qx.size() - 1;
        double odd = 0.0, even = 0.0;
        auto val = [&](std::size_t j) {
            return 1.0 - p->dist_y.cdf(yhat_at(theta + qx[j]) - a);
        };
        const double f0 = val(0), fm = val(m);
        for (std::size_t j = 1; j < m; j += 2) odd += val(j);
        for (std::size_t j = 2; j < m; j += 2) even += val(j);
        const double h = 1.0 / static_cast<double>(m);
        const double raw = h / 3.0 * (f0 + 4.0 * odd + 2.0 * even + fm);
        return std::clamp(raw, 0.0, 1.0);
    }
};

ResponseContext make_context(const AttackFunction& A, const Params& p, const GridOptions& grid) {
    if (!p.dist_y.log_concave()) {
        throw std::invalid_argument(
            "twosignal: consistency/best-response machinery needs log-concave action noise");
    }
    if (grid.u_points < 8 || grid.u_points % 2 != 0) {
        throw std::domain_error("twosignal: u_points must be even and >= 8");
    }
    if (grid.signal_x_points < 9) {
        throw std::domain_error("twosignal: signal_x_points must be >= 9");
    }

    ResponseContext ctx;
    ctx.p = &p;

    const double sd_x = p.dist_x.stddev();
    const double x_reach = p.dist_x.bounded() ? p.dist_x.support_halfwidth() + 1e-9 : 8.5 * sd_x;
    const double x_lo = A.theta_lo() - x_reach;
    const double x_hi = A.theta_hi() + x_reach;
    const std::size_t nx = static_cast<std::size_t>(grid.signal_x_points);
    ctx.xs.resize(nx);
    ctx.yhat.assign(nx, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        ctx.xs[i] = x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(nx - 1);
    }

    PosteriorEngine engine(A, p, false, 0.0);
    // Fixed chunking (not tied to the worker count, so results are
    // bit-identical for any --workers); each chunk warm-starts its own
    // threshold bisections from the previous column.
    const std::size_t chunks = std::min<std::size_t>(32, nx);
    parallel_for(chunks, grid.workers, [&](std::size_t chunk) {
        const std::size_t lo = nx * chunk / chunks;
        const std::size_t hi = nx * (chunk + 1) / chunks;
        double hint = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                ctx.yhat[i] = engine.threshold_y(ctx.xs[i], p.c, grid.threshold_tol, hint);
            } catch (const std::exception& e) {
                throw NumericalError("twosignal: posterior threshold failed at x=" +
                                     format_double(ctx.xs[i]) + ": " + e.what());
            }
            hint = ctx.yhat[i];
        }
    });

    const std::size_t m = static_cast<std::size_t>(grid.u_points);
    ctx.qx.resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        // quantile endpoints clamped just inside (0,1); the integrand is
        // flat there because the threshold table is clamped anyway
        const double u =
            std::min(1.0 - 1e-12, std::max(1e-12, static_cast<double>(j) / static_cast<double>(m)));
        ctx.qx[j] = p.dist_x.quantile(u);
    }
    return ctx;
}

}  // namespace

ConsistencyReport verify_consistency(const AttackFunction& A, const Params& p, double tol,
                                     const GridOptions& grid) {
    p.validate();
    if (!(tol > 0.0)) throw std::domain_error("twosignal: tol must be positive");
    ResponseContext ctx = make_context(A, p, grid);

    const auto& th = A.grid();
    const auto& av = A.values();
    ConsistencyReport rep;
    rep.theta = th;
    rep.residual.assign(th.size(), 0.0);
    rep.tol = tol;

    parallel_for(th.size(), grid.workers, [&](std::size_t k) {
        try {
            rep.residual[k] = std::fabs(av[k] - ctx.induced_mass(th[k], av[k]));
        } catch (const std::exception& e) {
            throw NumericalError("twosignal: consistency evaluation failed at theta=" +
                                 format_double(th[k]) + ": " + e.what());
        }
    });

    rep.max_residual = 0.0;
    rep.theta_at_max = th.front();
    for (std::size_t k = 0; k < th.size(); ++k) {
        if (rep.residual[k] > rep.max_residual) {
            rep.max_residual = rep.residual[k];
            rep.theta_at_max = th[k];
        }
    }
    rep.passed = rep.max_residual <= tol;
    return rep;
}

Prop4Check check_prop4_conditions(const Prop4Params& p, double eta_max, int grid_points) {
    p.validate();
    const double eta_lo = 1.0 - p.delta - p.gamma;
    if (!(eta_max >= eta_lo)) {
        throw std::domain_error("twosignal: eta_max must be >= 1 - delta - gamma");
    }
    if (grid_points < 9) throw std::domain_error("twosignal: grid_points must be >= 9");

    Prop4Check out;
    out.side_conditions_ok = true;  // validate() above enforces them

    const double fx_xi = p.dist_x.cdf(p.xi);
    out.margin_signal_mass = fx_xi * p.dist_y.cdf(p.gamma) - (1.0 - p.delta);

    const double odds_cap = (1.0 - p.c) / p.c;
    const double fx_factor = fx_xi / (1.0 - fx_xi);

    auto lhs_at = [&](double eta) {
        double sup_low = 0.0;
        double inf_high = kInf;
        for (int i = 0; i < grid_points; ++i) {
            const double w = static_cast<double>(i) / (grid_points - 1);
            sup_low = std::max(sup_low, p.dist_y.pdf(eta - w * p.delta));
            inf_high = std::min(inf_high, p.dist_y.pdf(eta - (1.0 - p.delta) - w * p.delta));
        }
        if (sup_low == 0.0) return 0.0;  // no mass reaches the low cluster at all
        if (inf_high == 0.0) return kInf;
        return fx_factor * sup_low / inf_high;
    };

    double worst = -kInf;
    double prev_lhs = kInf;
    bool monotone_tail = true;
    for (int i = 0; i < grid_points; ++i) {
        const double eta = eta_lo + (eta_max - eta_lo) * static_cast<double>(i) / (grid_points - 1);
        const double lhs = lhs_at(eta);
        if (lhs > worst) {
            worst = lhs;
            out.worst_eta = eta;
        }
        if (i + 1 == grid_points) monotone_tail = lhs <= prev_lhs + 1e-15;
        prev_lhs = lhs;
    }
    out.margin_attack_odds = odds_cap - worst;
    out.eta_boundary_monotone = monotone_tail;
    out.satisfied =
        out.side_conditions_ok && out.margin_attack_odds >= 0.0 && out.margin_signal_mass >= 0.0;
    return out;
}

ThresholdCurve threshold_curve(const AttackFunction& A, const Params& p,
                               const GridOptions& grid) {
    p.validate();
    ResponseContext ctx = make_context(A, p, grid);
    return {std::move(ctx.xs), std::move(ctx.yhat)};
}

AttackFunction best_response(const AttackFunction& A_n, const Prop4Params& p,
                             const GridOptions& grid) {
    p.validate();
    if (!A_n.has_jump()) {
        throw std::domain_error("twosignal: best response needs a switch point on the conjecture");
    }
    const double t = A_n.jump();
    const auto hull_l = A_n.side_hull(true);
    const auto hull_r = A_n.side_hull(false);
    if (hull_l.first < 1.0 - p.delta - 1e-9 || hull_r.second > p.delta + 1e-9) {
        throw NumericalError("twosignal: conjecture violates the iteration bounds");
    }

    ResponseContext ctx = make_context(A_n, p.base(), grid);
    const auto& th = A_n.grid();
    const auto& av = A_n.values();
    std::vector<double> out(th.size());
    parallel_for(th.size(), grid.workers,
                 [&](std::size_t k) { out[k] = ctx.induced_mass(th[k], av[k]); });

    AttackFunction next(th, std::move(out), t);
    const auto nl = next.side_hull(true);
    const auto nr = next.side_hull(false);
    if (nl.first < 1.0 - p.delta - 1e-9 || nr.second > p.delta + 1e-9) {
        throw NumericalError(
            "twosignal: best response left the iteration bounds (min left " +
            format_double(nl.first) + ", max right " + format_double(nr.second) + ")");
    }
    return next;
}

EquilibriumReport iterate_to_equilibrium(double t, const Prop4Params& p, int max_iter,
                                         double sup_tol, const GridOptions& grid) {
    p.validate();
    if (!(t >= p.t_lo() && t <= p.t_hi())) {
        throw std::domain_error("twosignal: switch point must lie in [delta+gamma, 1-delta-gamma]");
    }
    if (max_iter < 1 || !(sup_tol > 0.0)) {
        throw std::domain_error("twosignal: bad iteration parameters");
    }

    const double halfwidth = grid.resolved_halfwidth(p.base());
    const double min_cover = 5.0 * std::max(p.dist_x.stddev(), p.dist_y.stddev());
    if (halfwidth < min_cover * (1.0 - 1e-12)) {
        throw std::domain_error(
            "twosignal: grid window must cover at least 5 signal standard deviations");
    }
    AttackFunction current = AttackFunction::step(t, halfwidth, grid.intervals_per_side,
                                                  1.0 - p.delta, p.delta);

    EquilibriumReport report(current);
    std::vector<double> deltas;
    for (int n = 1; n <= max_iter; ++n) {
        AttackFunction next = best_response(current, p, grid);
        const double d = next.sup_delta_same_grid(current);
        deltas.push_back(d);

        IterationStep step;
        step.n = n;
        step.sup_delta = d;
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
        throw ConvergenceError("twosignal: iteration did not reach sup_tol within max_iter",
                               deltas);
    }
    report.limit = current;
    report.monotone_per_side = current.max_signed_slope() <= 1e-9;
    const auto consistency = verify_consistency(current, p.base(), 1e-4, grid);
    report.max_residual = consistency.max_residual;
    return report;
}

}  // namespace ggames::twosignal
