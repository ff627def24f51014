// Acceptance suite: end-to-end checks of every solver against its analytic
// anchor, with pinned tolerances and runtime ceilings. Prints one PASS/FAIL
// line per criterion and exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ggames/attack_function.hpp"
#include "ggames/benchmark.hpp"
#include "ggames/common.hpp"
#include "ggames/dist.hpp"
#include "ggames/netsignal.hpp"
#include "ggames/onesignal.hpp"
#include "ggames/simlab.hpp"
#include "ggames/twosignal.hpp"
#include "test_oracles.hpp"

using namespace ggames;

namespace {

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<bool(std::string&)> body;
};

bool expect(bool ok, const std::string& what, std::string& detail) {
    if (!ok && detail.empty()) detail = what;
    return ok;
}

// --------------------------------------------------------------------------
// 1. Benchmark closed form reproduced numerically on a (c, alpha_x) grid.

bool criterion_benchmark(std::string& detail) {
    double worst = 0.0;
    for (int i = 0; i < 19; ++i) {
        const double c = 0.05 + 0.05 * i;
        for (double alpha : {0.25, 1.0, 4.0, 100.0}) {
            const auto closed = benchmark::solve(c, alpha);
            const auto numeric = benchmark::verify_numerically(c, alpha);
            worst = std::max(worst, std::fabs(numeric.theta_star - (1.0 - c)));
            worst = std::max(worst, std::fabs(numeric.theta_star - closed.theta_star));
            worst = std::max(worst, std::fabs(numeric.x_star - closed.x_star));
        }
    }
    return expect(worst < 1e-8, "max deviation " + format_double(worst), detail);
}

// --------------------------------------------------------------------------
// 2. Fixed-point counts across the precision threshold, with tangency-derived
//    region boundaries confirmed by brute-force counts.

bool criterion_threshold(std::string& detail) {
    bool ok = true;
    for (double alpha : {2.0, 4.0, 6.0, kTwoPi - 0.01}) {
        for (int i = 0; i < 50 && ok; ++i) {
            for (int j = 0; j < 50 && ok; ++j) {
                const double theta = -2.0 + 5.0 * i / 49.0;
                const double z = -2.0 + 4.0 * j / 49.0;
                const auto fps = netsignal::attack_fixed_points(theta, z, alpha);
                ok = expect(fps.solutions.size() == 1,
                            "alpha=" + format_double(alpha) + " theta=" + format_double(theta) +
                                " z=" + format_double(z) + " count=" +
                                std::to_string(fps.solutions.size()),
                            detail);
            }
        }
    }
    for (double alpha : {kTwoPi + 0.1, 8.0, 16.0}) {
        const auto region = netsignal::multiplicity_region(0.0, alpha);
        ok = expect(!region.empty, "region empty at alpha=" + format_double(alpha), detail) && ok;
        if (region.empty) continue;
        const double w = region.theta_high - region.theta_low;
        ok = expect(w > 0.0, "degenerate region width", detail) && ok;
        for (double frac : {0.25, 0.5, 0.75}) {
            const double theta = region.theta_low + frac * w;
            const auto n = netsignal::attack_fixed_points(theta, 0.0, alpha).solutions.size();
            const auto brute = oracle::brute_fixed_points(theta, 0.0, alpha).size();
            ok = expect(n == 3 && brute == 3,
                        "interior probe alpha=" + format_double(alpha) + " got " +
                            std::to_string(n) + " (brute " + std::to_string(brute) + ")",
                        detail) &&
                 ok;
        }
        for (double theta : {region.theta_low - 0.25 * w, region.theta_high + 0.25 * w}) {
            const auto n = netsignal::attack_fixed_points(theta, 0.0, alpha).solutions.size();
            const auto brute = oracle::brute_fixed_points(theta, 0.0, alpha).size();
            ok = expect(n == 1 && brute == 1,
                        "exterior probe alpha=" + format_double(alpha) + " got " +
                            std::to_string(n) + " (brute " + std::to_string(brute) + ")",
                        detail) &&
                 ok;
        }
    }
    return ok;
}

// --------------------------------------------------------------------------
// 3. Symmetric fixed point: exact middle solution and mirror companions.

bool criterion_symmetric(std::string& detail) {
    bool ok = true;
    for (const auto& [theta, z] : std::vector<std::pair<double, double>>{
             {0.25, 0.25}, {0.5, 0.0}, {0.0, 0.5}, {0.7, -0.2}}) {
        const auto fps = netsignal::attack_fixed_points(theta, z, 16.0);
        ok = expect(fps.solutions.size() == 3, "expected a triple", detail) && ok;
        if (fps.solutions.size() != 3) continue;
        const double mid = fps.solutions[1].value;
        const double residual = std::fabs(mid - (1.0 - normal_cdf(4.0 * (z - mid + theta))));
        ok = expect(std::fabs(mid - 0.5) < 1e-12, "middle solution off 1/2", detail) && ok;
        ok = expect(residual < 1e-12, "middle residual " + format_double(residual), detail) && ok;
        const double defect = std::fabs(fps.solutions[0].value + fps.solutions[2].value - 1.0);
        ok = expect(defect < 1e-10, "symmetry defect " + format_double(defect), detail) && ok;
    }
    return ok;
}

// --------------------------------------------------------------------------
// 4. Posterior success probability limits.

bool criterion_limits(std::string& detail) {
    const double hi = netsignal::posterior_success_prob(12.0, 16.0);
    const double lo = netsignal::posterior_success_prob(-12.0, 16.0);
    bool ok = expect(hi >= 1.0 - 1e-6, "P(z=+12) = " + format_double(hi), detail);
    ok = expect(lo <= 1e-6, "P(z=-12) = " + format_double(lo), detail) && ok;
    return ok;
}

// --------------------------------------------------------------------------
// 5. Step equilibria: exact below the non-overlap bound, broken above it.

bool criterion_steps(std::string& detail) {
    bool ok = true;
    twosignal::Params p;
    p.c = 0.5;
    p.dist_x = ErrorDistribution::normal(1.0);
    p.dist_y = ErrorDistribution::uniform(0.4);
    twosignal::GridOptions grid;  // spec-default resolution

    for (int i = 0; i < 10; ++i) {
        const double t = 0.05 + 0.9 * i / 9.0;
        const auto step = twosignal::build_step_equilibrium(
            t, 0.4, grid.resolved_halfwidth(p), grid.intervals_per_side);
        const auto rep = twosignal::verify_consistency(step, p, 1e-10, grid);
        ok = expect(rep.max_residual <= 1e-10,
                    "t=" + format_double(t) + " residual " + format_double(rep.max_residual),
                    detail) &&
             ok;
    }

    twosignal::Params wide = p;
    wide.dist_y = ErrorDistribution::uniform(0.6);
    const auto step = AttackFunction::step(0.5, grid.resolved_halfwidth(wide),
                                           grid.intervals_per_side, 1.0, 0.0);
    const auto rep = twosignal::verify_consistency(step, wide, 1e-10, grid);
    ok = expect(rep.max_residual > 0.01,
                "sigma=0.6 residual only " + format_double(rep.max_residual), detail) &&
         ok;
    ok = expect(std::fabs(rep.theta_at_max - 0.5) < 1.0, "failure far from t", detail) && ok;
    return ok;
}

// --------------------------------------------------------------------------
// 6. Two-signal sufficient conditions plus the iteration continuum witness.

bool criterion_twosignal(std::string& detail) {
    bool ok = true;
    twosignal::Prop4Params p;
    p.delta = 0.2;
    p.gamma = 0.1;
    p.xi = 0.85;  // F_x(xi) = Phi(0.85) >= 0.8
    p.c = 0.5;
    p.dist_x = ErrorDistribution::normal(1.0);
    p.dist_y = ErrorDistribution::normal(1e4);

    const auto good = twosignal::check_prop4_conditions(p, 2.7);
    ok = expect(good.satisfied, "conditions rejected at alpha_y=1e4", detail);

    twosignal::Prop4Params weak = p;
    weak.dist_y = ErrorDistribution::normal(1.0);
    const auto bad = twosignal::check_prop4_conditions(weak, 2.7);
    ok = expect(!bad.satisfied, "conditions accepted at alpha_y=1", detail) && ok;

    twosignal::GridOptions grid;  // spec-default resolution
    std::vector<EquilibriumReport> reports;
    for (double t : {0.35, 0.5, 0.65}) {
        try {
            reports.push_back(twosignal::iterate_to_equilibrium(t, p, 200, 1e-6, grid));
        } catch (const std::exception& e) {
            return expect(false, std::string("iteration failed: ") + e.what(), detail);
        }
        const auto& rep = reports.back();
        ok = expect(rep.converged && rep.iterations <= 200, "no convergence", detail) && ok;
        for (const auto& step : rep.trace) {
            ok = expect(step.bounds_ok, "bounds violated at iterate " + std::to_string(step.n),
                        detail) &&
                 ok;
        }
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (std::size_t j = i + 1; j < reports.size(); ++j) {
            const double d = reports[i].limit.sup_distance(reports[j].limit);
            ok = expect(d > 0.05, "limits too close: " + format_double(d), detail) && ok;
        }
    }
    return ok;
}

// --------------------------------------------------------------------------
// 7. One-signal conditions, cutoff band and slope bound along the iteration.

bool criterion_onesignal(std::string& detail) {
    bool ok = true;
    onesignal::Prop5Params p;
    p.delta = 0.2;
    p.gamma = 0.1;
    p.c = 0.5;
    p.dist_rho = ErrorDistribution::normal(1e4);

    const auto check = onesignal::check_prop5_conditions(p, 2.7);
    ok = expect(check.satisfied, "conditions rejected", detail);
    ok = expect(check.margin_odds >= 0.0, "odds margin negative", detail) && ok;
    ok = expect(check.margin_signal_mass >= 0.0, "mass margin negative", detail) && ok;
    ok = expect(check.margin_density > 0.0, "density margin nonpositive", detail) && ok;

    EquilibriumReport rep = onesignal::iterate_to_equilibrium(0.5, p, 200, 1e-6);
    ok = expect(rep.converged, "no convergence", detail) && ok;
    ok = expect(rep.slope_bound.has_value(), "missing slope bound", detail) && ok;
    const double slope_cap = (rep.slope_bound ? *rep.slope_bound : 0.0) + 1e-3;
    for (const auto& step : rep.trace) {
        ok = expect(step.bounds_ok, "bounds violated", detail) && ok;
        ok = expect(step.cutoff_in_band, "cutoff " + format_double(step.cutoff) + " out of band",
                    detail) &&
             ok;
        ok = expect(step.max_abs_slope <= slope_cap,
                    "slope " + format_double(step.max_abs_slope) + " above bound", detail) &&
             ok;
    }
    ok = expect(rep.monotone_per_side, "limit not nonincreasing within sides", detail) && ok;
    return ok;
}

// --------------------------------------------------------------------------
// 8. Monte Carlo oracle: concentration at the stable fixed point and the
//    hysteresis window above the precision threshold.

bool criterion_montecarlo(std::string& detail) {
    bool ok = true;
    const auto fps = netsignal::attack_fixed_points(0.5, 0.0, 16.0);
    ok = expect(fps.solutions.size() == 3, "missing triple", detail);
    const double upper = fps.solutions.back().value;

    const int n = 100000;
    const double band = 4.0 / std::sqrt(static_cast<double>(n));
    int hits = 0;
    for (int s = 0; s < 100; ++s) {
        simlab::SimConfig cfg;
        cfg.strategy.kind = simlab::Strategy::Kind::NetSignal;
        cfg.strategy.cutoff = 0.0;
        cfg.strategy.noise = ErrorDistribution::normal(16.0);
        cfg.theta = 0.5;
        cfg.n_agents = n;
        cfg.init_a = 0.95;
        cfg.seed = 10000 + static_cast<std::uint64_t>(s);
        const auto trace = simlab::run_steady_state(cfg);
        if (trace.converged && std::fabs(trace.terminal - upper) < band) ++hits;
    }
    ok = expect(hits >= 95, "only " + std::to_string(hits) + "/100 seeds in band", detail) && ok;

    auto max_gap = [&](double alpha_z) {
        simlab::SimConfig tmpl;
        tmpl.strategy.kind = simlab::Strategy::Kind::NetSignal;
        tmpl.strategy.cutoff = 0.0;
        tmpl.strategy.noise = ErrorDistribution::normal(alpha_z);
        tmpl.n_agents = n;
        tmpl.seed = 31337;
        std::vector<double> thetas;
        for (int i = 0; i <= 16; ++i) thetas.push_back(0.34 + 0.02 * i);
        const auto rows = simlab::sweep(tmpl, thetas, 1, {1.0, 0.0});
        double gap = 0.0;
        for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
            gap = std::max(gap, std::fabs(rows[i].terminal - rows[i + 1].terminal));
        }
        return gap;
    };
    const double gap16 = max_gap(16.0);
    const double gap4 = max_gap(4.0);
    ok = expect(gap16 > 0.5, "no hysteresis at alpha=16 (gap " + format_double(gap16) + ")",
                detail) &&
         ok;
    ok = expect(gap4 < 0.5, "spurious hysteresis at alpha=4 (gap " + format_double(gap4) + ")",
                detail) &&
         ok;
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "benchmark closed form reproduced numerically", 1.0, criterion_benchmark},
        {2, "fixed-point counts across the 2*pi precision threshold", 30.0, criterion_threshold},
        {3, "symmetric fixed point and mirror companions", 30.0, criterion_symmetric},
        {4, "posterior success probability limits", 30.0, criterion_limits},
        {5, "step equilibria exact below the overlap bound", 10.0, criterion_steps},
        {6, "two-signal conditions and iteration continuum", 300.0, criterion_twosignal},
        {7, "one-signal conditions, cutoff band, slope bound", 120.0, criterion_onesignal},
        {8, "Monte Carlo concentration and hysteresis window", 300.0, criterion_montecarlo},
    };

    int failures = 0;
    for (const auto& crit : criteria) {
        std::string detail;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = crit.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > crit.limit_seconds) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("runtime ") +
                      format_double(seconds) + "s exceeds " + format_double(crit.limit_seconds) +
                      "s";
        }
        std::printf("[%s] criterion %d: %s (%.2f s%s%s)\n", ok ? "PASS" : "FAIL", crit.id,
                    crit.name.c_str(), seconds, detail.empty() ? "" : " — ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
