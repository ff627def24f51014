#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "ggames/common.hpp"
#include "ggames/dist.hpp"
#include "ggames/onesignal.hpp"

using namespace ggames;
using namespace ggames::onesignal;

namespace {

Prop5Params sharp_normal() {
    Prop5Params p;
    p.delta = 0.2;
    p.gamma = 0.1;
    p.c = 0.5;
    p.dist_rho = ErrorDistribution::normal(1e4);
    return p;
}

}  // namespace

TEST_CASE("sufficient conditions under high-precision normal noise") {
    const auto check = check_prop5_conditions(sharp_normal(), 2.7);
    CHECK(check.satisfied);
    // G(gamma) -> 1 and g(delta - gamma) -> 0 as the precision grows
    CHECK(check.margin_signal_mass == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(check.margin_density == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(check.margin_odds == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("uniform noise inside the band makes the mass condition exact") {
    Prop5Params p = sharp_normal();
    p.dist_rho = ErrorDistribution::uniform(0.05);  // support within [-gamma, gamma]
    const auto check = check_prop5_conditions(p, 2.7);
    CHECK(p.dist_rho.cdf(p.gamma) == 1.0);
    CHECK(check.margin_signal_mass == doctest::Approx(0.2));
    CHECK(check.satisfied);
}

TEST_CASE("imprecise normal noise fails the signal-mass condition") {
    Prop5Params p = sharp_normal();
    p.dist_rho = ErrorDistribution::normal(1.0);
    const auto check = check_prop5_conditions(p, 2.7);
    CHECK_FALSE(check.satisfied);
    // frozen: G(0.1) = Phi(0.1) = 0.53982783727702898
    CHECK(check.margin_signal_mass ==
          doctest::Approx(0.53982783727702898 - 0.8).epsilon(1e-9));

    CHECK_THROWS_AS(check_prop5_conditions(p, 0.1), std::domain_error);
}

TEST_CASE("cutoff sits at the symmetry point for the centered step") {
    const auto p = sharp_normal();
    const auto a0 = AttackFunction::step(0.5, 0.05, 400, 1.0 - p.delta, p.delta);
    const auto cut = attack_cutoff(a0, p);
    CHECK(std::fabs(cut.z) < 1e-9);
    CHECK(cut.band_center == doctest::Approx(0.0));
    CHECK(cut.in_band);
    CHECK(cut.offset_from_lemma4 == doctest::Approx(cut.z - 0.3).epsilon(1e-12));

    // posterior brackets the cost across the cutoff
    CHECK(posterior_below_t(cut.z + 1e-6, a0, p) >= p.c);
    CHECK(posterior_below_t(cut.z - 1e-6, a0, p) <= p.c);
}

TEST_CASE("off-center switch point shifts the cutoff with the band") {
    const auto p = sharp_normal();
    const double t = 0.35;
    const auto a0 = AttackFunction::step(t, 0.05, 400, 1.0 - p.delta, p.delta);
    const auto cut = attack_cutoff(a0, p);
    CHECK(cut.band_center == doctest::Approx(0.5 - t));
    CHECK(std::fabs(cut.z - cut.band_center) < p.gamma);
    CHECK(cut.in_band);
}

TEST_CASE("best response has the one-evaluation-per-theta closed form") {
    Prop5Params p = sharp_normal();
    p.dist_rho = ErrorDistribution::uniform(0.04);
    const double t = 0.5;
    const auto a0 = AttackFunction::step(t, 0.2, 500, 1.0 - p.delta, p.delta);
    const double z0 = attack_cutoff(a0, p).z;
    const auto a1 = best_response(a0, z0, p);

    // uniform cdf gives an exact piecewise-linear ramp
    const double sigma = 0.04;
    auto uniform_cdf = [&](double u) {
        if (u <= -sigma) return 0.0;
        if (u >= sigma) return 1.0;
        return 0.5 * (u / sigma + 1.0);
    };
    const auto& th = a1.grid();
    const auto& av = a1.values();
    for (std::size_t i = 0; i < th.size(); ++i) {
        const bool left = th[i] < t || (th[i] == t && i < a1.right_begin());
        const double prev = left ? 1.0 - p.delta : p.delta;
        CHECK(av[i] == doctest::Approx(1.0 - uniform_cdf(z0 - prev + th[i])).epsilon(1e-12));
    }

    // values respond to theta only through z - A + theta
    const double probe = 1.0 - uniform_cdf(z0 - (1.0 - p.delta) + (t - 0.15));
    CHECK(a1(t - 0.15) == doctest::Approx(probe).epsilon(1e-12));
}

TEST_CASE("posterior agrees with direct quadrature on a sloped conjecture") {
    Prop5Params p = sharp_normal();
    p.dist_rho = ErrorDistribution::normal(64.0);  // wide enough to span the window
    const double t = 0.5;
    // a gently sloped conjecture within the iteration bounds
    const auto conj = AttackFunction::two_sided(t, 0.625, 500, [&](double th, bool left) {
        return left ? 0.9 - 0.05 * (th - (t - 0.625)) / 1.25
                    : 0.15 - 0.05 * (th - t) / 1.25;
    });

    auto g = [&](double u) { return p.dist_rho.pdf(u); };
    for (double z : {-0.4, 0.0, 0.3}) {
        // interior by adaptive quadrature (left limits on the below side so
        // the integrand stays continuous up to t); exact cdf tails
        const double below =
            integrate([&](double th) { return g(z - conj.eval_left(th) + th); }, t - 3.0, t,
                      1e-13) +
            p.dist_rho.cdf(z - conj(t - 0.625) + (t - 3.0));
        const double above =
            integrate([&](double th) { return g(z - conj(th) + th); }, t, t + 3.0, 1e-13) +
            1.0 - p.dist_rho.cdf(z - conj(t + 0.625) + (t + 3.0));
        const double expected = below / (below + above);
        CHECK(std::fabs(posterior_below_t(z, conj, p) - expected) < 1e-7);
    }
}

TEST_CASE("bound preservation along the iteration") {
    const auto p = sharp_normal();
    const auto a0 = AttackFunction::step(0.5, 0.05, 1000, 1.0 - p.delta, p.delta);
    const double z0 = attack_cutoff(a0, p).z;
    const auto a1 = best_response(a0, z0, p);
    CHECK(a1.side_hull(true).first >= 1.0 - p.delta - 1e-9);
    CHECK(a1.side_hull(false).second <= p.delta + 1e-9);
}

TEST_CASE("iteration: convergence, slope bound, monotonicity") {
    const auto p = sharp_normal();
    const auto rep = iterate_to_equilibrium(0.5, p);
    CHECK(rep.converged);
    CHECK(rep.max_residual < 1e-4);
    REQUIRE(rep.slope_bound.has_value());

    const double slope_cap = *rep.slope_bound + 1e-3;  // grid allowance
    for (const auto& step : rep.trace) {
        CHECK(step.bounds_ok);
        CHECK(step.cutoff_in_band);
        CHECK(step.max_abs_slope <= slope_cap);
    }
    CHECK(rep.monotone_per_side);
    REQUIRE(rep.cutoff.has_value());
    CHECK(std::fabs(*rep.cutoff) < p.gamma);
}

TEST_CASE("uniform noise below min(gamma, 1/2): the step is exactly stationary") {
    Prop5Params p = sharp_normal();
    p.dist_rho = ErrorDistribution::uniform(0.05);
    const auto rep = iterate_to_equilibrium(0.5, p);
    CHECK(rep.converged);
    CHECK(rep.max_residual == 0.0);
    CHECK(rep.iterations <= 3);
    // the limit collapses to the hard step inside the window
    CHECK(rep.limit.left_limit_at_jump() == 1.0);
    CHECK(rep.limit.right_limit_at_jump() == 0.0);
}

TEST_CASE("domain errors") {
    const auto p = sharp_normal();
    CHECK_THROWS_AS(iterate_to_equilibrium(0.1, p), std::domain_error);
    Prop5Params bad = p;
    bad.delta = 0.4;
    bad.gamma = 0.2;  // admissible switch interval empty
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
}
