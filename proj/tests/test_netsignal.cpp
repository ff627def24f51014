#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "ggames/common.hpp"
#include "ggames/dist.hpp"
#include "ggames/netsignal.hpp"
#include "test_oracles.hpp"

using namespace ggames;
using namespace ggames::netsignal;

TEST_CASE("symmetric triple at z* + theta = 1/2, alpha = 16") {
    const auto fps = attack_fixed_points(0.25, 0.25, 16.0);
    REQUIRE(fps.solutions.size() == 3);

    // middle solution is exactly 1/2 by symmetry
    CHECK(std::fabs(fps.solutions[1].value - 0.5) < 1e-12);

    // outer pair against the independent scan + bisection oracle
    const auto brute = oracle::brute_fixed_points(0.25, 0.25, 16.0);
    REQUIRE(brute.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(fps.solutions[i].value - brute[i]) < 1e-10);
    }
    // frozen from the oracle: 0.030074295720503819 / 0.96992570427949618
    CHECK(std::fabs(fps.solutions[0].value - 0.030074295720503819) < 1e-9);
    CHECK(std::fabs(fps.solutions[2].value - 0.96992570427949618) < 1e-9);
    // spec-level approximations
    CHECK(std::fabs(fps.solutions[0].value - 0.0303) < 5e-4);
    CHECK(std::fabs(fps.solutions[2].value - 0.9697) < 5e-4);

    // symmetric companions A and 1 - A
    CHECK(std::fabs(fps.solutions[0].value + fps.solutions[2].value - 1.0) < 1e-10);

    // stability alternates stable / unstable / stable
    CHECK(fps.solutions[0].stable);
    CHECK_FALSE(fps.solutions[1].stable);
    CHECK(fps.solutions[2].stable);
    // slope at the middle solution is sqrt(alpha) phi(0) = 1.5957691216...
    CHECK(fps.solutions[1].slope == doctest::Approx(1.5957691216057307).epsilon(1e-12));
}

TEST_CASE("below the multiplicity threshold the fixed point is unique") {
    for (double theta : {-1.0, 0.2, 0.5, 0.8, 2.0}) {
        for (double z : {-1.0, 0.0, 0.5}) {
            const auto fps = attack_fixed_points(theta, z, 4.0);
            CHECK(fps.solutions.size() == 1);
            CHECK(fps.solutions[0].slope < 1.0);
            CHECK(oracle::brute_fixed_points(theta, z, 4.0).size() == 1);
        }
    }
}

TEST_CASE("hopeless fundamental pins the attack at zero") {
    const auto fps = attack_fixed_points(10.0, 0.0, 16.0);
    REQUIRE(fps.solutions.size() == 1);
    CHECK(fps.solutions[0].value <= 1e-12);
}

TEST_CASE("fixed-point residuals over a random parameter sweep") {
    std::uint64_t rng = 20260810;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double theta = oracle::uniform(rng, -2.0, 3.0);
        const double z = oracle::uniform(rng, -2.0, 2.0);
        const double alpha = oracle::uniform(rng, 0.5, 32.0);
        const auto fps = attack_fixed_points(theta, z, alpha);
        REQUIRE(fps.solutions.size() >= 1);
        REQUIRE(fps.solutions.size() <= 3);
        if (fps.solutions.size() == 3) CHECK(alpha > kTwoPi);
        const double s = std::sqrt(alpha);
        for (std::size_t i = 0; i < fps.solutions.size(); ++i) {
            const double a = fps.solutions[i].value;
            worst = std::max(worst,
                             std::fabs(a - (1.0 - normal_cdf(s * (z - a + theta)))));
            if (i) CHECK(fps.solutions[i].value > fps.solutions[i - 1].value);
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("multiplicity region from the tangency condition") {
    // at the threshold precision the window degenerates
    CHECK(multiplicity_region(0.0, kTwoPi).empty);
    CHECK(multiplicity_region(0.3, 4.0).empty);

    const auto r = multiplicity_region(0.0, 16.0);
    REQUIRE_FALSE(r.empty);
    // frozen from the tangency solution at alpha = 16, z* = 0
    CHECK(std::fabs(r.theta_low - 0.40852201223020500) < 1e-12);
    CHECK(std::fabs(r.theta_high - 0.59147798776979500) < 1e-12);
    // symmetric about 1/2
    CHECK(std::fabs(r.theta_low + r.theta_high - 1.0) < 1e-12);
    // translates with z*
    const auto r2 = multiplicity_region(0.7, 16.0);
    CHECK(r2.theta_low == doctest::Approx(r.theta_low - 0.7).epsilon(1e-12));

    // interior probes carry three solutions, exterior probes one
    const double w = r.theta_high - r.theta_low;
    for (double frac : {0.25, 0.5, 0.75}) {
        const double theta = r.theta_low + frac * w;
        CHECK(attack_fixed_points(theta, 0.0, 16.0).solutions.size() == 3);
        CHECK(oracle::brute_fixed_points(theta, 0.0, 16.0).size() == 3);
    }
    for (double theta : {r.theta_low - 0.25 * w, r.theta_high + 0.25 * w}) {
        CHECK(attack_fixed_points(theta, 0.0, 16.0).solutions.size() == 1);
        CHECK(oracle::brute_fixed_points(theta, 0.0, 16.0).size() == 1);
    }
}

TEST_CASE("fold transition 1 -> 3 -> 1 sweeping theta") {
    const auto r = multiplicity_region(0.0, 16.0);
    int state = 0;  // counts of consecutive count-regimes seen
    std::size_t prev = 0;
    for (int i = 0; i <= 300; ++i) {
        const double theta = (r.theta_low - 0.1) + (r.theta_high - r.theta_low + 0.2) * i / 300.0;
        const std::size_t count = attack_fixed_points(theta, 0.0, 16.0).solutions.size();
        if (count != prev) {
            ++state;
            prev = count;
        }
    }
    CHECK(state == 3);  // 1, then 3, then 1
}

TEST_CASE("branch policy moves the composite switch across the fold window") {
    const auto r = multiplicity_region(0.0, 16.0);
    const double theta = 0.5 * (r.theta_low + r.theta_high);
    const double up = upper_branch(theta, 0.0, 16.0);
    const double lo = lower_branch(theta, 0.0, 16.0);

    BranchPolicy frac0{BranchPolicy::Mode::RegionFraction, 0.0};   // switch at theta_low
    BranchPolicy frac1{BranchPolicy::Mode::RegionFraction, 1.0};   // switch at theta_high
    CHECK(composite_attack(theta, 0.0, 16.0, frac0) == doctest::Approx(lo).epsilon(1e-12));
    CHECK(composite_attack(theta, 0.0, 16.0, frac1) == doctest::Approx(up).epsilon(1e-12));

    BranchPolicy abs_lo{BranchPolicy::Mode::AbsoluteTheta, theta - 1.0};  // clamped into window
    CHECK(composite_attack(theta, 0.0, 16.0, abs_lo) == doctest::Approx(lo).epsilon(1e-12));
}

TEST_CASE("outer branches slope downward") {
    const auto r = multiplicity_region(0.0, 16.0);
    const double h = 1e-5;
    for (double frac : {0.2, 0.5, 0.8}) {
        const double theta = r.theta_low + frac * (r.theta_high - r.theta_low);
        CHECK(upper_branch(theta + h, 0.0, 16.0) < upper_branch(theta - h, 0.0, 16.0));
        CHECK(lower_branch(theta + h, 0.0, 16.0) < lower_branch(theta - h, 0.0, 16.0));
    }
}

TEST_CASE("posterior success probability: limits and shape") {
    CHECK(posterior_success_prob(12.0, 16.0) >= 1.0 - 1e-6);
    CHECK(posterior_success_prob(-12.0, 16.0) <= 1e-6);

    // symmetry pins the midpoint for the centered branch
    CHECK(posterior_success_prob(0.0, 16.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(posterior_success_prob(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-9));

    // in [0,1] and weakly increasing across the midrange grid
    double prev = -1.0;
    for (int i = 0; i <= 24; ++i) {
        const double z = -3.0 + 6.0 * i / 24.0;
        const double p = posterior_success_prob(z, 16.0);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p >= prev - 1e-9);
        prev = p;
    }

    // refined-quadrature oracle: tighter tolerance and doubled window agree
    PosteriorOptions fine;
    fine.quad_tol = 1e-13;
    fine.window = 200.0 / 4.0;
    for (double z : {-1.5, -0.2, 0.9, 2.5}) {
        CHECK(std::fabs(posterior_success_prob(z, 16.0) -
                        posterior_success_prob(z, 16.0, {}, fine)) < 1e-7);
    }
}

TEST_CASE("equilibrium cutoffs at low precision: a clean root") {
    const auto scan = find_equilibrium_cutoffs(0.5, 1.0);
    REQUIRE_FALSE(scan.cutoffs.empty());
    bool found = false;
    for (const auto& cut : scan.cutoffs) {
        if (cut.kind == Cutoff::Kind::Root && std::fabs(cut.posterior - 0.5) < 1e-6) found = true;
        // symmetry places the cutoff at z* = 0
        CHECK(std::fabs(cut.z_star) < 0.05);
    }
    CHECK(found);
}

TEST_CASE("equilibrium cutoffs at alpha = 16: the level-c plateau") {
    const auto scan = find_equilibrium_cutoffs(0.5, 16.0);
    REQUIRE_FALSE(scan.cutoffs.empty());
    for (const auto& cut : scan.cutoffs) {
        const bool on_level = std::fabs(cut.posterior - 0.5) < 1e-6;
        CHECK((on_level || cut.kind == Cutoff::Kind::Discontinuity));
    }
    // the centered branch is indifferent across a symmetric z* interval
    const auto& main = scan.cutoffs.front();
    CHECK(std::fabs(main.z_star) < 0.1);
    CHECK(main.z_lo < -0.3);
    CHECK(main.z_hi > 0.3);
}

TEST_CASE("cutoff scan outside the crossing window is empty, not an error") {
    CutoffScanOptions opts;
    opts.z_lo = 5.0;
    opts.z_hi = 6.0;
    opts.points = 17;
    const auto scan = find_equilibrium_cutoffs(0.5, 1.0, opts);
    CHECK(scan.cutoffs.empty());
    CHECK(scan.window_lo == 5.0);
    CHECK(scan.window_hi == 6.0);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(attack_fixed_points(0.0, 0.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(multiplicity_region(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(find_equilibrium_cutoffs(0.0, 16.0), std::domain_error);
}
