#pragma once

#include <vector>

#include "ggames/common.hpp"

namespace ggames::netsignal {

/// One solution of the attack-mass equation A = 1 - Phi(sqrt(alpha_z)
/// (z_star - A + theta)) with its local stability under the map (stable
/// iff the map's slope sqrt(alpha_z) phi(.) is below 1 at the solution).
struct FixedPoint {
    double value = 0.0;
    double slope = 0.0;
    bool stable = true;
};

struct FixedPointSet {
    double theta = 0.0;
    double z_star = 0.0;
    double alpha_z = 0.0;
    std::vector<FixedPoint> solutions;  // strictly increasing
};

/// All fixed points on [0,1], bracketed on a uniform 2^grid_bits residual
/// grid and bisected to tol.
FixedPointSet attack_fixed_points(double theta, double z_star, double alpha_z,
                                  int grid_bits = 12, double tol = 1e-12);

/// Fold window [theta_low, theta_high]: the theta interval with three fixed
/// points, obtained from the simultaneous solution of the fixed-point
/// equation and the unit-slope (tangency) condition. Empty iff
/// alpha_z <= 2*pi.
struct MultiplicityRegion {
    double z_star = 0.0;
    double alpha_z = 0.0;
    bool empty = true;
    double theta_low = 0.0;
    double theta_high = 0.0;
};

MultiplicityRegion multiplicity_region(double z_star, double alpha_z);

/// Smallest solution branch (exists for theta >= theta_low).
double lower_branch(double theta, double z_star, double alpha_z);
/// Largest solution branch (exists for theta <= theta_high).
double upper_branch(double theta, double z_star, double alpha_z);

/// Switch rule for the composite downward-sloping attack function built
/// from the outer branches: upper branch below the switch, lower above.
/// RegionCenter pins the switch to the middle of the fold window,
/// RegionFraction at value in [0,1] across it, AbsoluteTheta uses value
/// verbatim (clamped into the window).
struct BranchPolicy {
    enum class Mode { RegionCenter, RegionFraction, AbsoluteTheta };
    Mode mode = Mode::RegionCenter;
    double value = 0.5;
};

/// Composite attack function at theta (the unique solution when only one
/// exists).
double composite_attack(double theta, double z_star, double alpha_z,
                        const BranchPolicy& policy = {});

struct PosteriorOptions {
    double window = 0.0;          // half width in signal units; 0 -> 50/sqrt(alpha_z)
    double quad_tol = 1e-12;      // absolute quadrature tolerance per piece
    double window_check = 1e-8;   // posterior change allowed when doubling the window
    int max_doublings = 6;
};

/// P(A_t(theta, z_star) - theta > 0 | z_star): probability of success under
/// the composite branch, computed by Bayes with a uniform improper prior
/// realized as a wide finite window (doubled until the value is stable).
double posterior_success_prob(double z_star, double alpha_z, const BranchPolicy& policy = {},
                              const PosteriorOptions& opts = {});

struct Cutoff {
    enum class Kind { Root, Discontinuity };
    Kind kind = Kind::Root;
    double z_star = 0.0;
    double z_lo = 0.0;   // extent when the posterior sits at the level c
    double z_hi = 0.0;   // over an interval; z_lo == z_hi for point roots
    double posterior = 0.0;
};

struct CutoffScanOptions {
    double z_lo = -8.0;
    double z_hi = 8.0;
    int points = 257;
    double refine_dz = 1e-8;      // refined spacing at a crossing
    double jump_threshold = 0.1;  // posterior change declaring a discontinuity
    double plateau_tol = 1e-9;    // |P - c| treated as sitting on the level
    int workers = 0;
    BranchPolicy policy = {};
    PosteriorOptions posterior = {};
};

struct CutoffScan {
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<Cutoff> cutoffs;  // sorted by z_star; may be empty
};

/// Scans a z_star grid for crossings of the posterior success probability
/// through the level c. Smooth sign changes are classified as roots, jumps
/// over c (posterior change above jump_threshold across refine_dz) as
/// discontinuities. An empty result is not an error; the scan window is
/// reported.
CutoffScan find_equilibrium_cutoffs(double c, double alpha_z, const CutoffScanOptions& opts = {});

}  // namespace ggames::netsignal
