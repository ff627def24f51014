#pragma once

#include <cstdint>
#include <vector>

#include "ggames/dist.hpp"

namespace ggames::simlab {

/// Counter-based uniform draws: the SplitMix64 finalizer applied to a
/// (seed, round, agent, stream) key. Every draw is a pure function of the
/// key, so traces are bit-identical across platforms and worker counts.
std::uint64_t mix64(std::uint64_t x);
double uniform01(std::uint64_t seed, std::uint64_t round, std::uint64_t agent,
                 std::uint64_t stream = 0);

/// Cutoff rule an agent applies to its fresh signal draw each round.
struct Strategy {
    enum class Kind {
        NetSignal,    // z = A - theta + rho, attack iff z >= cutoff
        OneSignal,    // same signal form, general noise law
        Fundamental,  // x = theta + eps, attack iff x <= cutoff
        TwoSignal,    // x = theta + eps_x, y = A + eps_y, attack iff y >= yhat(x)
    };
    Kind kind = Kind::NetSignal;
    double cutoff = 0.0;
    ErrorDistribution noise = ErrorDistribution::normal(1.0);
    // two-signal threshold curve (piecewise linear in x)
    ErrorDistribution noise_y = ErrorDistribution::normal(1.0);
    std::vector<double> curve_x;
    std::vector<double> curve_yhat;
};

struct SimConfig {
    int n_agents = 100000;
    double theta = 0.5;
    Strategy strategy;
    std::uint64_t seed = 42;
    int max_rounds = 200;
    double damping = 1.0;     // in (0,1]
    double init_a = 0.5;
    double conv_tol = 0.0;    // 0 -> 1/sqrt(n_agents)
    int workers = 0;

    void validate() const;
};

struct SimTrace {
    std::vector<double> a_hat;  // a_hat[0] is the initial mass
    int convergence_round = -1;
    bool converged = false;
    double terminal = 0.0;
    bool success = false;  // terminal > theta; ties mean the status quo holds
    double damping_used = 1.0;
};

/// Each round every agent redraws its signal noise around (theta, previous
/// aggregate) and applies the cutoff rule; the attacking fraction becomes
/// the next aggregate (damped convex combination). Runs that fail to settle
/// at damping 1 are retried once at damping 0.5 before being reported as
/// non-convergent.
SimTrace run_steady_state(const SimConfig& cfg);

struct SweepRow {
    double theta = 0.0;
    std::uint64_t seed = 0;
    double init_a = 0.0;
    double terminal = 0.0;
    bool success = false;
    bool converged = false;
};

/// Deterministic (theta, replication, initialization) table, rows sorted;
/// non-convergent runs are flagged rows, not errors.
std::vector<SweepRow> sweep(const SimConfig& tmpl, const std::vector<double>& thetas,
                            int replications, const std::vector<double>& inits = {1.0, 0.0},
                            int workers = 0);

}  // namespace ggames::simlab
