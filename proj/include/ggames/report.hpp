#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ggames/attack_function.hpp"

namespace ggames {

/// One step of a best-response iteration.
struct IterationStep {
    int n = 0;
    double sup_delta = 0.0;
    double cutoff = std::numeric_limits<double>::quiet_NaN();  // z^n where applicable
    double max_abs_slope = 0.0;
    double min_left = 0.0;   // min A over theta < t
    double max_right = 0.0;  // max A over theta >= t
    bool bounds_ok = true;
    bool cutoff_in_band = true;
};

/// Result of a best-response iteration to a steady state.
struct EquilibriumReport {
    bool converged = false;
    int iterations = 0;
    std::vector<IterationStep> trace;
    AttackFunction limit;
    double max_residual = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> cutoff;              // terminal z^n (one-signal model)
    std::optional<double> cutoff_offset;       // z^n - (1 - delta - t)
    std::optional<double> slope_bound;         // g(delta-gamma)/(1-g(delta-gamma))
    bool monotone_per_side = true;             // diagnostic, not an invariant

    explicit EquilibriumReport(AttackFunction lim) : limit(std::move(lim)) {}
};

}  // namespace ggames
