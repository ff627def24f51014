#pragma once

namespace ggames::benchmark {

/// Equilibrium of the fundamentals-only game: agents observe x = theta +
/// noise with precision alpha_x and attack below the signal threshold
/// x_star; the attack succeeds below the fundamental threshold theta_star.
struct Solution {
    double c = 0.0;
    double alpha_x = 0.0;
    double x_star = 0.0;
    double theta_star = 0.0;
};

/// Phi(sqrt(alpha_x) (x_star - theta_star)) - theta_star (success-mass
/// consistency at the threshold).
double residual_mass(const Solution& s);
/// Phi(sqrt(alpha_x) (theta_star - x_star)) - c (payoff indifference).
double residual_indifference(const Solution& s);

/// Closed form: theta_star = Phi(-Phi^{-1}(c)), x_star = theta_star -
/// Phi^{-1}(c)/sqrt(alpha_x). Throws std::domain_error outside c in (0,1),
/// alpha_x > 0.
Solution solve(double c, double alpha_x);

/// Solves the two-equation system numerically (bisection on theta after
/// substituting the indifference condition), never touching the closed
/// form. Agrees with solve() to 1e-8. Throws NumericalError on a failed
/// bracket.
Solution verify_numerically(double c, double alpha_x);

}  // namespace ggames::benchmark
