#include "ggames/benchmark.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ggames/common.hpp"
#include "ggames/dist.hpp"

namespace ggames::benchmark {

namespace {

void check_domain(double c, double alpha_x) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("benchmark: c must lie in (0,1)");
    if (!(alpha_x > 0.0)) throw std::domain_error("benchmark: alpha_x must be > 0");
}

}  // namespace

double residual_mass(const Solution& s) {
    return normal_cdf(std::sqrt(s.alpha_x) * (s.x_star - s.theta_star)) - s.theta_star;
}

double residual_indifference(const Solution& s) {
    return normal_cdf(std::sqrt(s.alpha_x) * (s.theta_star - s.x_star)) - s.c;
}

Solution solve(double c, double alpha_x) {
    check_domain(c, alpha_x);
    Solution s;
    s.c = c;
    s.alpha_x = alpha_x;
    const double q = normal_quantile(c);
    s.theta_star = normal_cdf(-q);
    s.x_star = s.theta_star - q / std::sqrt(alpha_x);
    return s;
}

Solution verify_numerically(double c, double alpha_x) {
    check_domain(c, alpha_x);
    // Indifference pins x(theta) = theta - Phi^{-1}(c)/sqrt(alpha_x);
    // substituting into the mass condition leaves a monotone map of theta.
    const double shift = normal_quantile(c) / std::sqrt(alpha_x);
    auto residual = [&](double theta) {
        return normal_cdf(std::sqrt(alpha_x) * ((theta - shift) - theta)) - theta;
    };
    double lo = 1e-12, hi = 1.0 - 1e-12;
    double flo = residual(lo), fhi = residual(hi);
    if (!(flo > 0.0 && fhi < 0.0)) {
        throw NumericalError("benchmark: bisection bracket failed, f(lo)=" +
                             format_double(flo) + " f(hi)=" + format_double(fhi));
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * 0.5; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Solution s;
    s.c = c;
    s.alpha_x = alpha_x;
    s.theta_star = 0.5 * (lo + hi);
    s.x_star = s.theta_star - shift;
    return s;
}

}  // namespace ggames::benchmark
