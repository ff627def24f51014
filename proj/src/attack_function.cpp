#include "ggames/attack_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ggames {

AttackFunction::AttackFunction(std::vector<double> theta, std::vector<double> value,
                               std::optional<double> jump)
    : theta_(std::move(theta)), value_(std::move(value)), jump_(jump) {
    if (theta_.size() < 2 || theta_.size() != value_.size()) {
        throw std::domain_error("AttackFunction: need matching theta/value arrays, n >= 2");
    }
    for (double v : value_) {
        if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) {
            throw std::domain_error("AttackFunction: values must lie in [0,1]");
        }
    }
    if (jump_) {
        // locate the duplicated t entry
        const double t = *jump_;
        auto it = std::lower_bound(theta_.begin(), theta_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - theta_.begin());
        if (i + 1 >= theta_.size() || theta_[i] != t || theta_[i + 1] != t) {
            throw std::domain_error("AttackFunction: jump point must appear twice in the grid");
        }
        jump_index_ = i;
    }
    for (std::size_t i = 0; i + 1 < theta_.size(); ++i) {
        const bool at_jump = jump_ && i == jump_index_;
        if (at_jump ? theta_[i] != theta_[i + 1] : !(theta_[i] < theta_[i + 1])) {
            throw std::domain_error("AttackFunction: grid must be strictly increasing");
        }
    }
}

AttackFunction AttackFunction::two_sided(double t, double halfwidth, int intervals_per_side,
                                         const std::function<double(double, bool)>& f) {
    if (!(halfwidth > 0.0) || intervals_per_side < 2) {
        throw std::domain_error("AttackFunction::two_sided: bad grid parameters");
    }
    const int m = intervals_per_side;
    std::vector<double> theta, value;
    theta.reserve(2 * static_cast<std::size_t>(m) + 2);
    value.reserve(theta.capacity());
    for (int i = 0; i <= m; ++i) {
        const double th = t - halfwidth + halfwidth * static_cast<double>(i) / m;
        theta.push_back(i == m ? t : th);
        value.push_back(f(theta.back(), true));
    }
    for (int i = 0; i <= m; ++i) {
        const double th = t + halfwidth * static_cast<double>(i) / m;
        theta.push_back(i == 0 ? t : th);
        value.push_back(f(theta.back(), false));
    }
    return AttackFunction(std::move(theta), std::move(value), t);
}

AttackFunction AttackFunction::step(double t, double halfwidth, int intervals_per_side,
                                    double left_value, double right_value) {
    return two_sided(t, halfwidth, intervals_per_side,
                     [&](double, bool left) { return left ? left_value : right_value; });
}

double AttackFunction::jump() const {
    if (!jump_) throw std::logic_error("AttackFunction: no jump present");
    return *jump_;
}

double AttackFunction::left_limit_at_jump() const {
    if (!jump_) throw std::logic_error("AttackFunction: no jump present");
    return value_[jump_index_];
}

double AttackFunction::right_limit_at_jump() const {
    if (!jump_) throw std::logic_error("AttackFunction: no jump present");
    return value_[jump_index_ + 1];
}

double AttackFunction::eval_segment(double theta, std::size_t lo, std::size_t hi) const {
    if (theta <= theta_[lo]) return value_[lo];
    if (theta >= theta_[hi]) return value_[hi];
    const auto first = theta_.begin() + static_cast<std::ptrdiff_t>(lo);
    const auto last = theta_.begin() + static_cast<std::ptrdiff_t>(hi) + 1;
    const auto it = std::upper_bound(first, last, theta);
    const std::size_t i = static_cast<std::size_t>(it - theta_.begin()) - 1;
    const double w = (theta - theta_[i]) / (theta_[i + 1] - theta_[i]);
    return value_[i] + w * (value_[i + 1] - value_[i]);
}

double AttackFunction::operator()(double theta) const {
    if (!jump_) return eval_segment(theta, 0, theta_.size() - 1);
    if (theta < *jump_) return eval_segment(theta, 0, jump_index_);
    return eval_segment(theta, jump_index_ + 1, theta_.size() - 1);
}

double AttackFunction::eval_left(double theta) const {
    if (jump_ && theta == *jump_) return value_[jump_index_];
    return (*this)(theta);
}

double AttackFunction::min_value() const {
    return *std::min_element(value_.begin(), value_.end());
}

double AttackFunction::max_value() const {
    return *std::max_element(value_.begin(), value_.end());
}

std::pair<double, double> AttackFunction::side_hull(bool left_side) const {
    std::size_t lo = 0, hi = value_.size();
    if (jump_) {
        if (left_side) {
            hi = jump_index_ + 1;
        } else {
            lo = jump_index_ + 1;
        }
    }
    double mn = value_[lo], mx = value_[lo];
    for (std::size_t i = lo; i < hi; ++i) {
        mn = std::min(mn, value_[i]);
        mx = std::max(mx, value_[i]);
    }
    return {mn, mx};
}

double AttackFunction::sup_distance(const AttackFunction& other) const {
    const double lo = std::max(theta_lo(), other.theta_lo());
    const double hi = std::min(theta_hi(), other.theta_hi());
    if (!(lo < hi)) throw std::domain_error("sup_distance: windows do not overlap");
    double sup = 0.0;
    auto visit = [&](double th) {
        if (th < lo || th > hi) return;
        sup = std::max(sup, std::fabs((*this)(th) - other(th)));
        sup = std::max(sup, std::fabs(eval_left(th) - other.eval_left(th)));
    };
    for (double th : theta_) visit(th);
    for (double th : other.theta_) visit(th);
    return sup;
}

double AttackFunction::sup_delta_same_grid(const AttackFunction& other) const {
    if (other.theta_ != theta_) throw std::domain_error("sup_delta_same_grid: grid mismatch");
    double sup = 0.0;
    for (std::size_t i = 0; i < value_.size(); ++i) {
        sup = std::max(sup, std::fabs(value_[i] - other.value_[i]));
    }
    return sup;
}

double AttackFunction::max_abs_slope() const {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < value_.size(); ++i) {
        if (jump_ && i == jump_index_) continue;
        const double h = theta_[i + 1] - theta_[i];
        worst = std::max(worst, std::fabs(value_[i + 1] - value_[i]) / h);
    }
    return worst;
}

double AttackFunction::max_signed_slope() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < value_.size(); ++i) {
        if (jump_ && i == jump_index_) continue;
        const double h = theta_[i + 1] - theta_[i];
        worst = std::max(worst, (value_[i + 1] - value_[i]) / h);
    }
    return worst;
}

}  // namespace ggames
