#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace ggames {

/// A grid-sampled attack-mass map theta -> A(theta) with values in [0,1],
/// optionally carrying a jump at a switch point t. At a jump the grid holds
/// t twice: first entry is the left limit, second the right limit.
/// Evaluation is right-continuous at t; off-grid queries use linear
/// interpolation inside the window and constant extrapolation outside.
class AttackFunction {
  public:
    AttackFunction(std::vector<double> theta, std::vector<double> value,
                   std::optional<double> jump = std::nullopt);

    /// Uniform two-sided grid around a jump at t covering [t-K, t+K] with
    /// intervals_per_side cells per side. f(theta, left_side) supplies the
    /// values; t appears on both sides.
    static AttackFunction two_sided(double t, double halfwidth, int intervals_per_side,
                                    const std::function<double(double, bool)>& f);

    /// Indicator-style step: left_value for theta < t, right_value otherwise.
    static AttackFunction step(double t, double halfwidth, int intervals_per_side,
                               double left_value, double right_value);

    double operator()(double theta) const;
    /// Left limit at theta (differs from operator() only at the jump).
    double eval_left(double theta) const;

    bool has_jump() const { return jump_.has_value(); }
    double jump() const;
    double left_limit_at_jump() const;
    double right_limit_at_jump() const;

    const std::vector<double>& grid() const { return theta_; }
    const std::vector<double>& values() const { return value_; }
    std::size_t size() const { return theta_.size(); }
    double theta_lo() const { return theta_.front(); }
    double theta_hi() const { return theta_.back(); }
    /// Index of the first grid point belonging to the right side (== size()
    /// when no jump is present).
    std::size_t right_begin() const { return jump_ ? jump_index_ + 1 : theta_.size(); }

    double min_value() const;
    double max_value() const;
    /// Value hull [min,max] of the side left (resp. right) of the jump;
    /// whole window when no jump.
    std::pair<double, double> side_hull(bool left_side) const;

    /// sup |A - B| over the union of both grids restricted to the common
    /// window, comparing left and right limits at jumps.
    double sup_distance(const AttackFunction& other) const;
    /// Max over nodes of |A - B| for functions sharing this grid layout.
    double sup_delta_same_grid(const AttackFunction& other) const;

    /// Largest |forward difference quotient| within a side (never across
    /// the jump).
    double max_abs_slope() const;
    /// Most positive forward difference quotient within a side (> 0 means
    /// some increase).
    double max_signed_slope() const;

  private:
    std::vector<double> theta_;
    std::vector<double> value_;
    std::optional<double> jump_;
    std::size_t jump_index_ = 0;  // index of the left-limit entry at t

    double eval_segment(double theta, std::size_t lo, std::size_t hi) const;
};

}  // namespace ggames
