#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "ggames/common.hpp"

namespace ggames {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal cumulative distribution, computed from a rational
/// approximation of the complementary error function (Cody's erfc).
/// Absolute error below 1e-14 over the full double range.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0,1): bracketed bisection followed by Newton
/// polish on the cdf. Throws std::domain_error outside (0,1).
double normal_quantile(double p);

struct IntegrateOptions {
    int max_depth = 48;
    // Infinite endpoints are truncated at +/- tail_width * tail_scale.
    double tail_width = 8.0;
    double tail_scale = 1.0;
};

/// Adaptive Simpson quadrature with absolute tolerance tol. Deterministic
/// for identical inputs. Throws IntegrationError (carrying the partial
/// estimate) when the refinement depth is exhausted.
double integrate(const std::function<double(double)>& f, double lo, double hi, double tol,
                 const IntegrateOptions& opts = {});

/// A symmetric error-noise law: normal with precision alpha (variance
/// 1/alpha), uniform on [-sigma, sigma], or a user-tabulated symmetric
/// density (piecewise linear, normalized at construction).
class ErrorDistribution {
  public:
    enum class Kind { Normal, Uniform, Tabulated };

    static ErrorDistribution normal(double precision);
    static ErrorDistribution uniform(double half_width);
    static ErrorDistribution tabulated(std::vector<double> x, std::vector<double> density);

    Kind kind() const { return kind_; }
    /// 1/variance for the normal kind; throws otherwise.
    double precision() const;
    /// Support half width for the uniform kind; throws otherwise.
    double half_width() const;

    double pdf(double x) const;
    double cdf(double x) const;
    double quantile(double p) const;

    double stddev() const { return stddev_; }
    bool symmetric() const { return true; }
    bool bounded() const { return kind_ != Kind::Normal; }
    /// Half width of the support; +inf for the normal kind.
    double support_halfwidth() const { return support_; }
    /// Whether the density is log-concave (checked numerically for
    /// tabulated laws); monotone-likelihood-ratio shortcuts key off this.
    bool log_concave() const { return log_concave_; }

    /// Wire format: {"kind":"normal","precision":a}, {"kind":"uniform",
    /// "half_width":s}, or {"kind":"tabulated","x":[...],"density":[...]}.
    static ErrorDistribution from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

  private:
    ErrorDistribution() = default;

    Kind kind_ = Kind::Normal;
    double param_ = 1.0;    // precision (normal) or half width (uniform)
    double sigma_ = 1.0;    // scale: 1/sqrt(precision) for normal
    double stddev_ = 1.0;
    double support_ = std::numeric_limits<double>::infinity();
    bool log_concave_ = true;

    // tabulated law
    std::vector<double> tx_;
    std::vector<double> td_;
    std::vector<double> tc_;  // cdf at nodes
};

}  // namespace ggames
