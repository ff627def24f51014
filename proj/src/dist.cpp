#include "ggames/dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ggames {

namespace {

// Rational approximations of erf/erfc after W. J. Cody, "Rational Chebyshev
// approximation for the error function" (netlib CALERF coefficient sets).
// Three regimes: |x| <= 0.46875, 0.46875 < |x| <= 4, |x| > 4. The exp(-x^2)
// factor is split as exp(-q^2)*exp(-(x-q)(x+q)) with q = trunc(16x)/16 to
// keep the tail accurate. Absolute error of the resulting normal cdf is
// below 1e-14 (checked against a long-double series/continued-fraction
// oracle in the test suite).
constexpr double kErfA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                             3.77485237685302021e+02, 3.20937758913846947e+03,
                             1.85777706184603153e-01};
constexpr double kErfB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                             1.28261652607737228e+03, 2.84423683343917062e+03};
constexpr double kErfC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                             6.61191906371416295e+01, 2.98635138197400131e+02,
                             8.81952221241769090e+02, 1.71204761263407058e+03,
                             2.05107837782607147e+03, 1.23033935479799725e+03,
                             2.15311535474403846e-08};
constexpr double kErfD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                             5.37181101862009858e+02, 1.62138957456669019e+03,
                             3.29079923573345963e+03, 4.36261909014324716e+03,
                             3.43936767414372164e+03, 1.23033935480374942e+03};
constexpr double kErfP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                             1.25781726111229246e-01, 1.60837851487422766e-02,
                             6.58749161529837803e-04, 1.63153871373020978e-02};
constexpr double kErfQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                             5.27905102951428412e-01, 6.05183413124413191e-02,
                             2.33520497626869185e-03};
constexpr double kOneOverSqrtPi = 5.6418958354775628695e-01;

double erf_small(double x) {
    const double z = x * x;
    double num = kErfA[4] * z;
    double den = z;
    for (int i = 0; i < 3; ++i) {
        num = (num + kErfA[i]) * z;
        den = (den + kErfB[i]) * z;
    }
    return x * (num + kErfA[3]) / (den + kErfB[3]);
}

double exp_split(double y, double factor) {
    // factor * exp(-y^2) with the argument split to avoid cancellation.
    const double q = std::trunc(y * 16.0) / 16.0;
    const double del = (y - q) * (y + q);
    return std::exp(-q * q) * std::exp(-del) * factor;
}

// erfc(y) for y >= 0.46875.
double erfc_pos(double y) {
    if (y <= 4.0) {
        double num = kErfC[8] * y;
        double den = y;
        for (int i = 0; i < 7; ++i) {
            num = (num + kErfC[i]) * y;
            den = (den + kErfD[i]) * y;
        }
        return exp_split(y, (num + kErfC[7]) / (den + kErfD[7]));
    }
    if (y >= 26.7) return 0.0;  // below double underflow for exp(-y^2)
    const double z = 1.0 / (y * y);
    double num = kErfP[5] * z;
    double den = z;
    for (int i = 0; i < 4; ++i) {
        num = (num + kErfP[i]) * z;
        den = (den + kErfQ[i]) * z;
    }
    double r = z * (num + kErfP[4]) / (den + kErfQ[4]);
    r = (kOneOverSqrtPi - r) / y;
    return exp_split(y, r);
}

double erfc_impl(double x) {
    const double y = std::fabs(x);
    if (y <= 0.46875) return 1.0 - erf_small(x);
    const double r = erfc_pos(y);
    return x < 0.0 ? 2.0 - r : r;
}

struct SimpsonState {
    const std::function<double(double)>* f;
    int max_depth;
    bool failed = false;
};

double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = (*st.f)(lm);
    const double frm = (*st.f)(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol || (b - a) < 1e-300) {
        return left + right + delta / 15.0;
    }
    if (depth >= st.max_depth) {
        st.failed = true;
        return left + right + delta / 15.0;
    }
    return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrtTwoPi; }

double normal_cdf(double x) {
    // Phi(x) = erfc(-x / sqrt(2)) / 2
    return 0.5 * erfc_impl(-x * 0.70710678118654752440);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_quantile: p must lie in (0,1)");
    }
    if (p == 0.5) return 0.0;  // median of the symmetric law
    double lo = -40.0, hi = 40.0;
    // Bisection narrows the bracket, Newton finishes on the cdf.
    for (int i = 0; i < 24; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 60; ++i) {
        const double err = normal_cdf(x) - p;
        if (err > 0.0) {
            hi = x;
        } else if (err < 0.0) {
            lo = x;
        } else {
            return x;
        }
        const double d = normal_pdf(x);
        double step = d > 0.0 ? err / d : 0.0;
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-16 * (1.0 + std::fabs(x))) return next;
        x = next;
    }
    return x;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol,
                 const IntegrateOptions& opts) {
    if (!(tol > 0.0)) throw std::domain_error("integrate: tolerance must be positive");
    const double cut = opts.tail_width * opts.tail_scale;
    if (std::isinf(lo)) lo = -cut;
    if (std::isinf(hi)) hi = cut;
    if (!(lo <= hi)) throw std::domain_error("integrate: requires lo <= hi");
    if (lo == hi) return 0.0;

    SimpsonState st{&f, opts.max_depth};
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fm = f(m), fb = f(hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    const double result = simpson_rec(st, lo, hi, fa, fm, fb, whole, tol, 0);
    if (st.failed) {
        throw IntegrationError("integrate: refinement depth exhausted", result);
    }
    return result;
}

ErrorDistribution ErrorDistribution::normal(double precision) {
    if (!(precision > 0.0)) throw std::domain_error("ErrorDistribution: precision must be > 0");
    ErrorDistribution d;
    d.kind_ = Kind::Normal;
    d.param_ = precision;
    d.sigma_ = 1.0 / std::sqrt(precision);
    d.stddev_ = d.sigma_;
    d.support_ = std::numeric_limits<double>::infinity();
    d.log_concave_ = true;
    return d;
}

ErrorDistribution ErrorDistribution::uniform(double half_width) {
    if (!(half_width > 0.0)) throw std::domain_error("ErrorDistribution: half_width must be > 0");
    ErrorDistribution d;
    d.kind_ = Kind::Uniform;
    d.param_ = half_width;
    d.sigma_ = half_width;
    d.stddev_ = half_width / std::sqrt(3.0);
    d.support_ = half_width;
    d.log_concave_ = true;
    return d;
}

ErrorDistribution ErrorDistribution::tabulated(std::vector<double> x, std::vector<double> density) {
    const std::size_t n = x.size();
    if (n < 3 || density.size() != n) {
        throw std::domain_error("ErrorDistribution: tabulated law needs matching x/density, n >= 3");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(x[i] < x[i + 1])) throw std::domain_error("ErrorDistribution: x must be increasing");
    }
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(density[i] >= 0.0)) throw std::domain_error("ErrorDistribution: density must be >= 0");
        dmax = std::max(dmax, density[i]);
    }
    if (dmax == 0.0) throw std::domain_error("ErrorDistribution: density is identically zero");
    const double span = std::max(std::fabs(x.front()), std::fabs(x.back()));
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(x[i] + x[n - 1 - i]) > 1e-9 * (1.0 + span) ||
            std::fabs(density[i] - density[n - 1 - i]) > 1e-9 * dmax) {
            throw std::domain_error("ErrorDistribution: tabulated law must be symmetric about 0");
        }
    }

    ErrorDistribution d;
    d.kind_ = Kind::Tabulated;
    d.tx_ = std::move(x);
    d.td_ = std::move(density);

    // Normalize (trapezoid is exact for a piecewise linear density).
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        total += 0.5 * (d.td_[i] + d.td_[i + 1]) * (d.tx_[i + 1] - d.tx_[i]);
    }
    if (!(total > 0.0)) throw std::domain_error("ErrorDistribution: density integrates to zero");
    for (auto& v : d.td_) v /= total;

    d.tc_.assign(n, 0.0);
    double m2 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = d.tx_[i + 1] - d.tx_[i];
        d.tc_[i + 1] = d.tc_[i] + 0.5 * (d.td_[i] + d.td_[i + 1]) * h;
        // exact second moment of the linear segment
        const double a = d.tx_[i], b = d.tx_[i + 1];
        const double fa = d.td_[i], fb = d.td_[i + 1];
        const double s = (fb - fa) / h;
        auto prim = [&](double t) {
            return fa * t * t * t / 3.0 + s * (t * t * t * t / 4.0 - a * t * t * t / 3.0);
        };
        m2 += prim(b) - prim(a);
    }
    d.tc_.back() = 1.0;
    d.stddev_ = std::sqrt(std::max(m2, 0.0));
    d.sigma_ = d.stddev_;
    d.support_ = std::max(std::fabs(d.tx_.front()), std::fabs(d.tx_.back()));

    // Log-concavity of the node sequence on its positive part (it must be
    // contiguous for the MLR shortcuts used by the solvers).
    d.log_concave_ = true;
    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d.td_[i] > 0.0) {
            first = std::min(first, i);
            last = i;
        }
    }
    for (std::size_t i = first; i <= last && d.log_concave_; ++i) {
        if (d.td_[i] <= 0.0) d.log_concave_ = false;
    }
    for (std::size_t i = first + 1; i + 1 <= last && d.log_concave_; ++i) {
        if (d.td_[i] * d.td_[i] + 1e-12 * dmax * dmax < d.td_[i - 1] * d.td_[i + 1]) {
            d.log_concave_ = false;
        }
    }
    return d;
}

double ErrorDistribution::precision() const {
    if (kind_ != Kind::Normal) throw std::logic_error("precision(): not a normal law");
    return param_;
}

double ErrorDistribution::half_width() const {
    if (kind_ != Kind::Uniform) throw std::logic_error("half_width(): not a uniform law");
    return param_;
}

double ErrorDistribution::pdf(double x) const {
    switch (kind_) {
        case Kind::Normal:
            return normal_pdf(x / sigma_) / sigma_;
        case Kind::Uniform:
            return std::fabs(x) <= param_ ? 0.5 / param_ : 0.0;
        case Kind::Tabulated: {
            if (x <= tx_.front() || x >= tx_.back()) return 0.0;
            const auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - tx_.begin()) - 1;
            const double w = (x - tx_[i]) / (tx_[i + 1] - tx_[i]);
            return td_[i] + w * (td_[i + 1] - td_[i]);
        }
    }
    return 0.0;
}

double ErrorDistribution::cdf(double x) const {
    switch (kind_) {
        case Kind::Normal:
            return normal_cdf(x / sigma_);
        case Kind::Uniform:
            if (x <= -param_) return 0.0;
            if (x >= param_) return 1.0;
            return 0.5 * (x / param_ + 1.0);
        case Kind::Tabulated: {
            if (x <= tx_.front()) return 0.0;
            if (x >= tx_.back()) return 1.0;
            const auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - tx_.begin()) - 1;
            const double h = tx_[i + 1] - tx_[i];
            const double u = x - tx_[i];
            const double slope = (td_[i + 1] - td_[i]) / h;
            return tc_[i] + td_[i] * u + 0.5 * slope * u * u;
        }
    }
    return 0.0;
}

double ErrorDistribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in (0,1)");
    switch (kind_) {
        case Kind::Normal:
            return sigma_ * normal_quantile(p);
        case Kind::Uniform:
            return param_ * (2.0 * p - 1.0);
        case Kind::Tabulated: {
            double lo = tx_.front(), hi = tx_.back();
            for (int i = 0; i < 80; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (cdf(mid) < p) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (hi - lo <= 1e-14 * (1.0 + std::fabs(hi))) break;
            }
            return 0.5 * (lo + hi);
        }
    }
    return 0.0;
}

ErrorDistribution ErrorDistribution::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw std::domain_error("distribution: expected object with a 'kind' key");
    }
    const std::string kind = j.at("kind").get<std::string>();
    auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
        for (const auto& item : j.items()) {
            bool ok = false;
            for (const char* k : allowed) {
                if (item.key() == k) ok = true;
            }
            if (!ok) throw std::domain_error("distribution: unknown key '" + item.key() + "'");
        }
    };
    if (kind == "normal") {
        reject_unknown({"kind", "precision"});
        return normal(j.at("precision").get<double>());
    }
    if (kind == "uniform") {
        reject_unknown({"kind", "half_width"});
        return uniform(j.at("half_width").get<double>());
    }
    if (kind == "tabulated") {
        reject_unknown({"kind", "x", "density"});
        return tabulated(j.at("x").get<std::vector<double>>(),
                         j.at("density").get<std::vector<double>>());
    }
    throw std::domain_error("distribution: unknown kind '" + kind + "'");
}

nlohmann::json ErrorDistribution::to_json() const {
    switch (kind_) {
        case Kind::Normal:
            return {{"kind", "normal"}, {"precision", param_}};
        case Kind::Uniform:
            return {{"kind", "uniform"}, {"half_width", param_}};
        case Kind::Tabulated:
            return {{"kind", "tabulated"}, {"x", tx_}, {"density", td_}};
    }
    return {};
}

}  // namespace ggames
