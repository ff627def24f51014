#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ggames {

inline constexpr double kSqrtTwoPi = 2.506628274631000502415765284811;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Numerical failure (quadrature breakdown, missing bracket, ...).
/// The CLI maps this family to exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of refinement depth; carries the best
/// estimate accumulated so far.
class IntegrationError : public NumericalError {
  public:
    IntegrationError(const std::string& msg, double partial_estimate)
        : NumericalError(msg), partial_(partial_estimate) {}
    double partial_estimate() const { return partial_; }

  private:
    double partial_;
};

/// An iteration hit its step limit; carries the per-step sup-norm deltas.
class ConvergenceError : public NumericalError {
  public:
    ConvergenceError(const std::string& msg, std::vector<double> sup_deltas)
        : NumericalError(msg), deltas_(std::move(sup_deltas)) {}
    const std::vector<double>& sup_deltas() const { return deltas_; }

  private:
    std::vector<double> deltas_;
};

/// Worker count: GGAMES_WORKERS environment variable if set and positive,
/// otherwise hardware concurrency (at least 1).
int default_worker_count();

/// Runs body(i) for i in [0,n). Results must be written to preallocated,
/// index-owned slots so the outcome is independent of the worker count.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

/// Formats with 17 significant digits (lossless double round-trip).
std::string format_double(double v);

}  // namespace ggames
