#include "ggames/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "ggames/common.hpp"

namespace ggames::simlab {

namespace {

constexpr std::uint64_t kRoundSalt = 0xA0761D6478BD642FULL;
constexpr std::uint64_t kAgentSalt = 0xE7037ED1A0B428DBULL;
constexpr std::uint64_t kStreamSalt = 0x8EBC6AF09C88C6E3ULL;
constexpr std::uint64_t kSeedSalt = 0x589965CC75374CC3ULL;

double yhat_interp(const Strategy& s, double x) {
    const auto& xs = s.curve_x;
    const auto& ys = s.curve_yhat;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + w * (ys[i + 1] - ys[i]);
}

// Number of attacking agents this round. Scalar cutoff rules reduce to a
// single uniform-probability threshold: attack iff rho >= cutoff - A + theta
// is equivalent to u >= G(cutoff - A + theta) for u the agent's uniform
// draw, so no quantile evaluation is needed per agent. Agents are counted
// in fixed blocks; the integer sum is independent of the worker count.
template <class Pred>
std::int64_t count_agents(std::uint64_t n, int workers, const Pred& attacks) {
    constexpr std::uint64_t kBlock = 1 << 16;
    const std::size_t blocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
    std::atomic<std::int64_t> total{0};
    parallel_for(blocks, workers, [&](std::size_t b) {
        const std::uint64_t lo = static_cast<std::uint64_t>(b) * kBlock;
        const std::uint64_t hi = std::min(n, lo + kBlock);
        std::int64_t local = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            if (attacks(i)) ++local;
        }
        total.fetch_add(local, std::memory_order_relaxed);
    });
    return total.load();
}

std::int64_t attack_count(const SimConfig& cfg, double a_prev, int round) {
    const Strategy& s = cfg.strategy;
    const std::uint64_t n = static_cast<std::uint64_t>(cfg.n_agents);
    const std::uint64_t r = static_cast<std::uint64_t>(round);

    switch (s.kind) {
        case Strategy::Kind::NetSignal:
        case Strategy::Kind::OneSignal: {
            const double q = s.noise.cdf(s.cutoff - a_prev + cfg.theta);
            return count_agents(n, cfg.workers,
                                [&](std::uint64_t i) { return uniform01(cfg.seed, r, i) >= q; });
        }
        case Strategy::Kind::Fundamental: {
            const double q = s.noise.cdf(s.cutoff - cfg.theta);
            return count_agents(n, cfg.workers,
                                [&](std::uint64_t i) { return uniform01(cfg.seed, r, i) <= q; });
        }
        case Strategy::Kind::TwoSignal:
            return count_agents(n, cfg.workers, [&](std::uint64_t i) {
                const double ux = uniform01(cfg.seed, r, i, 0);
                const double uy = uniform01(cfg.seed, r, i, 1);
                const double x = cfg.theta + s.noise.quantile(ux);
                return uy >= s.noise_y.cdf(yhat_interp(s, x) - a_prev);
            });
    }
    return 0;
}

SimTrace attempt(const SimConfig& cfg, double damping) {
    SimTrace trace;
    trace.damping_used = damping;
    const double tol = cfg.conv_tol > 0.0 ? cfg.conv_tol
                                          : 1.0 / std::sqrt(static_cast<double>(cfg.n_agents));
    double a = cfg.init_a;
    trace.a_hat.push_back(a);
    for (int round = 1; round <= cfg.max_rounds; ++round) {
        const double frac =
            static_cast<double>(attack_count(cfg, a, round)) / static_cast<double>(cfg.n_agents);
        const double next = damping * frac + (1.0 - damping) * a;
        trace.a_hat.push_back(next);
        const double diff = std::fabs(next - a);
        a = next;
        if (diff <= tol) {
            trace.converged = true;
            trace.convergence_round = round;
            break;
        }
    }
    trace.terminal = a;
    trace.success = a > cfg.theta;
    return trace;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t round, std::uint64_t agent,
                 std::uint64_t stream) {
    std::uint64_t h = mix64(seed ^ (kRoundSalt * (round + 1)));
    h = mix64(h ^ (kAgentSalt * (agent + 1)));
    if (stream != 0) h = mix64(h ^ (kStreamSalt * stream));
    // 53 mantissa bits, offset to keep the draw strictly inside (0,1)
    return static_cast<double>(h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

void SimConfig::validate() const {
    if (n_agents < 1) throw std::domain_error("simlab: n_agents must be >= 1");
    if (max_rounds < 1) throw std::domain_error("simlab: max_rounds must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) {
        throw std::domain_error("simlab: damping must lie in (0,1]");
    }
    if (!(init_a >= 0.0 && init_a <= 1.0)) {
        throw std::domain_error("simlab: init_a must lie in [0,1]");
    }
    if (strategy.kind == Strategy::Kind::TwoSignal) {
        if (strategy.curve_x.size() < 2 || strategy.curve_x.size() != strategy.curve_yhat.size()) {
            throw std::domain_error("simlab: two-signal strategy needs a threshold curve");
        }
    }
}

SimTrace run_steady_state(const SimConfig& cfg) {
    cfg.validate();
    SimTrace trace = attempt(cfg, cfg.damping);
    if (!trace.converged && cfg.damping == 1.0) {
        trace = attempt(cfg, 0.5);
    }
    return trace;
}

std::vector<SweepRow> sweep(const SimConfig& tmpl, const std::vector<double>& thetas,
                            int replications, const std::vector<double>& inits, int workers) {
    if (replications < 1) throw std::domain_error("simlab: replications must be >= 1");
    if (inits.empty()) throw std::domain_error("simlab: need at least one initialization");

    struct Job {
        double theta;
        std::uint64_t seed;
        double init;
    };
    std::vector<Job> jobs;
    for (double theta : thetas) {
        for (int r = 0; r < replications; ++r) {
            const std::uint64_t seed = mix64(tmpl.seed ^ (kSeedSalt * (static_cast<std::uint64_t>(r) + 1)));
            for (double init : inits) jobs.push_back({theta, seed, init});
        }
    }
    std::vector<SweepRow> rows(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        SimConfig cfg = tmpl;
        cfg.theta = jobs[i].theta;
        cfg.seed = jobs[i].seed;
        cfg.init_a = jobs[i].init;
        cfg.workers = 1;  // parallelism lives at the job level
        const SimTrace trace = run_steady_state(cfg);
        rows[i] = {cfg.theta, cfg.seed, cfg.init_a, trace.terminal, trace.success,
                   trace.converged};
    });
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.theta != b.theta) return a.theta < b.theta;
        if (a.seed != b.seed) return a.seed < b.seed;
        return a.init_a < b.init_a;
    });
    return rows;
}

}  // namespace ggames::simlab
