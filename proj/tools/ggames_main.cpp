// Command-line laboratory for coordination-game equilibria: closed-form and
// numerical benchmark solutions, net-size-signal fixed points and cutoffs,
// two-signal and one-signal best-response iterations, and a seeded
// agent-based steady-state simulator.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ggames/benchmark.hpp"
#include "ggames/common.hpp"
#include "ggames/config.hpp"
#include "ggames/dist.hpp"
#include "ggames/netsignal.hpp"
#include "ggames/onesignal.hpp"
#include "ggames/simlab.hpp"
#include "ggames/twosignal.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;
using namespace ggames;

struct OutputSpec {
    std::string format = "json";  // json | csv
    std::string path;             // empty -> stdout
};

void write_text(const OutputSpec& out, const std::string& text) {
    if (out.path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(out.path);
    if (!f) throw std::domain_error("output: cannot open '" + out.path + "'");
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string csv_join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ",";
        line += cells[i];
    }
    return line;
}

std::string fd(double v) { return format_double(v); }

// Range spec "lo:hi:n" used by sweep-style flags.
struct RangeSpec {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(std::max(n, 0)));
        for (int i = 0; i < n; ++i) {
            v.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
        }
        return v;
    }
};

RangeSpec parse_range(const std::string& text) {
    RangeSpec r;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        throw std::domain_error("range: expected lo:hi:n, got '" + text + "'");
    }
    try {
        r.lo = std::stod(text.substr(0, c1));
        r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        r.n = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw std::domain_error("range: cannot parse '" + text + "'");
    }
    if (r.n < 1) throw std::domain_error("range: n must be >= 1");
    if (r.n > 1 && !(r.lo <= r.hi)) throw std::domain_error("range: requires lo <= hi");
    return r;
}

json load_validated_config(const std::string& path) {
    if (path.empty()) return json::object();
    json cfg = cli::load_config_file(path);
    cli::validate_config(cfg);
    return cfg;
}

json section(const json& cfg, const char* name) {
    if (cfg.contains(name)) return cfg.at(name);
    return json::object();
}

ErrorDistribution dist_or(const json& sec, const char* key, ErrorDistribution fallback) {
    if (sec.contains(key)) return ErrorDistribution::from_json(sec.at(key));
    return fallback;
}

// ---------------------------------------------------------------------------
// benchmark

int run_benchmark(const json& cfg, std::optional<double> c_flag,
                  std::optional<double> alpha_flag, const OutputSpec& out) {
    const json sec = section(cfg, "benchmark");
    const double c = c_flag ? *c_flag : cli::get_or(sec, "c", 0.5);
    const double alpha_x = alpha_flag ? *alpha_flag : cli::get_or(sec, "alpha_x", 1.0);

    const auto closed = benchmark::solve(c, alpha_x);
    const auto numeric = benchmark::verify_numerically(c, alpha_x);

    if (out.format == "csv") {
        std::string text = "c,alpha_x,theta_star,x_star,theta_star_numeric,x_star_numeric\n";
        text += csv_join({fd(c), fd(alpha_x), fd(closed.theta_star), fd(closed.x_star),
                          fd(numeric.theta_star), fd(numeric.x_star)});
        write_text(out, text);
    } else {
        json j{{"c", c},
               {"alpha_x", alpha_x},
               {"theta_star", closed.theta_star},
               {"x_star", closed.x_star},
               {"numeric", {{"theta_star", numeric.theta_star}, {"x_star", numeric.x_star}}},
               {"residual_mass", benchmark::residual_mass(closed)},
               {"residual_indifference", benchmark::residual_indifference(closed)}};
        write_text(out, cli::dump_json(j));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// netsignal

netsignal::BranchPolicy branch_policy(const json& sec, const std::string& mode_flag,
                                      std::optional<double> value_flag) {
    netsignal::BranchPolicy policy;
    const std::string mode = !mode_flag.empty() ? mode_flag
                                                : cli::get_or<std::string>(sec, "branch_mode",
                                                                           "center");
    if (mode == "center") {
        policy.mode = netsignal::BranchPolicy::Mode::RegionCenter;
    } else if (mode == "fraction") {
        policy.mode = netsignal::BranchPolicy::Mode::RegionFraction;
    } else if (mode == "absolute") {
        policy.mode = netsignal::BranchPolicy::Mode::AbsoluteTheta;
    } else {
        throw std::domain_error("netsignal: branch_mode must be center|fraction|absolute");
    }
    policy.value = value_flag ? *value_flag : cli::get_or(sec, "branch_value", 0.5);
    return policy;
}

int run_fixed_points(const json& cfg, std::optional<double> theta, std::optional<double> z_star,
                     std::optional<double> alpha_z, const OutputSpec& out) {
    const json sec = section(cfg, "netsignal");
    const double th = theta ? *theta : cli::get_or(sec, "theta", 0.5);
    const double z = z_star ? *z_star : cli::get_or(sec, "z_star", 0.0);
    const double a = alpha_z ? *alpha_z : cli::get_or(sec, "alpha_z", 16.0);

    const auto fps = netsignal::attack_fixed_points(th, z, a);
    if (out.format == "csv") {
        std::string text = "theta,A,stability\n";
        for (const auto& fp : fps.solutions) {
            text += csv_join({fd(th), fd(fp.value), fp.stable ? "stable" : "unstable"}) + "\n";
        }
        write_text(out, text);
    } else {
        json sols = json::array();
        for (const auto& fp : fps.solutions) {
            sols.push_back({{"A", fp.value}, {"slope", fp.slope}, {"stable", fp.stable}});
        }
        write_text(out, cli::dump_json(json{{"theta", th},
                                            {"z_star", z},
                                            {"alpha_z", a},
                                            {"solutions", sols}}));
    }
    return 0;
}

int run_bifurcation(const json& cfg, const std::string& range, std::optional<double> z_star,
                    std::optional<double> alpha_z, int workers, const OutputSpec& out) {
    const json sec = section(cfg, "netsignal");
    const double z = z_star ? *z_star : cli::get_or(sec, "z_star", 0.0);
    const double a = alpha_z ? *alpha_z : cli::get_or(sec, "alpha_z", 16.0);
    RangeSpec thetas;
    if (!range.empty()) {
        thetas = parse_range(range);
    } else {
        thetas.lo = cli::get_or(sec, "theta_lo", -0.5);
        thetas.hi = cli::get_or(sec, "theta_hi", 1.5);
        thetas.n = cli::get_or(sec, "theta_n", 201);
    }

    const auto values = thetas.values();
    std::vector<netsignal::FixedPointSet> rows(values.size());
    parallel_for(values.size(), workers,
                 [&](std::size_t i) { rows[i] = netsignal::attack_fixed_points(values[i], z, a); });

    std::string text = "theta,A,stability\n";
    for (const auto& fps : rows) {
        for (const auto& fp : fps.solutions) {
            text +=
                csv_join({fd(fps.theta), fd(fp.value), fp.stable ? "stable" : "unstable"}) + "\n";
        }
    }
    write_text(out, text);
    return 0;
}

int run_cutoffs(const json& cfg, std::optional<double> c_flag, std::optional<double> alpha_flag,
                const std::string& branch_mode, std::optional<double> branch_value, int workers,
                const OutputSpec& out) {
    const json sec = section(cfg, "netsignal");
    const double c = c_flag ? *c_flag : cli::get_or(sec, "c", 0.5);
    const double a = alpha_flag ? *alpha_flag : cli::get_or(sec, "alpha_z", 16.0);

    netsignal::CutoffScanOptions opts;
    opts.z_lo = cli::get_or(sec, "z_scan_lo", opts.z_lo);
    opts.z_hi = cli::get_or(sec, "z_scan_hi", opts.z_hi);
    opts.points = cli::get_or(sec, "z_scan_points", opts.points);
    opts.policy = branch_policy(sec, branch_mode, branch_value);
    opts.posterior.window = cli::get_or(sec, "window", 0.0);
    opts.workers = workers;

    const auto scan = netsignal::find_equilibrium_cutoffs(c, a, opts);
    json cuts = json::array();
    for (const auto& cut : scan.cutoffs) {
        cuts.push_back({{"z_star", cut.z_star},
                        {"z_lo", cut.z_lo},
                        {"z_hi", cut.z_hi},
                        {"kind", cut.kind == netsignal::Cutoff::Kind::Root ? "root"
                                                                           : "discontinuity"},
                        {"posterior", cut.posterior}});
    }
    write_text(out, cli::dump_json(json{{"c", c},
                                        {"alpha_z", a},
                                        {"window_lo", scan.window_lo},
                                        {"window_hi", scan.window_hi},
                                        {"cutoffs", cuts}}));
    return 0;
}

// ---------------------------------------------------------------------------
// twosignal / onesignal

twosignal::GridOptions twosignal_grid(const json& sec, int workers) {
    twosignal::GridOptions grid;
    const json g = sec.contains("grid") ? sec.at("grid") : json::object();
    grid.intervals_per_side = cli::get_or(g, "intervals_per_side", grid.intervals_per_side);
    grid.halfwidth = cli::get_or(g, "halfwidth", grid.halfwidth);
    grid.halfwidth_sds = cli::get_or(g, "halfwidth_sds", grid.halfwidth_sds);
    grid.signal_x_points = cli::get_or(g, "signal_x_points", grid.signal_x_points);
    grid.u_points = cli::get_or(g, "u_points", grid.u_points);
    grid.threshold_tol = cli::get_or(g, "threshold_tol", grid.threshold_tol);
    grid.workers = workers;
    return grid;
}

twosignal::Prop4Params twosignal_params(const json& sec) {
    twosignal::Prop4Params p;
    p.delta = cli::get_or(sec, "delta", p.delta);
    p.gamma = cli::get_or(sec, "gamma", p.gamma);
    p.xi = cli::get_or(sec, "xi", p.xi);
    p.c = cli::get_or(sec, "c", p.c);
    p.dist_x = dist_or(sec, "dist_x", ErrorDistribution::normal(1.0));
    p.dist_y = dist_or(sec, "dist_y", ErrorDistribution::normal(1e4));
    return p;
}

int run_twosignal_check(const json& cfg, const OutputSpec& out) {
    const json sec = section(cfg, "twosignal");
    const auto p = twosignal_params(sec);
    const double eta_max = cli::get_or(sec, "eta_max", 1.0 - p.delta - p.gamma + 2.0);
    const auto check = twosignal::check_prop4_conditions(p, eta_max);
    write_text(out, cli::dump_json(json{
                        {"delta", p.delta},
                        {"gamma", p.gamma},
                        {"xi", p.xi},
                        {"c", p.c},
                        {"eta_max", eta_max},
                        {"margin_attack_odds", check.margin_attack_odds},
                        {"margin_signal_mass", check.margin_signal_mass},
                        {"worst_eta", check.worst_eta},
                        {"side_conditions_ok", check.side_conditions_ok},
                        {"eta_boundary_monotone", check.eta_boundary_monotone},
                        {"satisfied", check.satisfied}}));
    return 0;
}

std::string curve_csv(const AttackFunction& limit) {
    std::string text = "theta,A\n";
    const auto& th = limit.grid();
    const auto& av = limit.values();
    for (std::size_t i = 0; i < th.size(); ++i) {
        text += csv_join({fd(th[i]), fd(av[i])}) + "\n";
    }
    return text;
}

json trace_json(const EquilibriumReport& rep) {
    json steps = json::array();
    for (const auto& s : rep.trace) {
        steps.push_back({{"n", s.n},
                         {"sup_delta", s.sup_delta},
                         {"cutoff", std::isnan(s.cutoff) ? json() : json(s.cutoff)},
                         {"max_abs_slope", s.max_abs_slope},
                         {"min_left", s.min_left},
                         {"max_right", s.max_right},
                         {"bounds_ok", s.bounds_ok},
                         {"cutoff_in_band", s.cutoff_in_band}});
    }
    return steps;
}

int run_twosignal_iterate(const json& cfg, std::optional<double> t_flag, int workers,
                          const std::string& curve_path, const std::string& threshold_path,
                          const OutputSpec& out) {
    const json sec = section(cfg, "twosignal");
    const auto p = twosignal_params(sec);
    const double t = t_flag ? *t_flag : cli::get_or(sec, "t", 0.5);
    const int max_iter = cli::get_or(sec, "max_iter", 200);
    const double sup_tol = cli::get_or(sec, "sup_tol", 1e-6);
    const auto grid = twosignal_grid(sec, workers);

    EquilibriumReport rep = twosignal::iterate_to_equilibrium(t, p, max_iter, sup_tol, grid);
    if (!curve_path.empty()) {
        OutputSpec curve_out;
        curve_out.path = curve_path;
        write_text(curve_out, curve_csv(rep.limit));
    }
    if (!threshold_path.empty()) {
        const auto curve = twosignal::threshold_curve(rep.limit, p.base(), grid);
        std::string text = "x,yhat\n";
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            text += csv_join({fd(curve.x[i]), fd(curve.yhat[i])}) + "\n";
        }
        OutputSpec th_out;
        th_out.path = threshold_path;
        write_text(th_out, text);
    }
    write_text(out, cli::dump_json(json{{"t", t},
                                        {"converged", rep.converged},
                                        {"iterations", rep.iterations},
                                        {"max_residual", rep.max_residual},
                                        {"monotone_per_side", rep.monotone_per_side},
                                        {"trace", trace_json(rep)}}));
    return 0;
}

int run_twosignal_step(const json& cfg, std::optional<double> t_flag,
                       std::optional<double> sigma_flag, int workers, const OutputSpec& out) {
    const json sec = section(cfg, "twosignal");
    const double t = t_flag ? *t_flag : cli::get_or(sec, "t", 0.5);
    const double sigma = sigma_flag ? *sigma_flag : cli::get_or(sec, "sigma", 0.4);

    twosignal::Params p;
    p.c = cli::get_or(sec, "c", 0.5);
    p.dist_x = dist_or(sec, "dist_x", ErrorDistribution::normal(1.0));
    p.dist_y = ErrorDistribution::uniform(sigma);

    auto grid = twosignal_grid(sec, workers);
    const double tol = cli::get_or(sec, "tol", 1e-10);
    const AttackFunction step = twosignal::build_step_equilibrium(
        t, sigma, grid.resolved_halfwidth(p), grid.intervals_per_side);
    const auto rep = twosignal::verify_consistency(step, p, tol, grid);
    write_text(out, cli::dump_json(json{{"t", t},
                                        {"sigma", sigma},
                                        {"c", p.c},
                                        {"max_residual", rep.max_residual},
                                        {"theta_at_max", rep.theta_at_max},
                                        {"tol", rep.tol},
                                        {"passed", rep.passed}}));
    return 0;
}

onesignal::Prop5Params onesignal_params(const json& sec) {
    onesignal::Prop5Params p;
    p.delta = cli::get_or(sec, "delta", p.delta);
    p.gamma = cli::get_or(sec, "gamma", p.gamma);
    p.c = cli::get_or(sec, "c", p.c);
    p.dist_rho = dist_or(sec, "dist_rho", ErrorDistribution::normal(1e4));
    return p;
}

int run_onesignal_check(const json& cfg, const OutputSpec& out) {
    const json sec = section(cfg, "onesignal");
    const auto p = onesignal_params(sec);
    const double xi_max = cli::get_or(sec, "xi_max", 1.0 - p.delta - p.gamma + 2.0);
    const auto check = onesignal::check_prop5_conditions(p, xi_max);
    write_text(out, cli::dump_json(json{{"delta", p.delta},
                                        {"gamma", p.gamma},
                                        {"c", p.c},
                                        {"xi_max", xi_max},
                                        {"margin_odds", check.margin_odds},
                                        {"margin_signal_mass", check.margin_signal_mass},
                                        {"margin_density", check.margin_density},
                                        {"worst_xi", check.worst_xi},
                                        {"xi_boundary_monotone", check.xi_boundary_monotone},
                                        {"satisfied", check.satisfied}}));
    return 0;
}

int run_onesignal_iterate(const json& cfg, std::optional<double> t_flag,
                          const std::string& curve_path, const OutputSpec& out) {
    const json sec = section(cfg, "onesignal");
    const auto p = onesignal_params(sec);
    const double t = t_flag ? *t_flag : cli::get_or(sec, "t", 0.5);
    const int max_iter = cli::get_or(sec, "max_iter", 200);
    const double sup_tol = cli::get_or(sec, "sup_tol", 1e-6);

    onesignal::GridOptions1s grid;
    const json g = sec.contains("grid") ? sec.at("grid") : json::object();
    grid.intervals_per_side = cli::get_or(g, "intervals_per_side", grid.intervals_per_side);
    grid.halfwidth = cli::get_or(g, "halfwidth", grid.halfwidth);
    grid.halfwidth_sds = cli::get_or(g, "halfwidth_sds", grid.halfwidth_sds);
    grid.cutoff_tol = cli::get_or(g, "cutoff_tol", grid.cutoff_tol);

    EquilibriumReport rep = onesignal::iterate_to_equilibrium(t, p, max_iter, sup_tol, grid);
    if (!curve_path.empty()) {
        OutputSpec curve_out;
        curve_out.path = curve_path;
        write_text(curve_out, curve_csv(rep.limit));
    }
    json j{{"t", t},
           {"converged", rep.converged},
           {"iterations", rep.iterations},
           {"max_residual", rep.max_residual},
           {"monotone_per_side", rep.monotone_per_side},
           {"slope_bound", rep.slope_bound ? json(*rep.slope_bound) : json()},
           {"cutoff", rep.cutoff ? json(*rep.cutoff) : json()},
           {"cutoff_offset_from_lemma4", rep.cutoff_offset ? json(*rep.cutoff_offset) : json()},
           {"trace", trace_json(rep)}};
    write_text(out, cli::dump_json(j));
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

simlab::Strategy strategy_from_config(const std::string& model, const json& sim) {
    simlab::Strategy s;
    if (model == "netsignal") {
        const json sec = sim.contains("netsignal") ? sim.at("netsignal") : json::object();
        s.kind = simlab::Strategy::Kind::NetSignal;
        s.cutoff = cli::get_or(sec, "z_star", 0.0);
        s.noise = ErrorDistribution::normal(cli::get_or(sec, "alpha_z", 16.0));
    } else if (model == "onesignal") {
        const json sec = sim.contains("onesignal") ? sim.at("onesignal") : json::object();
        s.kind = simlab::Strategy::Kind::OneSignal;
        s.cutoff = cli::get_or(sec, "z_cut", 0.0);
        s.noise = dist_or(sec, "dist_rho", ErrorDistribution::normal(1e4));
    } else if (model == "twosignal") {
        if (!sim.contains("twosignal")) {
            throw std::domain_error("simulate: twosignal strategy needs a threshold curve");
        }
        const json sec = sim.at("twosignal");
        s.kind = simlab::Strategy::Kind::TwoSignal;
        s.noise = dist_or(sec, "dist_x", ErrorDistribution::normal(1.0));
        s.noise_y = dist_or(sec, "dist_y", ErrorDistribution::normal(1e4));
        s.curve_x = cli::get_or(sec, "curve_x", std::vector<double>{});
        s.curve_yhat = cli::get_or(sec, "curve_yhat", std::vector<double>{});
    } else {
        throw std::domain_error("simulate: model must be netsignal|twosignal|onesignal");
    }
    return s;
}

int run_simulate(const json& cfg, const std::string& model_flag, std::optional<double> theta_flag,
                 std::optional<std::uint64_t> seed_flag, std::optional<int> n_flag, bool do_sweep,
                 const std::string& range_flag, int replications_flag, int workers,
                 const OutputSpec& out) {
    const json sim = section(cfg, "simulate");
    const std::string model =
        !model_flag.empty() ? model_flag : cli::get_or<std::string>(sim, "model", "netsignal");

    simlab::SimConfig sc;
    sc.strategy = strategy_from_config(model, sim);
    sc.n_agents = n_flag ? *n_flag : cli::get_or(sim, "n_agents", 100000);
    sc.theta = theta_flag ? *theta_flag : cli::get_or(sim, "theta", 0.5);
    sc.seed = seed_flag ? *seed_flag : cli::get_or<std::uint64_t>(sim, "seed", 42);
    sc.max_rounds = cli::get_or(sim, "max_rounds", 200);
    sc.damping = cli::get_or(sim, "damping", 1.0);
    sc.init_a = cli::get_or(sim, "init_a", 0.5);
    sc.conv_tol = cli::get_or(sim, "conv_tol", 0.0);
    sc.workers = workers;

    if (do_sweep) {
        const json sw = section(sim, "sweep");
        RangeSpec thetas;
        if (!range_flag.empty()) {
            thetas = parse_range(range_flag);
        } else {
            thetas.lo = cli::get_or(sw, "theta_lo", 0.0);
            thetas.hi = cli::get_or(sw, "theta_hi", 1.0);
            thetas.n = cli::get_or(sw, "n", 11);
        }
        const int reps =
            replications_flag > 0 ? replications_flag : cli::get_or(sw, "replications", 1);
        const std::vector<double> inits =
            cli::get_or(sw, "inits", std::vector<double>{1.0, 0.0});
        const auto rows = simlab::sweep(sc, thetas.values(), reps, inits, workers);

        std::string text = "theta,seed,init_a,terminal_A,success,converged\n";
        for (const auto& row : rows) {
            text += csv_join({fd(row.theta), std::to_string(row.seed), fd(row.init_a),
                              fd(row.terminal), row.success ? "1" : "0",
                              row.converged ? "1" : "0"}) +
                    "\n";
        }
        write_text(out, text);
        bool all_converged = true;
        for (const auto& row : rows) all_converged = all_converged && row.converged;
        return all_converged ? 0 : 3;
    }

    const auto trace = simlab::run_steady_state(sc);
    std::string text = "round,A_hat\n";
    for (std::size_t i = 0; i < trace.a_hat.size(); ++i) {
        text += csv_join({std::to_string(i), fd(trace.a_hat[i])}) + "\n";
    }
    write_text(out, text);
    if (out.path.empty()) {
        // trace already went to stdout; summary to stderr keeps the CSV clean
        std::cerr << "terminal=" << fd(trace.terminal) << " converged=" << trace.converged
                  << " success=" << trace.success << "\n";
    } else {
        std::cout << cli::dump_json(json{{"terminal", trace.terminal},
                                         {"converged", trace.converged},
                                         {"convergence_round", trace.convergence_round},
                                         {"success", trace.success},
                                         {"damping_used", trace.damping_used}})
                  << "\n";
    }
    return trace.converged ? 0 : 3;
}

void enable_fallthrough(CLI::App* node) {
    for (CLI::App* sub : node->get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
        enable_fallthrough(sub);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ggames: a numerical laboratory for coordination-game equilibria"};
    app.set_version_flag("--version", std::string("ggames ") + kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "json";
    int workers = 0;
    app.add_option("--config", config_path, "JSON or TOML config file")->capture_default_str();
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--format", format, "output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--workers", workers,
                   "worker threads (default: GGAMES_WORKERS or hardware concurrency)");

    // benchmark
    auto* cmd_bench = app.add_subcommand("benchmark", "fundamentals-only threshold equilibrium");
    std::optional<double> b_c, b_alpha;
    cmd_bench->add_option("--c", b_c, "attack cost in (0,1)");
    cmd_bench->add_option("--alpha-x", b_alpha, "fundamental signal precision");

    // netsignal
    auto* cmd_net = app.add_subcommand("netsignal", "net-size signal model");
    cmd_net->require_subcommand(1);
    auto* cmd_fp = cmd_net->add_subcommand("fixed-points", "attack-mass fixed points at theta");
    std::optional<double> n_theta, n_z, n_alpha;
    cmd_fp->add_option("--theta", n_theta, "fundamental");
    cmd_fp->add_option("--z-star", n_z, "signal cutoff");
    cmd_fp->add_option("--alpha-z", n_alpha, "signal precision");
    auto* cmd_bif = cmd_net->add_subcommand("bifurcation", "fixed points across a theta range");
    std::string bif_range;
    std::optional<double> bif_z, bif_alpha;
    cmd_bif->add_option("--theta-range", bif_range, "lo:hi:n");
    cmd_bif->add_option("--z-star", bif_z, "signal cutoff");
    cmd_bif->add_option("--alpha-z", bif_alpha, "signal precision");
    auto* cmd_cut = cmd_net->add_subcommand("cutoffs", "equilibrium cutoff scan");
    std::optional<double> cut_c, cut_alpha, cut_branch_value;
    std::string cut_branch_mode;
    cmd_cut->add_option("--c", cut_c, "attack cost");
    cmd_cut->add_option("--alpha-z", cut_alpha, "signal precision");
    cmd_cut->add_option("--branch-mode", cut_branch_mode, "center|fraction|absolute");
    cmd_cut->add_option("--branch-value", cut_branch_value, "branch parameter value");

    // twosignal
    auto* cmd_two = app.add_subcommand("twosignal", "separate signals over theta and A");
    cmd_two->require_subcommand(1);
    auto* cmd_two_check = cmd_two->add_subcommand("check", "sufficient-condition margins");
    auto* cmd_two_iter = cmd_two->add_subcommand("iterate", "best-response iteration at t");
    std::optional<double> two_t;
    std::string two_threshold_out;
    cmd_two_iter->add_option("--t", two_t, "switch point");
    cmd_two_iter->add_option("--threshold-out", two_threshold_out,
                             "write the limit decision rule as x,yhat CSV");
    auto* cmd_two_step = cmd_two->add_subcommand("step", "indicator step consistency check");
    std::optional<double> step_t, step_sigma;
    cmd_two_step->add_option("--t", step_t, "step location in [0,1]");
    cmd_two_step->add_option("--sigma", step_sigma, "uniform action-noise half width");

    // onesignal
    auto* cmd_one = app.add_subcommand("onesignal", "net-size signal with general noise");
    cmd_one->require_subcommand(1);
    auto* cmd_one_check = cmd_one->add_subcommand("check", "sufficient-condition margins");
    auto* cmd_one_iter = cmd_one->add_subcommand("iterate", "cutoff best-response iteration at t");
    std::optional<double> one_t;
    cmd_one_iter->add_option("--t", one_t, "switch point");

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "agent-based steady-state oracle");
    std::string sim_model;
    std::optional<double> sim_theta;
    std::optional<std::uint64_t> sim_seed;
    std::optional<int> sim_n;
    bool sim_sweep = false;
    std::string sim_range;
    int sim_reps = 0;
    cmd_sim->add_option("--model", sim_model, "netsignal|twosignal|onesignal");
    cmd_sim->add_option("--theta", sim_theta, "fundamental");
    cmd_sim->add_option("--seed", sim_seed, "64-bit run seed");
    cmd_sim->add_option("--n", sim_n, "number of agents");
    cmd_sim->add_flag("--sweep", sim_sweep, "run a theta sweep instead of a single trace");
    cmd_sim->add_option("--theta-range", sim_range, "lo:hi:n sweep range");
    cmd_sim->add_option("--replications", sim_reps, "replications per theta");

    enable_fallthrough(&app);
    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_validated_config(config_path);
        if (workers == 0) workers = cli::get_or(cfg, "workers", 0);
        OutputSpec out;
        out.format = format;
        out.path = out_path;
        if (out_path.empty() && cfg.contains("output")) {
            out.format = cli::get_or<std::string>(cfg["output"], "format", out.format);
            out.path = cli::get_or<std::string>(cfg["output"], "path", out.path);
        }

        if (*cmd_bench) return run_benchmark(cfg, b_c, b_alpha, out);
        if (*cmd_fp) {
            OutputSpec o = out;
            if (!app.count("--format")) o.format = "csv";
            return run_fixed_points(cfg, n_theta, n_z, n_alpha, o);
        }
        if (*cmd_bif) return run_bifurcation(cfg, bif_range, bif_z, bif_alpha, workers, out);
        if (*cmd_cut) {
            return run_cutoffs(cfg, cut_c, cut_alpha, cut_branch_mode, cut_branch_value, workers,
                               out);
        }
        if (*cmd_two_check) return run_twosignal_check(cfg, out);
        if (*cmd_two_iter) {
            // --out carries the limit curve CSV; the report goes to stdout
            return run_twosignal_iterate(cfg, two_t, workers, out.path, two_threshold_out,
                                         OutputSpec{});
        }
        if (*cmd_two_step) return run_twosignal_step(cfg, step_t, step_sigma, workers, out);
        if (*cmd_one_check) return run_onesignal_check(cfg, out);
        if (*cmd_one_iter) return run_onesignal_iterate(cfg, one_t, out.path, OutputSpec{});
        if (*cmd_sim) {
            return run_simulate(cfg, sim_model, sim_theta, sim_seed, sim_n, sim_sweep, sim_range,
                                sim_reps, workers, out);
        }
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const ggames::ConvergenceError& e) {
        // partial trace: one sup-delta per line so failed runs stay inspectable
        std::string trace = "n,sup_delta\n";
        int n = 1;
        for (double d : e.sup_deltas()) trace += std::to_string(n++) + "," + fd(d) + "\n";
        if (!out_path.empty()) {
            std::ofstream f(out_path);
            if (f) f << trace;
        } else {
            std::cout << trace;
        }
        std::cerr << "error: non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const ggames::NumericalError& e) {
        std::cerr << "error: numerical: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
