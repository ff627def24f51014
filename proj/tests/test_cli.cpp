#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "json.hpp"

#include "ggames/config.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

std::string binary_path() {
    const char* env = std::getenv("GGAMES_BIN");
    REQUIRE(env != nullptr);
    return env;
}

RunResult run(const std::string& args) {
    const std::string cmd = binary_path() + " " + args + " 2>/dev/null";
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) res.output.append(buf.data(), n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = std::string("/tmp/ggames_test_") + name;
    std::ofstream f(path);
    f << text;
    return path;
}

}  // namespace

TEST_CASE("version and help") {
    CHECK(run("--version").exit_code == 0);
    const auto help = run("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("benchmark") != std::string::npos);
    CHECK(help.output.find("simulate") != std::string::npos);
}

TEST_CASE("benchmark: json result contains the closed form") {
    const auto res = run("benchmark --c 0.5 --alpha-x 1 --format json");
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.output);
    CHECK(j.at("theta_star").get<double>() == 0.5);
    CHECK(j.at("numeric").at("theta_star").get<double>() == doctest::Approx(0.5).epsilon(1e-8));

    const auto csv = run("benchmark --c 0.5 --alpha-x 1 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.output.rfind("c,alpha_x,theta_star,x_star", 0) == 0);
}

TEST_CASE("netsignal fixed-points: three rows at the symmetric triple") {
    const auto res = run("netsignal fixed-points --theta 0.25 --z-star 0.25 --alpha-z 16");
    REQUIRE(res.exit_code == 0);
    int rows = 0;
    for (char ch : res.output) rows += ch == '\n';
    CHECK(rows == 4);  // header + three solutions
    CHECK(res.output.rfind("theta,A,stability", 0) == 0);
    CHECK(res.output.find("unstable") != std::string::npos);
}

TEST_CASE("netsignal bifurcation: csv schema and worker independence") {
    const auto a = run("netsignal bifurcation --z-star 0 --alpha-z 16 --theta-range 0.3:0.7:21 "
                       "--workers 1");
    const auto b = run("netsignal bifurcation --z-star 0 --alpha-z 16 --theta-range 0.3:0.7:21 "
                       "--workers 4");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(a.output == b.output);  // byte-identical across worker counts
    CHECK(a.output.rfind("theta,A,stability", 0) == 0);

    // the environment variable steers the default worker count
    const std::string saved = binary_path();
    RunResult env_run;
    {
        const std::string cmd = "GGAMES_WORKERS=3 " + saved +
                                " netsignal bifurcation --z-star 0 --alpha-z 16 "
                                "--theta-range 0.3:0.7:21 2>/dev/null";
        FILE* pipe = popen(cmd.c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::array<char, 4096> buf{};
        while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) {
            env_run.output.append(buf.data(), n);
        }
        env_run.exit_code = WEXITSTATUS(pclose(pipe));
    }
    REQUIRE(env_run.exit_code == 0);
    CHECK(env_run.output == a.output);
}

TEST_CASE("twosignal step: precondition violation exits 2") {
    CHECK(run("twosignal step --t 0.5 --sigma 0.6").exit_code == 2);
    const auto ok = run("twosignal step --t 0.5 --sigma 0.4");
    REQUIRE(ok.exit_code == 0);
    const json j = json::parse(ok.output);
    CHECK(j.at("passed").get<bool>());
    CHECK(j.at("max_residual").get<double>() <= 1e-10);
}

TEST_CASE("config file: unknown keys are rejected with exit 2") {
    const auto path = write_temp("bad.json", R"({"benchmark": {"c": 0.5, "alpa_x": 1.0}})");
    const auto res = run("benchmark --config " + path);
    CHECK(res.exit_code == 2);
}

TEST_CASE("config file: toml and json load identically") {
    const auto jpath = write_temp("cfg.json",
                                  R"({"benchmark": {"c": 0.3, "alpha_x": 9.0}})");
    const auto tpath = write_temp("cfg.toml", "[benchmark]\nc = 0.3\nalpha_x = 9.0\n");
    const auto a = run("benchmark --config " + jpath);
    const auto b = run("benchmark --config " + tpath);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(a.output == b.output);
    const json j = json::parse(a.output);
    CHECK(j.at("theta_star").get<double>() == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("flags override config file values") {
    const auto path = write_temp("cfg2.json", R"({"benchmark": {"c": 0.3, "alpha_x": 9.0}})");
    const auto res = run("benchmark --config " + path + " --c 0.5");
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.output);
    CHECK(j.at("theta_star").get<double>() == 0.5);
    CHECK(j.at("alpha_x").get<double>() == 9.0);
}

TEST_CASE("json output round-trips losslessly") {
    const auto res = run("benchmark --c 0.37 --alpha-x 2.5");
    REQUIRE(res.exit_code == 0);
    const json parsed = json::parse(res.output);
    // re-serialize through the same 17-digit writer and parse again
    const std::string again = ggames::cli::dump_json(parsed);
    const json reparsed = json::parse(again);
    CHECK(parsed == reparsed);
    CHECK(parsed.at("x_star").get<double>() == reparsed.at("x_star").get<double>());
}

TEST_CASE("simulate: trace csv, determinism across workers, exit codes") {
    const auto cfg = write_temp("sim.json", R"({"simulate": {
        "model": "netsignal", "n_agents": 20000, "init_a": 0.95,
        "netsignal": {"z_star": 0.0, "alpha_z": 16.0}}})");
    const auto a = run("simulate --model netsignal --config " + cfg +
                       " --theta 0.5 --seed 42 --n 20000 --workers 1");
    const auto b = run("simulate --model netsignal --config " + cfg +
                       " --theta 0.5 --seed 42 --n 20000 --workers 4");
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.rfind("round,A_hat", 0) == 0);

    const auto sweep = run("simulate --model netsignal --config " + cfg +
                           " --sweep --theta-range 0.45:0.55:3 --seed 42 --n 5000");
    REQUIRE(sweep.exit_code == 0);
    CHECK(sweep.output.rfind("theta,seed,init_a,terminal_A,success,converged", 0) == 0);
}

TEST_CASE("netsignal cutoffs: json result re-parses and sits on the level") {
    const auto cfg = write_temp("cut.json",
                                R"({"netsignal": {"z_scan_lo": -2.0, "z_scan_hi": 2.0,
                                    "z_scan_points": 33}})");
    const auto res = run("netsignal cutoffs --c 0.5 --alpha-z 1 --config " + cfg);
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.output);
    REQUIRE(!j.at("cutoffs").empty());
    for (const auto& cut : j.at("cutoffs")) {
        const std::string kind = cut.at("kind").get<std::string>();
        CHECK((kind == "root" || kind == "discontinuity"));
        if (kind == "root") {
            CHECK(std::fabs(cut.at("posterior").get<double>() - 0.5) < 1e-6);
        }
    }
}

TEST_CASE("iterate subcommands: curve file plus stdout report") {
    const auto cfg = write_temp("iter.toml",
                                "[twosignal]\n"
                                "c = 0.5\ndelta = 0.2\ngamma = 0.1\nxi = 0.85\n"
                                "[twosignal.grid]\n"
                                "intervals_per_side = 200\nsignal_x_points = 201\nu_points = 200\n"
                                "[onesignal]\n"
                                "c = 0.5\ndelta = 0.2\ngamma = 0.1\n");
    const std::string curve = "/tmp/ggames_test_curve.csv";

    const auto two = run("twosignal iterate --t 0.5 --config " + cfg + " --out " + curve);
    REQUIRE(two.exit_code == 0);
    const json j2 = json::parse(two.output);
    CHECK(j2.at("converged").get<bool>());
    {
        std::ifstream f(curve);
        std::string header;
        std::getline(f, header);
        CHECK(header == "theta,A");
    }

    const auto one = run("onesignal iterate --t 0.5 --config " + cfg + " --out " + curve);
    REQUIRE(one.exit_code == 0);
    const json j1 = json::parse(one.output);
    CHECK(j1.at("converged").get<bool>());
    CHECK(std::fabs(j1.at("cutoff").get<double>()) < 0.1);
}

TEST_CASE("non-convergence exits 3 and still writes the delta trace") {
    const auto cfg = write_temp("nc.json",
                                R"({"twosignal": {"max_iter": 1, "sup_tol": 1e-12,
                                    "grid": {"intervals_per_side": 100,
                                             "signal_x_points": 101, "u_points": 100}}})");
    const auto res = run("twosignal iterate --t 0.5 --config " + cfg);
    CHECK(res.exit_code == 3);
    CHECK(res.output.rfind("n,sup_delta", 0) == 0);
}

TEST_CASE("toml subset parser") {
    const auto j = ggames::cli::parse_toml(
        "# comment\n"
        "workers = 2\n"
        "[twosignal]\n"
        "c = 0.5          # trailing comment\n"
        "delta = 0.2\n"
        "[twosignal.grid]\n"
        "u_points = 400\n"
        "[simulate.sweep]\n"
        "inits = [1.0, 0.0]\n"
        "name = \"up # down\"\n");
    CHECK(j.at("workers").get<int>() == 2);
    CHECK(j.at("twosignal").at("c").get<double>() == 0.5);
    CHECK(j.at("twosignal").at("grid").at("u_points").get<int>() == 400);
    CHECK(j.at("simulate").at("sweep").at("inits").size() == 2);
    CHECK(j.at("simulate").at("sweep").at("name").get<std::string>() == "up # down");

    CHECK_THROWS_AS(ggames::cli::parse_toml("key value\n"), std::domain_error);
    CHECK_THROWS_AS(ggames::cli::parse_toml("[unclosed\n"), std::domain_error);
}

TEST_CASE("17-digit float serialization") {
    const json j{{"v", 0.1}, {"w", 1.0 / 3.0}};
    const std::string text = ggames::cli::dump_json(j);
    const json back = json::parse(text);
    CHECK(back.at("v").get<double>() == 0.1);
    CHECK(back.at("w").get<double>() == 1.0 / 3.0);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
}
