#include "ggames/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ggames/common.hpp"

namespace ggames::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// strips a trailing comment that is not inside a string literal
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

nlohmann::json parse_toml_scalar(const std::string& raw, int line_no) {
    const std::string v = trim(raw);
    if (v.empty()) throw std::domain_error("toml: empty value at line " + std::to_string(line_no));
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') {
            throw std::domain_error("toml: unterminated string at line " + std::to_string(line_no));
        }
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    try {
        std::size_t pos = 0;
        if (v.find_first_of(".eEnN") == std::string::npos) {
            const long long i = std::stoll(v, &pos);
            if (pos == v.size()) return i;
        }
        pos = 0;
        const double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (const std::exception&) {
        // fall through
    }
    throw std::domain_error("toml: cannot parse value '" + v + "' at line " +
                            std::to_string(line_no));
}

nlohmann::json parse_toml_value(const std::string& raw, int line_no) {
    const std::string v = trim(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') {
            throw std::domain_error("toml: unterminated array at line " + std::to_string(line_no));
        }
        nlohmann::json arr = nlohmann::json::array();
        std::string body = v.substr(1, v.size() - 2);
        std::string item;
        bool in_string = false;
        for (char ch : body) {
            if (ch == '"') in_string = !in_string;
            if (ch == ',' && !in_string) {
                if (!trim(item).empty()) arr.push_back(parse_toml_scalar(item, line_no));
                item.clear();
            } else {
                item += ch;
            }
        }
        if (!trim(item).empty()) arr.push_back(parse_toml_scalar(item, line_no));
        return arr;
    }
    return parse_toml_scalar(v, line_no);
}

nlohmann::json* descend(nlohmann::json& root, const std::string& dotted, int line_no) {
    nlohmann::json* node = &root;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        part = trim(part);
        if (part.empty()) {
            throw std::domain_error("toml: empty table name at line " + std::to_string(line_no));
        }
        node = &(*node)[part];
        if (!node->is_object() && !node->is_null()) {
            throw std::domain_error("toml: '" + part + "' is not a table (line " +
                                    std::to_string(line_no) + ")");
        }
        if (node->is_null()) *node = nlohmann::json::object();
    }
    return node;
}

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
    if (!obj.is_object()) {
        throw std::domain_error("config: section '" + context + "' must be an object");
    }
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw std::domain_error("config: unknown key '" +
                                    (context.empty() ? item.key() : context + "." + item.key()) +
                                    "'");
        }
    }
}

void check_dist(const nlohmann::json& j, const std::string& context) {
    if (j.is_null()) return;
    check_keys(j, {"kind", "precision", "half_width", "x", "density"}, context);
}

void dump_rec(const nlohmann::json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            std::size_t i = 0;
            for (const auto& item : j.items()) {
                out += pad;
                out += nlohmann::json(item.key()).dump();
                out += ": ";
                dump_rec(item.value(), out, indent, depth + 1);
                if (++i != j.size()) out += ",";
                out += "\n";
            }
            out += close_pad + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                dump_rec(j[i], out, indent, depth + 1);
            }
            out += "]";
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

nlohmann::json parse_toml(const std::string& text) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string stripped = trim(strip_comment(line));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw std::domain_error("toml: bad table header at line " +
                                        std::to_string(line_no));
            }
            table = descend(root, stripped.substr(1, stripped.size() - 2), line_no);
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::domain_error("toml: expected key = value at line " +
                                    std::to_string(line_no));
        }
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty()) {
            throw std::domain_error("toml: empty key at line " + std::to_string(line_no));
        }
        (*table)[key] = parse_toml_value(stripped.substr(eq + 1), line_no);
    }
    return root;
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    bool looks_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    if (!looks_json && !(path.size() >= 5 && path.substr(path.size() - 5) == ".toml")) {
        for (char ch : text) {
            if (std::isspace(static_cast<unsigned char>(ch))) continue;
            looks_json = ch == '{';
            break;
        }
    }
    if (looks_json) {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::domain_error(std::string("config: JSON parse failure: ") + e.what());
        }
    }
    return parse_toml(text);
}

void validate_config(const nlohmann::json& cfg) {
    check_keys(cfg, {"model", "output", "workers", "benchmark", "netsignal", "twosignal",
                     "onesignal", "simulate"},
               "");
    if (cfg.contains("output")) check_keys(cfg["output"], {"format", "path"}, "output");
    if (cfg.contains("benchmark")) check_keys(cfg["benchmark"], {"c", "alpha_x"}, "benchmark");
    if (cfg.contains("netsignal")) {
        check_keys(cfg["netsignal"],
                   {"theta", "z_star", "alpha_z", "c", "theta_lo", "theta_hi", "theta_n",
                    "branch_mode", "branch_value", "window", "z_scan_lo", "z_scan_hi",
                    "z_scan_points"},
                   "netsignal");
    }
    if (cfg.contains("twosignal")) {
        const auto& ts = cfg["twosignal"];
        check_keys(ts,
                   {"c", "delta", "gamma", "xi", "t", "sigma", "dist_x", "dist_y", "eta_max",
                    "grid", "max_iter", "sup_tol", "tol"},
                   "twosignal");
        if (ts.contains("grid")) {
            check_keys(ts["grid"],
                       {"intervals_per_side", "halfwidth", "halfwidth_sds", "signal_x_points",
                        "u_points", "threshold_tol"},
                       "twosignal.grid");
        }
        if (ts.contains("dist_x")) check_dist(ts["dist_x"], "twosignal.dist_x");
        if (ts.contains("dist_y")) check_dist(ts["dist_y"], "twosignal.dist_y");
    }
    if (cfg.contains("onesignal")) {
        const auto& os = cfg["onesignal"];
        check_keys(os, {"c", "delta", "gamma", "t", "dist_rho", "xi_max", "grid", "max_iter",
                        "sup_tol"},
                   "onesignal");
        if (os.contains("grid")) {
            check_keys(os["grid"],
                       {"intervals_per_side", "halfwidth", "halfwidth_sds", "cutoff_tol"},
                       "onesignal.grid");
        }
        if (os.contains("dist_rho")) check_dist(os["dist_rho"], "onesignal.dist_rho");
    }
    if (cfg.contains("simulate")) {
        const auto& sim = cfg["simulate"];
        check_keys(sim,
                   {"model", "n_agents", "theta", "seed", "max_rounds", "damping", "init_a",
                    "conv_tol", "netsignal", "onesignal", "fundamental", "twosignal", "sweep"},
                   "simulate");
        if (sim.contains("netsignal")) {
            check_keys(sim["netsignal"], {"z_star", "alpha_z"}, "simulate.netsignal");
        }
        if (sim.contains("onesignal")) {
            check_keys(sim["onesignal"], {"z_cut", "dist_rho"}, "simulate.onesignal");
            if (sim["onesignal"].contains("dist_rho")) {
                check_dist(sim["onesignal"]["dist_rho"], "simulate.onesignal.dist_rho");
            }
        }
        if (sim.contains("fundamental")) {
            check_keys(sim["fundamental"], {"x_star", "alpha_x"}, "simulate.fundamental");
        }
        if (sim.contains("twosignal")) {
            const auto& ts = sim["twosignal"];
            check_keys(ts, {"dist_x", "dist_y", "curve_x", "curve_yhat"}, "simulate.twosignal");
            if (ts.contains("dist_x")) check_dist(ts["dist_x"], "simulate.twosignal.dist_x");
            if (ts.contains("dist_y")) check_dist(ts["dist_y"], "simulate.twosignal.dist_y");
        }
        if (sim.contains("sweep")) {
            check_keys(sim["sweep"], {"theta_lo", "theta_hi", "n", "replications", "inits"},
                       "simulate.sweep");
        }
    }
}

std::string dump_json(const nlohmann::json& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    return out;
}

}  // namespace ggames::cli
