// config.hpp — the CLI/scenario configuration and its validation.
//
// The config file is flat key=value text whose keys mirror the long flag
// names (the CLI11 config reader handles it); command-line flags override
// file values.

#pragma once

#include "mhs/scale_norms.hpp"
#include "mhs/spectral_field.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>

namespace mhs {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ScenarioConfig {
    int p = 1;
    std::string init = "0.1*sin(2*pi*x)";
    int n_modes = 256;
    double dt = 1e-4;
    double t_end = 0.1;
    std::string method = "eulerian"; // eulerian | lagrangian | taylor | compare
    int record_every = 10;
    std::string out;        // history CSV path ("" = stdout summary only)
    std::string snapshots;  // JSONL path ("" = disabled)
    double s = 0.1;
    double sigma = 2.0;
    int kmax = 30;
    std::uint64_t seed = 42;
    bool dealias = true;
    int taylor_order = 16;
    double taylor_step = 0.01;
    double radius_floor = 0.05;

    ScaleParams scale_params() const { return ScaleParams{s, sigma, kmax}; }
    ModelParams model_params() const { return ModelParams{p, dealias}; }
};

inline void validate(const ScenarioConfig& c) {
    if (c.p < 1) throw ConfigError("p must be a positive integer");
    if (c.n_modes < 32 || !is_pow2(std::size_t(c.n_modes)))
        throw ConfigError("n must be a power of two >= 32");
    if (!(c.dt > 0.0) || !(c.dt < c.t_end)) throw ConfigError("need 0 < dt < t_end");
    if (c.method != "eulerian" && c.method != "lagrangian" && c.method != "taylor" && c.method != "compare")
        throw ConfigError("method must be one of eulerian|lagrangian|taylor|compare");
    if (c.record_every < 1) throw ConfigError("record_every must be >= 1");
    if (!(c.s > 0.0 && c.s < 1.0)) throw ConfigError("s must lie in (0,1)");
    if (c.sigma < 0.0) throw ConfigError("sigma must be >= 0");
    if (c.kmax < 1) throw ConfigError("kmax must be >= 1");
    if (c.taylor_order < 1) throw ConfigError("taylor_order must be >= 1");
    if (!(c.taylor_step > 0.0)) throw ConfigError("taylor_step must be positive");
}

namespace config_detail {

inline std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::string out = s.substr(a, b - a + 1);
    if (out.size() >= 2 && ((out.front() == '"' && out.back() == '"') || (out.front() == '\'' && out.back() == '\'')))
        out = out.substr(1, out.size() - 2);
    return out;
}

inline double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

inline long long to_int(const std::string& v, const std::string& key) {
    long long x = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("config: bad integer value for '" + key + "': " + v);
    return x;
}

inline bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + v);
}

} // namespace config_detail

/// Load a flat key=value config file (keys are the long flag names; '#'
/// starts a comment). Command-line flags parsed afterwards override these.
inline void apply_config_file(const std::string& path, ScenarioConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = config_detail::strip(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key=value at " + path + ":" + std::to_string(lineno));
        std::string key = config_detail::strip(stripped.substr(0, eq));
        const std::string value = config_detail::strip(stripped.substr(eq + 1));
        for (char& c : key)
            if (c == '-') c = '_';

        using namespace config_detail;
        if (key == "p") cfg.p = int(to_int(value, key));
        else if (key == "init") cfg.init = value;
        else if (key == "n") cfg.n_modes = int(to_int(value, key));
        else if (key == "dt") cfg.dt = to_double(value, key);
        else if (key == "t_end") cfg.t_end = to_double(value, key);
        else if (key == "method") cfg.method = value;
        else if (key == "record_every") cfg.record_every = int(to_int(value, key));
        else if (key == "out") cfg.out = value;
        else if (key == "snapshots") cfg.snapshots = value;
        else if (key == "s") cfg.s = to_double(value, key);
        else if (key == "sigma") cfg.sigma = to_double(value, key);
        else if (key == "kmax") cfg.kmax = int(to_int(value, key));
        else if (key == "seed") cfg.seed = std::uint64_t(to_int(value, key));
        else if (key == "dealias") cfg.dealias = to_bool(value, key);
        else if (key == "taylor_order") cfg.taylor_order = int(to_int(value, key));
        else if (key == "taylor_step") cfg.taylor_step = to_double(value, key);
        else if (key == "radius_floor") cfg.radius_floor = to_double(value, key);
        else throw ConfigError("config: unknown key '" + key + "' at " + path + ":" + std::to_string(lineno));
    }
}

/// Exit codes are a stable contract.
enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFail = 1,
    kExitConfig = 2,
    kExitBreakdown = 3,
    kExitNoBreaking = 4,
    kExitRadiusCollapse = 5,
};

} // namespace mhs
