#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fracwave/error.hpp"

namespace fracwave::harness {

enum class ExperimentKind { lemmas, ode_regularity, pde_regularity, convergence, manufactured };

constexpr const char* to_string(ExperimentKind k) noexcept {
    switch (k) {
        case ExperimentKind::lemmas: return "lemmas";
        case ExperimentKind::ode_regularity: return "ode-regularity";
        case ExperimentKind::pde_regularity: return "pde-regularity";
        case ExperimentKind::convergence: return "convergence";
        case ExperimentKind::manufactured: return "manufactured";
    }
    return "unknown";
}

inline ExperimentKind parse_kind(const std::string& s) {
    for (auto k : {ExperimentKind::lemmas, ExperimentKind::ode_regularity, ExperimentKind::pde_regularity,
                   ExperimentKind::convergence, ExperimentKind::manufactured}) {
        if (s == to_string(k)) return k;
    }
    fail(Errc::usage_error, "unknown experiment kind '" + s + "'");
}

/// Pass/fail thresholds. Every one can be overridden in the [tolerances] section.
struct Tolerances {
    double identity = 1e-3;       ///< identity discrepancy relative to input scale
    double identity_rate = 10.0;  ///< coefficient of the h^{1.5} allowance
    double reduction = 2.0;       ///< required error reduction per doubling
    double roundoff = 1e-12;      ///< discrepancies below this (relative) count as exact
    double stability = 0.2;       ///< relative drift of estimate ratios across levels
    double decade = 10.0;         ///< max/min spread of ratios over a lambda sweep
    double ratio_band_lo = 0.1;   ///< norm-equivalence band
    double ratio_band_hi = 10.0;
    double diverging = 1.8;       ///< growth per doubling that counts as divergence
    double bounded = 1.25;        ///< growth per doubling that counts as bounded
    double residual = 1e-2;       ///< equation residual relative to its scale
    double weak = 1e-3;           ///< weak-form residual relative to its scale
    double slope = 5e-2;          ///< initial slope recovery
    double manufactured = 1e-3;   ///< manufactured solution recovery (relative max error)
    double leak = 1e-10;          ///< spectral decoupling
    double order_margin = 0.1;    ///< slack on observed convergence orders
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::lemmas;
    bool kind_set = false;
    double alpha = 1.5;
    double T = 1.0;
    std::uint32_t seed = 20240607u;
    std::string data_case;
    std::string output;
    std::string format = "json";
    std::vector<std::size_t> levels{512, 1024, 2048};
    std::vector<std::size_t> modes{};
    std::vector<double> lambdas{1.0};
    std::size_t spatial_resolution = 2048;
    Tolerances tol{};
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] inline void config_error(std::size_t line, const std::string& field, const std::string& msg) {
    fail(Errc::usage_error, "config line " + std::to_string(line) + ", field '" + field + "': " + msg);
}

inline double parse_double(const std::string& v, std::size_t line, const std::string& field) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        config_error(line, field, "expected a number, got '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(d)) config_error(line, field, "expected a number, got '" + v + "'");
    return d;
}

inline std::size_t parse_count(const std::string& v, std::size_t line, const std::string& field) {
    const double d = parse_double(v, line, field);
    if (d < 1.0 || d != std::floor(d) || d > 1e9) config_error(line, field, "expected a positive integer, got '" + v + "'");
    return static_cast<std::size_t>(d);
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Ladders must be strictly increasing with every entry base * 2^i.
inline void check_ladder(const std::vector<std::size_t>& ladder, std::size_t line, const std::string& field) {
    if (ladder.empty()) config_error(line, field, "ladder is empty");
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        if (ladder[i] != ladder[0] << i) {
            config_error(line, field, "ladder must double at each step starting from " + std::to_string(ladder[0]));
        }
    }
}

}  // namespace detail

/// Parses the sectioned key = value format. `#` starts a comment.
inline ExperimentConfig parse_config(const std::string& text) {
    using namespace detail;
    ExperimentConfig cfg;
    std::string section;
    std::size_t lineno = 0, levels_line = 0, modes_line = 0;
    std::istringstream in(text);
    std::string raw;
    const std::map<std::string, double Tolerances::*> tol_fields{
        {"identity", &Tolerances::identity},         {"identity_rate", &Tolerances::identity_rate},
        {"reduction", &Tolerances::reduction},       {"roundoff", &Tolerances::roundoff},
        {"stability", &Tolerances::stability},       {"decade", &Tolerances::decade},
        {"ratio_band_lo", &Tolerances::ratio_band_lo}, {"ratio_band_hi", &Tolerances::ratio_band_hi},
        {"diverging", &Tolerances::diverging},       {"bounded", &Tolerances::bounded},
        {"residual", &Tolerances::residual},         {"weak", &Tolerances::weak},
        {"slope", &Tolerances::slope},               {"manufactured", &Tolerances::manufactured},
        {"leak", &Tolerances::leak},                 {"order_margin", &Tolerances::order_margin},
    };
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') config_error(lineno, line, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "grid" && section != "ode" && section != "tolerances") {
                config_error(lineno, section, "unknown section");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) config_error(lineno, line, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) config_error(lineno, key, "key outside of any section");
        const std::string field = section + "." + key;

        if (section == "experiment") {
            if (key == "kind") {
                try {
                    cfg.kind = parse_kind(value);
                } catch (const Error&) {
                    config_error(lineno, field, "unknown experiment kind '" + value + "'");
                }
                cfg.kind_set = true;
            } else if (key == "alpha") {
                cfg.alpha = parse_double(value, lineno, field);
                if (!(cfg.alpha > 1.0 && cfg.alpha < 2.0)) config_error(lineno, field, "alpha must lie in (1,2)");
            } else if (key == "T") {
                cfg.T = parse_double(value, lineno, field);
                if (!(cfg.T > 0.0)) config_error(lineno, field, "T must be positive");
            } else if (key == "seed") {
                const double s = parse_double(value, lineno, field);
                if (s < 0.0 || s != std::floor(s) || s > 4294967295.0) config_error(lineno, field, "seed must be a 32-bit unsigned integer");
                cfg.seed = static_cast<std::uint32_t>(s);
            } else if (key == "case") {
                cfg.data_case = value;
            } else if (key == "output") {
                cfg.output = value;
            } else if (key == "format") {
                if (value != "json" && value != "csv") config_error(lineno, field, "format must be json or csv");
                cfg.format = value;
            } else {
                config_error(lineno, field, "unknown key");
            }
        } else if (section == "grid") {
            if (key == "levels" || key == "modes") {
                std::vector<std::size_t> ladder;
                for (const auto& item : split_list(value)) ladder.push_back(parse_count(item, lineno, field));
                check_ladder(ladder, lineno, field);
                if (key == "levels") {
                    cfg.levels = ladder;
                    levels_line = lineno;
                } else {
                    cfg.modes = ladder;
                    modes_line = lineno;
                }
            } else if (key == "spatial_resolution") {
                cfg.spatial_resolution = parse_count(value, lineno, field);
            } else {
                config_error(lineno, field, "unknown key");
            }
        } else if (section == "ode") {
            if (key == "lambdas") {
                cfg.lambdas.clear();
                for (const auto& item : split_list(value)) {
                    const double l = parse_double(item, lineno, field);
                    if (l < 0.0) config_error(lineno, field, "lambda must be >= 0");
                    cfg.lambdas.push_back(l);
                }
                if (cfg.lambdas.empty()) config_error(lineno, field, "lambda list is empty");
            } else {
                config_error(lineno, field, "unknown key");
            }
        } else if (section == "tolerances") {
            const auto it = tol_fields.find(key);
            if (it == tol_fields.end()) config_error(lineno, field, "unknown key");
            cfg.tol.*(it->second) = parse_double(value, lineno, field);
        }
    }
    if (!cfg.modes.empty() && cfg.modes.size() != cfg.levels.size()) {
        config_error(modes_line, "grid.modes", "modes ladder must have as many entries as grid.levels (line " +
                                                   std::to_string(levels_line) + ")");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(Errc::io_error, "cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace fracwave::harness
