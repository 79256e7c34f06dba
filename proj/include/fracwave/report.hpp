#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace fracwave {

enum class Trend { bounded, diverging, inconclusive, not_applicable, skipped };

constexpr const char* to_string(Trend t) noexcept {
    switch (t) {
        case Trend::bounded: return "bounded";
        case Trend::diverging: return "diverging";
        case Trend::inconclusive: return "inconclusive";
        case Trend::not_applicable: return "n/a";
        case Trend::skipped: return "skipped";
    }
    return "unknown";
}

/// One refinement level of a check.
struct Level {
    std::size_t n = 0;  ///< time subintervals
    std::size_t k = 0;  ///< spatial modes (0 for scalar checks)
    double lhs = 0.0;
    double rhs = 0.0;
    double value = 0.0;  ///< discrepancy, ratio or norm, depending on the check kind
};

/// A single verified statement across a refinement ladder.
struct Check {
    std::string id;
    std::string anchor;  ///< which identity or estimate is exercised
    std::string kind;    ///< identity | estimate | singularity | convergence | residual | ...
    Trend trend = Trend::not_applicable;
    bool pass = false;
    std::string note;
    double tolerance = 0.0;
    std::vector<Level> levels;
};

using Report = std::vector<Check>;

inline bool all_pass(const Report& r) {
    for (const auto& c : r) {
        if (!c.pass) return false;
    }
    return true;
}

/// Classifies a refinement sequence from the ratio of its last two increments.
///
/// diverging:   increments positive and not shrinking (ratio >= 0.95)
/// bounded:     increments shrinking geometrically (|ratio| <= 0.8) or negligible
/// inconclusive otherwise, and whenever fewer than three levels exist.
inline Trend classify_trend(const std::vector<double>& values) {
    if (values.size() < 3) return Trend::inconclusive;
    for (double v : values) {
        if (!std::isfinite(v)) return Trend::inconclusive;
    }
    const std::size_t m = values.size();
    const double d_last = values[m - 1] - values[m - 2];
    const double d_prev = values[m - 2] - values[m - 3];
    const double scale = std::max(std::abs(values[m - 1]), 1e-300);
    if (std::abs(d_last) <= 1e-9 * scale) return Trend::bounded;
    if (d_prev == 0.0) return Trend::inconclusive;
    const double rho = d_last / d_prev;
    if (d_last > 0.0 && rho >= 0.95) return Trend::diverging;
    if (std::abs(rho) <= 0.8) return Trend::bounded;
    return Trend::inconclusive;
}

/// Successive ratios values[i+1] / values[i].
inline std::vector<double> growth_factors(const std::vector<double>& values) {
    std::vector<double> out;
    for (std::size_t i = 1; i < values.size(); ++i) out.push_back(values[i] / values[i - 1]);
    return out;
}

inline std::vector<double> level_values(const Check& c) {
    std::vector<double> v;
    for (const auto& l : c.levels) v.push_back(l.value);
    return v;
}

}  // namespace fracwave
