#pragma once

#include <cmath>
#include <string>

#include "fracwave/error.hpp"

namespace fracwave {

/// Gamma function. Thin wrapper so every caller goes through one place.
inline double gamma(double x) { return std::tgamma(x); }

/// Reciprocal gamma 1/Γ(x); exactly 0 at the poles x = 0, -1, -2, ...
inline double rgamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

inline long double rgammal(long double x) {
    if (x <= 0.0L && x == std::floor(x)) return 0.0L;
    return 1.0L / std::tgamma(x);
}

enum class PowerRuleMode { integral, derivative };

/// Result of applying a Riemann-Liouville operator to t^mu: coefficient * t^exponent.
struct PowerRule {
    double coefficient;
    double exponent;
    /// True when t^mu lies in the kernel of the derivative (coefficient is exactly 0).
    bool kernel;
};

/// Analytic image of t^mu under I_{0+}^beta or D_{0+}^beta.
///
/// Integral:   I^beta t^mu = Γ(mu+1)/Γ(mu+beta+1) t^{mu+beta}.
/// Derivative: D^beta t^mu = Γ(mu+1)/Γ(mu+1-beta) t^{mu-beta}, exactly 0 when mu+1-beta is a
/// non-positive integer (mu = beta-1, beta-2, ...).
inline PowerRule power_rule(double mu, double beta, PowerRuleMode mode) {
    if (!std::isfinite(mu) || mu <= -1.0) {
        fail(Errc::domain_error, "power rule needs mu > -1, got " + std::to_string(mu));
    }
    if (!std::isfinite(beta) || beta <= 0.0) {
        fail(Errc::invalid_order, "power rule needs beta > 0, got " + std::to_string(beta));
    }
    if (mode == PowerRuleMode::integral) {
        return {std::exp(std::lgamma(mu + 1.0) - std::lgamma(mu + beta + 1.0)), mu + beta, false};
    }
    const double shifted = mu + 1.0 - beta;
    // The kernel test tolerates the rounding in mu = beta - 1 computed by the caller.
    const double nearest = std::round(shifted);
    if (nearest <= 0.0 && std::abs(shifted - nearest) <= 64.0 * 2.220446049250313e-16 * (1.0 + std::abs(beta))) {
        return {0.0, mu - beta, true};
    }
    return {std::tgamma(mu + 1.0) * rgamma(shifted), mu - beta, false};
}

}  // namespace fracwave
