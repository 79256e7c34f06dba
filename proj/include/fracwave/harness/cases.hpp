#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fracwave/error.hpp"
#include "fracwave/galerkin.hpp"
#include "fracwave/mittag_leffler.hpp"
#include "fracwave/mode_solver.hpp"
#include "fracwave/special.hpp"

namespace fracwave::harness {

/// Scalar data (c0, c1, g) with analytic g(0), g'(0); lambda comes from the sweep unless the
/// case pins it.
struct OdeCase {
    std::string name;
    std::string version;
    double c0;
    double c1;
    std::function<double(double, double)> g;  ///< g(t, lambda)
    std::function<double(double)> g0;         ///< g(0) as a function of lambda
    std::function<double(double)> g1;         ///< g'(0) as a function of lambda
    std::optional<double> fixed_lambda;
    /// Exact y(t; alpha, lambda), when one exists.
    std::function<double(double, double, double)> exact;

    ModeProblem problem(const TimeGrid& grid, double alpha, double lambda) const {
        const double lam = fixed_lambda.value_or(lambda);
        auto samples = GridFunction::sample(grid, [&](double t) { return g(t, lam); });
        return ModeProblem{alpha, lam, c0, c1, std::move(samples), g0(lam), g1(lam)};
    }
};

inline std::vector<std::string> ode_case_names() {
    return {"ode-incompatible", "ode-compatible", "ode-steady", "ode-ml", "ode-poly"};
}

inline OdeCase ode_case(const std::string& name) {
    auto zero = [](double) { return 0.0; };
    if (name == "ode-incompatible") {
        // g(0) = 1 != lambda c0 = 0: the t^alpha singularity is present.
        return {name, "v1", 0.0, 0.0, [](double t, double) { return 1.0 + t; }, [](double) { return 1.0; },
                [](double) { return 1.0; }, std::nullopt, nullptr};
    }
    if (name == "ode-compatible") {
        // g(0) = lambda c0, so the leading singular part vanishes.
        return {name, "v1", 1.0, 0.0, [](double t, double lam) { return lam + t; }, [](double lam) { return lam; },
                [](double) { return 1.0; }, std::nullopt, nullptr};
    }
    if (name == "ode-steady") {
        return {name, "v1", 1.0, 0.0, [](double, double lam) { return lam; }, [](double lam) { return lam; }, zero,
                std::nullopt, [](double, double, double) { return 1.0; }};
    }
    if (name == "ode-ml") {
        return {name, "v1", 1.0, 0.0, [](double, double) { return 0.0; }, zero, zero, std::nullopt,
                [](double t, double a, double lam) { return ml_eval(MlParams{a, 1.0}, -lam * std::pow(t, a)); }};
    }
    if (name == "ode-poly") {
        return {name,
                "v1",
                0.0,
                0.0,
                [](double t, double) { return 1.0 + t + t * t; },
                [](double) { return 1.0; },
                [](double) { return 1.0; },
                0.0,
                [](double t, double a, double) {
                    if (t == 0.0) return 0.0;
                    return std::pow(t, a) * rgamma(a + 1.0) + std::pow(t, a + 1.0) * rgamma(a + 2.0) +
                           2.0 * std::pow(t, a + 2.0) * rgamma(a + 3.0);
                }};
    }
    fail(Errc::usage_error, "unknown ODE data case '" + name + "'");
}

/// Wave-problem data on (0, L).
struct PdeCase {
    std::string name;
    std::string version;
    ProblemData data;
    IntervalDomain domain;
    /// Exact u(x, t) when one exists, as mode coefficients c_k(t) (k starts at 1).
    std::function<double(std::size_t, double)> exact_coefficient;
};

inline std::vector<std::string> pde_case_names() {
    return {"single-mode-ic", "incompatible-ic", "forced-mode2", "manufactured-poly", "manufactured-linear",
            "initial-velocity", "smooth-family", "zero"};
}

inline PdeCase pde_case(const std::string& name, double alpha, double T, std::size_t M = 2048) {
    const double L = std::numbers::pi;
    PdeCase c{name, "v1", ProblemData{}, IntervalDomain{L, M}, nullptr};
    c.data.alpha = alpha;
    c.data.T = T;
    c.data.u0 = SpatialFunction::zero();
    c.data.u1 = SpatialFunction::zero();
    c.data.f = Forcing::zero();
    const auto phi = [L](std::size_t k) { return [k, L](double x) { return EigenPair{k, L}.phi(x); }; };

    if (name == "single-mode-ic") {
        c.data.u0 = SinePolynomial{{{1, 1.0}}};
        c.exact_coefficient = [alpha](std::size_t k, double t) {
            return k == 1 ? ml_eval(MlParams{alpha, 1.0}, -std::pow(t, alpha)) : 0.0;
        };
    } else if (name == "incompatible-ic") {
        c.data.u0 = SinePolynomial{{{1, 1.0}, {3, 0.5}}};
    } else if (name == "forced-mode2") {
        // Forcing given pointwise, so the decoupling goes through the projection.
        c.data.f = Forcing([phi](double x, double) { return phi(2)(x); });
        c.data.ft0 = SpatialFunction::zero();
    } else if (name == "manufactured-poly") {
        // u* = (1 + t^2) phi_1 with lambda_1 = 1: f = (2 t^{2-alpha}/Γ(3-alpha) + 1 + t^2) phi_1.
        c.data.u0 = SinePolynomial{{{1, 1.0}}};
        c.data.f = Forcing(std::vector<ModalTerm>{
            {1, [alpha](double t) { return 2.0 * std::pow(t, 2.0 - alpha) * rgamma(3.0 - alpha) + 1.0 + t * t; },
             std::nullopt}});
        c.exact_coefficient = [](std::size_t k, double t) { return k == 1 ? 1.0 + t * t : 0.0; };
    } else if (name == "manufactured-linear") {
        // u* = t phi_1: the derivative term vanishes and f = lambda_1 t phi_1.
        c.data.u1 = SinePolynomial{{{1, 1.0}}};
        c.data.f = Forcing(std::vector<ModalTerm>{{1, [](double t) { return t; }, 1.0}});
        c.exact_coefficient = [](std::size_t k, double t) { return k == 1 ? t : 0.0; };
    } else if (name == "initial-velocity") {
        c.data.u1 = SinePolynomial{{{1, 1.0}}};
        c.exact_coefficient = [alpha](std::size_t k, double t) {
            return k == 1 ? t * ml_eval(MlParams{alpha, 2.0}, -std::pow(t, alpha)) : 0.0;
        };
    } else if (name == "smooth-family") {
        // Infinitely many active modes, so mode refinement matters. The constant 2/L^2 cancels
        // Delta u0, leaving f(0) + Delta u0 = x(L-x)/L^2 in H^1_0 and H^2.
        c.version = "v2";
        c.data.u0 = SpatialFunction([L](double x) { return x * (L - x) / (L * L); });
        c.data.u1 = SpatialFunction([L](double x) { return std::sin(x * std::numbers::pi / L) * 0.5; });
        c.data.f = Forcing([L](double x, double t) { return (1.0 + t) * x * (L - x) / (L * L) + 2.0 / (L * L); });
        c.data.ft0 = SpatialFunction([L](double x) { return x * (L - x) / (L * L); });
    } else if (name == "zero") {
        c.data.ft0 = SpatialFunction::zero();
        c.exact_coefficient = [](std::size_t, double) { return 0.0; };
    } else {
        fail(Errc::usage_error, "unknown PDE data case '" + name + "'");
    }
    return c;
}

}  // namespace fracwave::harness
