#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include <quadmath.h>

#include "fracwave/error.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/special.hpp"

namespace fracwave {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MlParams {
    double alpha = 1.0;
    double beta = 1.0;
    /// Relative accuracy target.
    double tol = 1e-14;
};

enum class MlBranch { closed_form, series, integral, asymptotic, recurrence };

constexpr const char* to_string(MlBranch b) noexcept {
    switch (b) {
        case MlBranch::closed_form: return "closed-form";
        case MlBranch::series: return "series";
        case MlBranch::integral: return "integral";
        case MlBranch::asymptotic: return "asymptotic";
        case MlBranch::recurrence: return "recurrence";
    }
    return "unknown";
}

struct MlValue {
    double value;
    MlBranch branch;
    /// Set when the requested tolerance could not be certified in this regime.
    bool accuracy_loss;
};

namespace ml {

/// Below this |z| the Taylor series is the first choice.
inline constexpr double z_switch = 5.0;
/// From this -z on the asymptotic expansion is tried before the integral.
inline constexpr double z_asym = 30.0;
inline constexpr long double ld_eps = 1.0842021724855044e-19L;

struct SeriesResult {
    long double value;
    /// sum |term_k| / |sum term_k|; roughly the factor by which rounding is amplified.
    long double condition;
};

namespace detail {

inline long double q_exp(long double x) { return std::exp(x); }
inline long double q_log(long double x) { return std::log(x); }
inline long double q_lgamma(long double x) { return std::lgamma(x); }
inline __float128 q_exp(__float128 x) { return expq(x); }
inline __float128 q_log(__float128 x) { return logq(x); }
inline __float128 q_lgamma(__float128 x) { return lgammaq(x); }
template <class F>
F q_abs(F x) {
    return x < 0 ? -x : x;
}

/// Series accumulated in F with Neumaier compensation.
template <class F>
SeriesResult series_in(double alpha, double beta, double z) {
    const F a = alpha, b = beta, zl = z;
    const F logz = q_log(q_abs(zl));
    const F eps = std::is_same_v<F, long double> ? F(ld_eps) : F(1.0e-34L);
    F sum = 0, comp = 0, abs_sum = 0;
    for (std::size_t k = 0; k < 4000; ++k) {
        const F arg = a * static_cast<F>(k) + b;
        F term = q_exp(static_cast<F>(k) * logz - q_lgamma(arg));
        if (zl < 0 && (k % 2 == 1)) term = -term;
        const F t = sum + term;
        comp += (q_abs(sum) >= q_abs(term)) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        abs_sum += q_abs(term);
        // Past the peak of the terms and negligible against everything accumulated so far.
        if (arg > q_abs(zl) + 2 && q_abs(term) <= F(1e-3L) * eps * abs_sum) break;
    }
    const F value = sum + comp;
    const long double cond = value == 0 ? INFINITY : static_cast<long double>(abs_sum / q_abs(value));
    return {static_cast<long double>(value), cond};
}

}  // namespace detail

/// Taylor series sum z^k / Γ(alpha k + beta) with Neumaier compensation.
///
/// The terms peak near exp(|z|^{1/alpha}) while the sum may be O(1); once that amplification
/// would eat into long double the sum is accumulated in binary128 instead. The reported
/// condition is the amplification factor; the rounding floor is condition * unit roundoff of
/// the arithmetic used (series_roundoff).
inline SeriesResult series(double alpha, double beta, double z) {
    if (z == 0.0) return {rgammal(beta), 1.0L};
    if (std::pow(std::abs(z), 1.0 / alpha) > 9.0) return detail::series_in<__float128>(alpha, beta, z);
    return detail::series_in<long double>(alpha, beta, z);
}

/// Unit roundoff of the arithmetic series() uses for these arguments.
inline long double series_roundoff(double alpha, double z) {
    return z != 0.0 && std::pow(std::abs(z), 1.0 / alpha) > 9.0 ? 1.0e-34L : ld_eps;
}

/// Contribution of the poles of the Hankel-contour integrand for z = -x, x > 0.
/// Nonzero only for alpha > 1: (2/alpha) Re[zeta^{1-beta} e^{zeta}], zeta = x^{1/alpha} e^{i pi/alpha}.
inline long double pole_term(double alpha, double beta, double x) {
    if (alpha <= 1.0) return 0.0L;
    const long double a = alpha, b = beta;
    const long double pi = std::numbers::pi_v<long double>;
    const long double rho = std::pow(static_cast<long double>(x), 1.0L / a);
    const long double theta = pi / a;
    const long double mag = std::pow(rho, 1.0L - b) * std::exp(rho * std::cos(theta));
    return (2.0L / a) * mag * std::cos((1.0L - b) * theta + rho * std::sin(theta));
}

struct IntegralResult {
    long double value;
    bool converged;
};

/// Real-line integral representation for z = -x < 0, valid for beta < 1 + alpha, alpha != 1:
///
///   E = (1/pi) int_0^inf e^{-r} r^{alpha-beta} [r^alpha sin(pi beta) - x sin(pi(alpha-beta))]
///       / (r^{2 alpha} + 2 r^alpha x cos(pi alpha) + x^2) dr  + pole_term.
///
/// The integral is evaluated with an exp-sinh substitution r = exp((pi/2) sinh u) and trapezoid
/// sums whose step is halved until two successive sums agree.
inline IntegralResult integral(double alpha, double beta, double x, double tol) {
    const long double a = alpha, b = beta;
    const long double pi = std::numbers::pi_v<long double>;
    const long double sb = std::sin(pi * b), sab = std::sin(pi * (a - b)), ca = std::cos(pi * a);
    const long double half_pi = pi / 2.0L;

    // The integrand itself is evaluated in double: the sums below are accumulated in long
    // double and the integrand has no internal cancellation.
    const double ad = alpha, abd = alpha - beta, xd = x;
    const double sbd = static_cast<double>(sb), sabd = static_cast<double>(sab), cad = static_cast<double>(ca);
    const double hp = std::numbers::pi / 2.0;
    auto integrand_u = [=](long double ul) -> long double {
        const double u = static_cast<double>(ul);
        const double e = hp * std::sinh(u);
        if (e < -700.0 || e > 6.0) return 0.0L;
        const double r = std::exp(e);
        const double ra = std::exp(ad * e);
        const double num = ra * sbd - xd * sabd;
        const double den = ra * ra + 2.0 * ra * xd * cad + xd * xd;
        const double jac = r * hp * std::cosh(u);
        return std::exp(abd * e - r) * num / den * jac;
    };

    // Integration window: below r_lo the integrand contributes under ~e^{-46}, above r_hi
    // the factor e^{-r} kills it.
    const long double q = a - b + 1.0L;
    const long double log_lo = -std::min(700.0L, 46.0L / q);
    const long double u_lo = std::asinh(log_lo / half_pi);
    const long double u_hi = std::asinh(6.0L / half_pi);

    const long double poles = pole_term(alpha, beta, x);
    long double step = (u_hi - u_lo) / 16.0L;
    long double sum = 0.5L * (integrand_u(u_lo) + integrand_u(u_hi));
    for (int i = 1; i < 16; ++i) sum += integrand_u(u_lo + i * step);
    long double estimate = sum * step / pi;
    std::size_t count = 16;
    for (int level = 0; level < 16; ++level) {
        long double fresh = 0.0L;
        for (std::size_t i = 0; i < count; ++i) fresh += integrand_u(u_lo + (2 * i + 1) * step / 2.0L);
        sum += fresh;
        count *= 2;
        step /= 2.0L;
        const long double next = sum * step / pi;
        const long double total = next + poles;
        const long double scale = std::max(std::abs(total), 1e-300L);
        const bool done = level >= 2 && std::abs(next - estimate) <= 0.5L * tol * scale;
        estimate = next;
        if (done) return {estimate + poles, true};
    }
    return {estimate + poles, false};
}

struct AsymptoticResult {
    long double value;
    long double remainder;
};

/// Large negative argument expansion: pole_term - sum_{k=1}^{K} (-x)^{-k} / Γ(beta - alpha k).
/// The remainder estimate is the largest of the terms K-1 .. K+2, which stays honest when
/// individual terms vanish at poles of Γ.
inline AsymptoticResult asymptotic(double alpha, double beta, double x, int K = 10) {
    long double s = pole_term(alpha, beta, x);
    long double remainder = 0.0L;
    const long double xl = x;
    for (int k = 1; k <= K + 2; ++k) {
        long double term = rgammal(static_cast<long double>(beta) - static_cast<long double>(alpha) * k) /
                           std::pow(xl, static_cast<long double>(k));
        if (k % 2 == 1) term = -term;  // (-x)^{-k}
        if (k >= K - 1) remainder = std::max(remainder, std::abs(term));
        if (k <= K) s -= term;
    }
    return {s, remainder};
}

/// Euler-type integral for alpha = 1, beta > 1: E_{1,beta}(-x) = (1/Γ(beta)) int_0^1 exp(-x (1 - w^{1/(beta-1)})) dw,
/// by tanh-sinh trapezoid sums.
inline IntegralResult unit_alpha_integral(double beta, double x, double tol) {
    const long double p = 1.0L / (static_cast<long double>(beta) - 1.0L);
    const long double xl = x;
    const long double half_pi = std::numbers::pi_v<long double> / 2.0L;
    auto f = [&](long double u) -> long double {
        const long double th = std::tanh(half_pi * std::sinh(u));
        const long double w = 0.5L * (1.0L + th);
        const long double c = std::cosh(half_pi * std::sinh(u));
        const long double jac = 0.5L * half_pi * std::cosh(u) / (c * c);
        return std::exp(-xl * (1.0L - std::pow(w, p))) * jac;
    };
    const long double lim = 4.0L;
    long double step = 2.0L * lim / 16.0L;
    long double sum = 0.5L * (f(-lim) + f(lim));
    for (int i = 1; i < 16; ++i) sum += f(-lim + i * step);
    long double estimate = sum * step;
    std::size_t count = 16;
    for (int level = 0; level < 14; ++level) {
        long double fresh = 0.0L;
        for (std::size_t i = 0; i < count; ++i) fresh += f(-lim + (2 * i + 1) * step / 2.0L);
        sum += fresh;
        count *= 2;
        step /= 2.0L;
        const long double next = sum * step;
        const bool done = level >= 2 && std::abs(next - estimate) <= 0.05L * tol * std::abs(next);
        estimate = next;
        if (done) return {estimate * rgammal(beta), true};
    }
    return {estimate * rgammal(beta), false};
}

inline bool is_integer(double v) { return v == std::floor(v); }

}  // namespace ml

/// Evaluates E_{alpha,beta}(z) for z <= 0 and for 0 < z <= 5.
///
/// Dispatch: Taylor series for |z| <= 5 when it is well conditioned; for z < 0 otherwise the
/// expansion at -infinity when its remainder is below tolerance, else the real-line integral
/// representation (after reducing beta below 1 + alpha by the recurrence
/// E_{a,b}(z) = (E_{a,b-a}(z) - 1/Γ(b-a)) / z).
inline MlValue ml_evaluate(const MlParams& p, double z) {
    if (!(p.alpha > 0.0 && p.alpha <= 2.0)) {
        fail(Errc::domain_error, "Mittag-Leffler alpha must lie in (0,2], got " + std::to_string(p.alpha));
    }
    if (!(p.beta > 0.0) || !std::isfinite(p.beta)) {
        fail(Errc::domain_error, "Mittag-Leffler beta must be positive, got " + std::to_string(p.beta));
    }
    if (!(p.tol > 1e-15 && p.tol < 1e-6)) {
        fail(Errc::domain_error, "Mittag-Leffler tolerance must lie in (1e-15, 1e-6)");
    }
    if (std::isnan(z)) fail(Errc::domain_error, "Mittag-Leffler argument is NaN");
    if (z > ml::z_switch) {
        fail(Errc::domain_error, "positive Mittag-Leffler arguments are supported up to 5, got " + std::to_string(z));
    }
    if (z == 0.0) return {rgamma(p.beta), MlBranch::closed_form, false};

    const double a = p.alpha, b = p.beta, x = -z;

    if (a == 1.0 && b == 1.0) return {std::exp(z), MlBranch::closed_form, false};

    const bool small = std::abs(z) <= ml::z_switch;
    if (small) {
        const auto s = ml::series(a, b, z);
        const bool ok = s.condition * ml::series_roundoff(a, z) * 16.0L <= p.tol;
        if (ok || z > 0.0) return {static_cast<double>(s.value), MlBranch::series, !ok};
    }

    if (a == 1.0) {
        if (ml::is_integer(b)) {
            // E_{1,m}(z) = z^{1-m} (e^z - sum_{j<=m-2} z^j/j!)
            const int m = static_cast<int>(b);
            long double poly = 0.0L, term = 1.0L;
            for (int j = 0; j <= m - 2; ++j) {
                poly += term;
                term *= static_cast<long double>(z) / (j + 1);
            }
            const long double v = (std::exp(static_cast<long double>(z)) - poly) *
                                  std::pow(static_cast<long double>(z), static_cast<long double>(1 - m));
            return {static_cast<double>(v), MlBranch::closed_form, false};
        }
        if (b > 1.0) {
            const auto r = ml::unit_alpha_integral(b, x, p.tol);
            return {static_cast<double>(r.value), MlBranch::integral, !r.converged};
        }
        const auto r = ml::unit_alpha_integral(b + 1.0, x, p.tol);
        const long double v = rgammal(b) + static_cast<long double>(z) * r.value;
        return {static_cast<double>(v), MlBranch::recurrence, !r.converged};
    }

    if (x >= ml::z_asym) {
        const auto as = ml::asymptotic(a, b, x);
        if (as.remainder <= 0.1L * p.tol * std::abs(as.value)) {
            return {static_cast<double>(as.value), MlBranch::asymptotic, false};
        }
    }

    if (b < 1.0 + a) {
        const auto r = ml::integral(a, b, x, p.tol);
        return {static_cast<double>(r.value), MlBranch::integral, !r.converged};
    }

    // Lower beta by multiples of alpha into the range of the integral representation.
    const auto inner = ml_evaluate(MlParams{a, b - a, p.tol}, z);
    const long double v = (static_cast<long double>(inner.value) - rgammal(b - a)) / static_cast<long double>(z);
    return {static_cast<double>(v), MlBranch::recurrence, inner.accuracy_loss};
}

inline double ml_eval(const MlParams& p, double z) { return ml_evaluate(p, z).value; }

/// Mittag-Leffler factors of the scalar relaxation problem sampled at z_i = -lambda t_i^alpha:
/// e1 = E_{a,1}, e2 = E_{a,2}, and the kernel antiderivatives
/// k1 = t^a E_{a,a+1}, k2 = t^{a+1} E_{a,a+2}.
struct RelaxationKernels {
    std::vector<double> e1, e2, k1, k2;
};

inline RelaxationKernels relaxation_kernels(double alpha, double lambda, const TimeGrid& grid) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        fail(Errc::invalid_input, "relaxation kernels need lambda >= 0");
    }
    const std::size_t n = grid.size();
    RelaxationKernels out{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n, 0.0),
                          std::vector<double>(n, 0.0)};
    const MlParams p1{alpha, 1.0}, p2{alpha, 2.0}, p3{alpha, alpha + 1.0}, p4{alpha, alpha + 2.0};
    out.e1[0] = 1.0;
    out.e2[0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double t = grid.node(i);
        const double ta = std::pow(t, alpha);
        const double z = -lambda * ta;
        try {
            out.e1[i] = ml_eval(p1, z);
            out.e2[i] = ml_eval(p2, z);
            // Away from 0 the higher members follow from E_{a,b+a} = (E_{a,b} - 1/Γ(b)) / z.
            const bool far = z < -ml::z_switch;
            out.k1[i] = ta * (far ? (out.e1[i] - 1.0) / z : ml_eval(p3, z));
            out.k2[i] = ta * t * (far ? (out.e2[i] - 1.0) / z : ml_eval(p4, z));
        } catch (const Error& e) {
            fail(e.code(), std::string("at node ") + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

/// Convolution int_0^t K(s) g(t-s) ds with K' = s^{alpha-1} E_{alpha,alpha}(-lambda s^alpha)
/// given the antiderivatives of K. g is taken piecewise linear between nodes and integrated
/// exactly: y_n = K1(t_n) g_0 + sum_k (K2(s_k) - K2(s_{k-1}))/h (g_{n-k+1} - g_{n-k}).
inline GridFunction kernel_convolution(const RelaxationKernels& kern, const GridFunction& g) {
    const auto& grid = g.grid();
    const std::size_t N = grid.N();
    if (kern.k1.size() != N + 1) fail(Errc::incompatible_grids, "kernel samples and forcing differ in length");
    const long double h = grid.h();
    std::vector<long double> dK(N + 1, 0.0L);
    for (std::size_t k = 1; k <= N; ++k) dK[k] = (static_cast<long double>(kern.k2[k]) - kern.k2[k - 1]) / h;
    std::vector<long double> dg(N + 1, 0.0L);
    const auto& gv = g.vector();
    for (std::size_t j = 1; j <= N; ++j) dg[j] = static_cast<long double>(gv[j]) - gv[j - 1];
    std::vector<double> y(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        long double s = static_cast<long double>(kern.k1[n]) * gv[0];
        for (std::size_t k = 1; k <= n; ++k) s += dK[k] * dg[n - k + 1];
        y[n] = static_cast<double>(s);
    }
    return GridFunction(grid, std::move(y));
}

/// int_0^t s^{alpha-1} E_{alpha,alpha}(-lambda s^alpha) g(t-s) ds at every node; node 0 is 0.
inline GridFunction ml_kernel_integral(double alpha, double lambda, const GridFunction& g) {
    return kernel_convolution(relaxation_kernels(alpha, lambda, g.grid()), g);
}

}  // namespace fracwave
