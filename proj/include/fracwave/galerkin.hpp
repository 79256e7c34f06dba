#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracwave/error.hpp"
#include "fracwave/frac_calculus.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/mode_solver.hpp"
#include "fracwave/parallel.hpp"
#include "fracwave/sobolev.hpp"

namespace fracwave {

/// Spatial interval (0, L) with M Simpson subintervals for projections.
struct IntervalDomain {
    double L = std::numbers::pi;
    std::size_t M = 2048;

    void validate() const {
        if (!(L > 0.0) || !std::isfinite(L)) fail(Errc::invalid_input, "interval length must be positive");
        if (M < 64) fail(Errc::resolution_error, "spatial resolution M must be at least 64");
        if (M % 2 != 0) fail(Errc::invalid_input, "Simpson projection needs an even M");
    }
};

/// Dirichlet Laplacian eigenpair on (0, L): lambda_k = (k pi/L)^2, phi_k = sqrt(2/L) sin(k pi x/L).
struct EigenPair {
    std::size_t k;
    double L;

    double lambda() const noexcept {
        const double w = static_cast<double>(k) * std::numbers::pi / L;
        return w * w;
    }
    double phi(double x) const noexcept {
        return std::sqrt(2.0 / L) * std::sin(static_cast<double>(k) * std::numbers::pi * x / L);
    }
};

/// Finite sine expansion sum_k amplitude_k phi_k; projects exactly.
struct SinePolynomial {
    std::vector<std::pair<std::size_t, double>> terms;
};

/// Spatial data: either a callback or a registered sine polynomial.
class SpatialFunction {
public:
    SpatialFunction() : sine_(SinePolynomial{}) {}
    SpatialFunction(SinePolynomial s) : sine_(std::move(s)) {}  // NOLINT(google-explicit-constructor)
    SpatialFunction(std::function<double(double)> fn) : fn_(std::move(fn)) {}  // NOLINT

    static SpatialFunction zero() { return SpatialFunction(); }

    double operator()(double x, double L) const {
        if (fn_) return fn_(x);
        double s = 0.0;
        for (const auto& [k, a] : sine_->terms) s += a * EigenPair{k, L}.phi(x);
        return s;
    }
    const std::optional<SinePolynomial>& sine() const noexcept { return sine_; }

private:
    std::function<double(double)> fn_;
    std::optional<SinePolynomial> sine_;
};

/// One modal component f_k(t) phi_k of a forcing, with f_k'(0) when known.
struct ModalTerm {
    std::size_t k;
    std::function<double(double)> profile;
    std::optional<double> slope0{};
};

/// Space-time forcing: a callback f(x,t) projected per time slice, or an exact modal form.
class Forcing {
public:
    Forcing() = default;
    Forcing(std::function<double(double, double)> fn) : fn_(std::move(fn)) {}  // NOLINT
    Forcing(std::vector<ModalTerm> modal) : modal_(std::move(modal)) {}         // NOLINT

    static Forcing zero() { return Forcing(std::vector<ModalTerm>{}); }

    bool is_callback() const noexcept { return static_cast<bool>(fn_); }
    const std::function<double(double, double)>& callback() const noexcept { return fn_; }
    const std::vector<ModalTerm>& modal() const noexcept { return modal_; }

private:
    std::function<double(double, double)> fn_;
    std::vector<ModalTerm> modal_;
};

/// Data of the wave problem on (0, L) x (0, T).
struct ProblemData {
    SpatialFunction u0;
    SpatialFunction u1;
    Forcing f;
    double T = 1.0;
    double alpha = 1.5;
    /// f(., 0) and f_t(., 0) when supplied separately.
    std::optional<SpatialFunction> f0{};
    std::optional<SpatialFunction> ft0{};
};

struct Projection {
    std::vector<double> coefficients;  ///< index k-1 holds (v, phi_k)
    double parseval_residual;          ///< ||v||^2 - sum coef^2
};

namespace detail {

/// Composite Simpson weights on M subintervals.
inline std::vector<double> simpson_weights(const IntervalDomain& d) {
    const double h = d.L / static_cast<double>(d.M);
    std::vector<double> w(d.M + 1);
    for (std::size_t j = 0; j <= d.M; ++j) {
        w[j] = (j == 0 || j == d.M) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        w[j] *= h / 3.0;
    }
    return w;
}

/// phi_k(x_j) for k = 1..K on the Simpson nodes, row-major by k.
inline std::vector<double> basis_table(const IntervalDomain& d, std::size_t K) {
    std::vector<double> tab(K * (d.M + 1));
    for (std::size_t k = 1; k <= K; ++k) {
        const EigenPair e{k, d.L};
        for (std::size_t j = 0; j <= d.M; ++j) {
            tab[(k - 1) * (d.M + 1) + j] = e.phi(d.L * static_cast<double>(j) / static_cast<double>(d.M));
        }
    }
    return tab;
}

inline Projection project_samples(const std::vector<double>& samples, const std::vector<double>& weights,
                                  const std::vector<double>& table, std::size_t K) {
    const std::size_t P = samples.size();
    Projection out{std::vector<double>(K, 0.0), 0.0};
    long double norm2 = 0.0L, coef2 = 0.0L;
    for (std::size_t j = 0; j < P; ++j) norm2 += static_cast<long double>(weights[j]) * samples[j] * samples[j];
    for (std::size_t k = 0; k < K; ++k) {
        long double s = 0.0L;
        for (std::size_t j = 0; j < P; ++j) s += static_cast<long double>(weights[j]) * samples[j] * table[k * P + j];
        out.coefficients[k] = static_cast<double>(s);
        coef2 += s * s;
    }
    out.parseval_residual = static_cast<double>(norm2 - coef2);
    return out;
}

}  // namespace detail

/// Coefficients (v, phi_k) for k = 1..K. Sine polynomials project exactly; callbacks use
/// composite Simpson quadrature, which needs M >= 4K.
inline Projection project(const SpatialFunction& v, const IntervalDomain& domain, std::size_t K) {
    domain.validate();
    if (K < 1) fail(Errc::invalid_input, "projection needs K >= 1");
    if (domain.M < 4 * K) {
        fail(Errc::resolution_error, "projection with K = " + std::to_string(K) + " needs M >= " +
                                         std::to_string(4 * K) + ", got " + std::to_string(domain.M));
    }
    if (const auto& s = v.sine()) {
        Projection out{std::vector<double>(K, 0.0), 0.0};
        for (const auto& [k, a] : s->terms) {
            if (k == 0) fail(Errc::invalid_input, "sine modes start at k = 1");
            if (k <= K) {
                out.coefficients[k - 1] += a;
            } else {
                out.parseval_residual += a * a;
            }
        }
        return out;
    }
    std::vector<double> samples(domain.M + 1);
    for (std::size_t j = 0; j <= domain.M; ++j) {
        samples[j] = v(domain.L * static_cast<double>(j) / static_cast<double>(domain.M), domain.L);
    }
    return detail::project_samples(samples, detail::simpson_weights(domain), detail::basis_table(domain, K), K);
}

enum class FieldTag { solution, s1, s2, s3 };

constexpr const char* to_string(FieldTag t) noexcept {
    switch (t) {
        case FieldTag::solution: return "u";
        case FieldTag::s1: return "S1";
        case FieldTag::s2: return "S2";
        case FieldTag::s3: return "S3";
    }
    return "unknown";
}

/// Truncated expansion sum_{k<=K} c_k(t) phi_k(x).
struct SpectralField {
    CoeffStack coefficients;
    IntervalDomain domain;
    FieldTag tag;

    std::size_t modes() const noexcept { return coefficients.modes(); }
    const TimeGrid& grid() const noexcept { return coefficients.grid(); }
};

/// Value of the field at (x, t); t between nodes is interpolated linearly.
inline double evaluate(const SpectralField& field, double x, double t) {
    const double L = field.domain.L;
    const auto& g = field.grid();
    if (!(x >= 0.0 && x <= L) || !(t >= 0.0 && t <= g.T())) {
        fail(Errc::range_error, "point (" + std::to_string(x) + ", " + std::to_string(t) + ") lies outside the domain");
    }
    if (x == 0.0 || x == L) return 0.0;
    const double pos = t / g.h();
    std::size_t i = static_cast<std::size_t>(std::floor(pos));
    if (i >= g.N()) i = g.N() - 1;
    double theta = pos - static_cast<double>(i);
    if (t == g.node(i)) theta = 0.0;
    double s = 0.0;
    for (std::size_t k = 1; k <= field.modes(); ++k) {
        const auto& c = field.coefficients[k - 1];
        const double ck = theta == 0.0 ? c[i] : (1.0 - theta) * c[i] + theta * c[i + 1];
        s += ck * EigenPair{k, L}.phi(x);
    }
    return s;
}

/// Modal data of a problem on a given time grid.
struct ModalData {
    std::vector<double> c0;                 ///< (u0, phi_k)
    std::vector<double> c1;                 ///< (u1, phi_k)
    std::vector<GridFunction> f;            ///< f_k(t_i)
    std::vector<double> f0;                 ///< f_k(0)
    std::optional<std::vector<double>> ft0; ///< f_k'(0), when available
    std::vector<double> lambda;
    double parseval_u0;
    double parseval_u1;
};

inline void validate_data(const ProblemData& data, const IntervalDomain& domain) {
    domain.validate();
    if (!(data.alpha > 1.0 && data.alpha < 2.0)) fail(Errc::invalid_order, "wave problem needs alpha in (1,2)");
    if (!(data.T > 0.0)) fail(Errc::invalid_input, "final time must be positive");
    const double a = data.u0(0.0, domain.L), b = data.u0(domain.L, domain.L);
    if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a) > 1e-10 || std::abs(b) > 1e-10) {
        fail(Errc::invalid_input, "u0 must vanish at both ends of the interval");
    }
}

inline ModalData modal_data(const ProblemData& data, const IntervalDomain& domain, std::size_t K,
                            const TimeGrid& grid) {
    validate_data(data, domain);
    const auto p0 = project(data.u0, domain, K);
    const auto p1 = project(data.u1, domain, K);
    ModalData m{p0.coefficients, p1.coefficients, {}, std::vector<double>(K, 0.0), std::nullopt,
                std::vector<double>(K), p0.parseval_residual, p1.parseval_residual};
    for (std::size_t k = 1; k <= K; ++k) m.lambda[k - 1] = EigenPair{k, domain.L}.lambda();

    std::vector<std::vector<double>> fk(K, std::vector<double>(grid.size(), 0.0));
    if (data.f.is_callback()) {
        const auto weights = detail::simpson_weights(domain);
        const auto table = detail::basis_table(domain, K);
        std::vector<double> samples(domain.M + 1);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid.node(i);
            for (std::size_t j = 0; j <= domain.M; ++j) {
                samples[j] = data.f.callback()(domain.L * static_cast<double>(j) / static_cast<double>(domain.M), t);
            }
            const auto pr = detail::project_samples(samples, weights, table, K);
            for (std::size_t k = 0; k < K; ++k) fk[k][i] = pr.coefficients[k];
        }
        for (std::size_t k = 0; k < K; ++k) m.f0[k] = fk[k][0];
    } else {
        std::vector<double> slopes(K, 0.0);
        bool slopes_known = true;
        for (const auto& term : data.f.modal()) {
            if (term.k == 0) fail(Errc::invalid_input, "sine modes start at k = 1");
            if (term.k > K) continue;
            for (std::size_t i = 0; i < grid.size(); ++i) fk[term.k - 1][i] += term.profile(grid.node(i));
            m.f0[term.k - 1] += term.profile(0.0);
            if (term.slope0) {
                slopes[term.k - 1] += *term.slope0;
            } else {
                slopes_known = false;
            }
        }
        if (slopes_known) m.ft0 = slopes;
    }
    if (data.f0) m.f0 = project(*data.f0, domain, K).coefficients;
    if (data.ft0) m.ft0 = project(*data.ft0, domain, K).coefficients;
    m.f.reserve(K);
    for (std::size_t k = 0; k < K; ++k) m.f.emplace_back(grid, std::move(fk[k]));
    return m;
}

struct GalerkinOptions {
    IntervalDomain domain{};
    SolveMethod method = SolveMethod::closed_form;
    unsigned jobs = 1;
};

struct GalerkinSolution {
    SpectralField u;
    ModalData data;
    std::vector<ModeSolution> modes;
    double max_relative_residual;
};

inline ModeProblem mode_problem(const ModalData& m, std::size_t k, double alpha) {
    const std::size_t i = k - 1;
    ModeProblem p{alpha, m.lambda[i], m.c0[i], m.c1[i], m.f[i], m.f0[i], std::nullopt};
    if (m.ft0) p.g1 = (*m.ft0)[i];
    return p;
}

/// Spectral Galerkin solve with K modes and N time steps. Modes are solved concurrently.
inline GalerkinSolution solve(const ProblemData& data, std::size_t K, std::size_t N, const GalerkinOptions& opt = {}) {
    const TimeGrid grid(data.T, N);
    auto m = modal_data(data, opt.domain, K, grid);
    std::vector<std::optional<ModeSolution>> slots(K);
    parallel_for(K, opt.jobs, [&](std::size_t i) {
        const auto p = mode_problem(m, i + 1, data.alpha);
        try {
            switch (opt.method) {
                case SolveMethod::closed_form: slots[i] = solve_closed_form(p); break;
                case SolveMethod::volterra: slots[i] = solve_volterra(p); break;
                case SolveMethod::volterra_corrected: slots[i] = solve_volterra_corrected(p); break;
            }
        } catch (const Error& e) {
            fail(Errc::mode_failure, "mode k = " + std::to_string(i + 1) + ": " + e.what());
        }
    });
    std::vector<ModeSolution> modes;
    std::vector<GridFunction> coeffs;
    double worst = 0.0;
    for (auto& s : slots) {
        worst = std::max(worst, s->residual / s->residual_scale);
        coeffs.push_back(s->y);
        modes.push_back(std::move(*s));
    }
    return {SpectralField{CoeffStack(std::move(coeffs)), opt.domain, FieldTag::solution}, std::move(m),
            std::move(modes), worst};
}

struct SingularFields {
    SpectralField s1;
    SpectralField s2;
    SpectralField s3;
};

/// Field-level singular parts built mode by mode:
/// S1 coefficient (f_k(0) - lambda_k c_{k,0}) t^a/Γ(a+1), S2 (f_k'(0) - lambda_k c_{k,1}) t^{a+1}/Γ(a+2),
/// S3 -lambda_k (f_k(0) - lambda_k c_{k,0}) t^{2a}/Γ(2a+1).
inline SingularFields singular_fields(const ModalData& m, const IntervalDomain& domain, const TimeGrid& grid,
                                      double alpha) {
    if (!m.ft0) fail(Errc::incomplete_data, "S2 needs f_t(., 0); supply it or use a modal forcing with known slopes");
    const std::size_t K = m.c0.size();
    std::vector<GridFunction> a, b, c;
    for (std::size_t i = 0; i < K; ++i) {
        const double d0 = m.f0[i] - m.lambda[i] * m.c0[i];
        const double d1 = (*m.ft0)[i] - m.lambda[i] * m.c1[i];
        a.push_back(detail::power_samples(grid, d0 * rgamma(alpha + 1.0), alpha));
        b.push_back(detail::power_samples(grid, d1 * rgamma(alpha + 2.0), alpha + 1.0));
        c.push_back(detail::power_samples(grid, -m.lambda[i] * d0 * rgamma(2.0 * alpha + 1.0), 2.0 * alpha));
    }
    return {SpectralField{CoeffStack(std::move(a)), domain, FieldTag::s1},
            SpectralField{CoeffStack(std::move(b)), domain, FieldTag::s2},
            SpectralField{CoeffStack(std::move(c)), domain, FieldTag::s3}};
}

/// S1 alone, which needs only f(., 0) and u0.
inline SpectralField leading_singular_field(const ModalData& m, const IntervalDomain& domain, const TimeGrid& grid,
                                            double alpha) {
    std::vector<GridFunction> a;
    for (std::size_t i = 0; i < m.c0.size(); ++i) {
        const double d0 = m.f0[i] - m.lambda[i] * m.c0[i];
        a.push_back(detail::power_samples(grid, d0 * rgamma(alpha + 1.0), alpha));
    }
    return SpectralField{CoeffStack(std::move(a)), domain, FieldTag::s1};
}

inline SingularFields singular_fields(const ProblemData& data, std::size_t K, std::size_t N,
                                      const IntervalDomain& domain = {}) {
    const TimeGrid grid(data.T, N);
    return singular_fields(modal_data(data, domain, K, grid), domain, grid, data.alpha);
}

/// Spectral H_0^1 norm (sum lambda_k c_k^2)^{1/2}.
inline double h01_norm(const std::vector<double>& coef, const std::vector<double>& lambda) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < coef.size(); ++i) s += static_cast<long double>(lambda[i]) * coef[i] * coef[i];
    return static_cast<double>(std::sqrt(s));
}

/// Spectral H^2 norm (sum lambda_k^2 c_k^2)^{1/2}.
inline double h2_norm(const std::vector<double>& coef, const std::vector<double>& lambda) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < coef.size(); ++i) {
        s += static_cast<long double>(lambda[i]) * lambda[i] * coef[i] * coef[i];
    }
    return static_cast<double>(std::sqrt(s));
}

inline double l2_vector_norm(const std::vector<double>& coef) {
    long double s = 0.0L;
    for (double c : coef) s += static_cast<long double>(c) * c;
    return static_cast<double>(std::sqrt(s));
}

/// Bochner norm H^s(0,T; X) where X weights mode k by lambda_k^p (p = 0: L2, 1/2: H_0^1, 1: H^2).
inline double weighted_bochner_norm(const CoeffStack& stack, const std::vector<double>& lambda, double s, double p) {
    long double sq = 0.0L;
    for (std::size_t i = 0; i < stack.modes(); ++i) {
        const double n = sobolev_norm(stack[i], s);
        sq += std::pow(static_cast<long double>(lambda[i]), 2.0L * p) * n * n;
    }
    return static_cast<double>(std::sqrt(sq));
}

struct SlopeCheck {
    double max_gap;
    std::vector<double> slopes;
};

/// One-sided slope at t = 0 of c_k - s1_k against c_{k,1}, mode by mode.
inline SlopeCheck initial_slope_check(const SpectralField& u, const SpectralField& s1, const std::vector<double>& c1) {
    if (u.modes() != s1.modes() || c1.size() != u.modes()) fail(Errc::invalid_input, "mode counts differ");
    SlopeCheck out{0.0, {}};
    for (std::size_t i = 0; i < u.modes(); ++i) {
        const double s = initial_slope(u.coefficients[i] - s1.coefficients[i]);
        out.slopes.push_back(s);
        out.max_gap = std::max(out.max_gap, std::abs(s - c1[i]));
    }
    return out;
}

struct WeakResidual {
    double max_residual;
    double scale;
};

/// Residual of the weak formulation against separable test functions psi_m(t) phi_j(x), with
/// psi_m the bump 64 (t(T-t)/T^2)^3 (t/T)^m, m = 0..2, and j over all modes:
///   (D^{(a+1)/2}(c_j - c_{j,0} - c_{j,1} t), D_{T-}^{(a-1)/2} psi) + lambda_j (c_j, psi) - (f_j, psi).
inline WeakResidual weak_form_residual(const GalerkinSolution& sol, double alpha) {
    const auto& grid = sol.u.grid();
    WeakResidual out{0.0, 0.0};
    for (int shift = 0; shift <= 2; ++shift) {
        const auto psi = bump_test_function(grid, shift);
        for (std::size_t i = 0; i < sol.u.modes(); ++i) {
            const auto& c = sol.u.coefficients[i];
            std::vector<double> v(grid.size());
            for (std::size_t n = 0; n < v.size(); ++n) v[n] = c[n] - sol.data.c0[i] - sol.data.c1[i] * grid.node(n);
            v[0] = 0.0;
            const double pairing = split_pairing(GridFunction(grid, std::move(v)), psi, alpha);
            const double stiff = sol.data.lambda[i] * inner(c, psi);
            const double load = inner(sol.data.f[i], psi);
            out.max_residual = std::max(out.max_residual, std::abs(pairing + stiff - load));
            out.scale = std::max({out.scale, std::abs(pairing), std::abs(stiff), std::abs(load)});
        }
    }
    if (out.scale == 0.0) out.scale = 1.0;
    return out;
}

}  // namespace fracwave
