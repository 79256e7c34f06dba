#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fracwave/error.hpp"
#include "fracwave/frac_calculus.hpp"
#include "fracwave/grid.hpp"

namespace fracwave {

/// Sobolev order beta in [0,3], split as floor(beta) + sigma.
class NormOrder {
public:
    explicit NormOrder(double beta) : beta_(beta) {
        if (!(beta >= 0.0 && beta <= 3.0)) {
            fail(Errc::unsupported_norm, "Sobolev order must lie in [0,3], got " + std::to_string(beta));
        }
    }
    double value() const noexcept { return beta_; }
    int integer_part() const noexcept { return static_cast<int>(std::floor(beta_)); }
    double sigma() const noexcept { return beta_ - std::floor(beta_); }

private:
    double beta_;
};

/// Time coefficients (c_k) of a spatial expansion, one GridFunction per mode.
class CoeffStack {
public:
    explicit CoeffStack(std::vector<GridFunction> coefficients) : coefficients_(std::move(coefficients)) {
        if (coefficients_.empty()) fail(Errc::invalid_input, "coefficient stack needs at least one mode");
        for (const auto& c : coefficients_) coefficients_.front().require_same_grid(c);
    }
    std::size_t modes() const noexcept { return coefficients_.size(); }
    const GridFunction& operator[](std::size_t k) const noexcept { return coefficients_[k]; }
    const std::vector<GridFunction>& coefficients() const noexcept { return coefficients_; }
    const TimeGrid& grid() const noexcept { return coefficients_.front().grid(); }

private:
    std::vector<GridFunction> coefficients_;
};

namespace detail {

/// Near-diagonal part of the Slobodeckij integral on one side of a row, for a locally linear
/// function with unit slope: the exact integral of |r|^{1-2 sigma} that the off-band
/// trapezoid sum does not account for.
inline double band_side(double sigma, double h, double room) {
    const double p = 2.0 - 2.0 * sigma;
    if (room <= 0.0) return 0.0;
    if (room < 2.0 * h * (1.0 - 1e-12)) return std::pow(room, p) / p;
    // int_0^{2h} r^{1-2 sigma} dr minus the half end weight the trapezoid gives r = 2h.
    return std::pow(2.0 * h, p) / p - 0.5 * h * std::pow(2.0 * h, 1.0 - 2.0 * sigma);
}

}  // namespace detail

/// Squared Slobodeckij seminorm |w|_sigma^2 = int int |w(t)-w(s)|^2 / |t-s|^{1+2 sigma} ds dt.
///
/// Tensor trapezoid quadrature off the band |i-j| <= 1; on the band the integrand is replaced
/// by its closed form for the local linear interpolant.
inline double slobodeckij_squared(const GridFunction& w, double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) fail(Errc::unsupported_norm, "Slobodeckij order must lie in (0,1)");
    const auto& g = w.grid();
    const std::size_t N = g.N();
    const double h = g.h();
    const auto& v = w.vector();

    std::vector<long double> kappa(N + 1, 0.0L);
    for (std::size_t k = 2; k <= N; ++k) {
        kappa[k] = 1.0L / std::pow(static_cast<long double>(k) * h, 1.0L + 2.0L * sigma);
    }
    std::vector<double> c(N + 1);
    for (std::size_t i = 0; i <= N; ++i) c[i] = trapezoid_weight(g, i);

    long double off = 0.0L;
    for (std::size_t i = 0; i + 2 <= N; ++i) {
        long double row = 0.0L;
        for (std::size_t j = i + 2; j <= N; ++j) {
            const long double d = static_cast<long double>(v[i]) - v[j];
            row += static_cast<long double>(c[j]) * d * d * kappa[j - i];
        }
        off += static_cast<long double>(c[i]) * row;
    }
    off *= 2.0L;

    const auto slope = first_difference(w);
    long double band = 0.0L;
    for (std::size_t i = 0; i <= N; ++i) {
        const double t = g.node(i);
        const double sides = detail::band_side(sigma, h, t) + detail::band_side(sigma, h, g.T() - t);
        band += static_cast<long double>(c[i]) * slope[i] * slope[i] * sides;
    }
    return static_cast<double>(off + band);
}

/// Discrete H^beta(0,T) norm, beta in [0,3]:
/// (||v||^2 + sum_{j<=floor(beta)} ||v^{(j)}||^2 + |v^{(floor(beta))}|_sigma^2)^{1/2}.
inline double h_beta_norm(const GridFunction& v, NormOrder order) {
    const auto& g = v.grid();
    if (g.N() < 8) fail(Errc::grid_too_coarse, "Sobolev norms need N >= 8");
    double sq = l2_norm_squared(v);
    GridFunction w = v;
    const int m = order.integer_part();
    for (int j = 1; j <= m; ++j) {
        w = discrete_derivative(v, j);
        sq += l2_norm_squared(w);
    }
    if (order.sigma() > 0.0) sq += slobodeckij_squared(w, order.sigma());
    return std::sqrt(sq);
}

/// Norm of order s in (3,5) through the second derivative:
/// (||v||^2 + ||v'||^2 + ||v''||_{H^{s-2}}^2)^{1/2}.
inline double lifted_norm(const GridFunction& v, double s) {
    if (!(s > 3.0 && s < 5.0)) fail(Errc::unsupported_norm, "lifted norms cover orders in (3,5)");
    const double inner_norm = h_beta_norm(second_difference(v), NormOrder(s - 2.0));
    return std::sqrt(l2_norm_squared(v) + l2_norm_squared(first_difference(v)) + inner_norm * inner_norm);
}

/// Norm of any order in [0,5): direct below 3, lifted above.
inline double sobolev_norm(const GridFunction& v, double s) {
    return s <= 3.0 ? h_beta_norm(v, NormOrder(s)) : lifted_norm(v, s);
}

/// Bochner norm (sum_k ||c_k||_{H^beta}^2)^{1/2}.
inline double bochner_norm(const CoeffStack& stack, double s) {
    long double sq = 0.0L;
    for (const auto& c : stack.coefficients()) {
        const double n = sobolev_norm(c, s);
        sq += static_cast<long double>(n) * n;
    }
    return static_cast<double>(std::sqrt(sq));
}

inline double bochner_norm(const CoeffStack& stack, NormOrder order) { return bochner_norm(stack, order.value()); }

/// Ratios of the quantities that the norm-equivalence lemma declares comparable, all against
/// the squared H^{(alpha-1)/2} norm.
struct EquivalenceRatios {
    double left;   ///< ||D_{0+}^a v||^2 / ||v||_{H^a}^2
    double right;  ///< ||D_{T-}^a v||^2 / ||v||_{H^a}^2
    double mixed;  ///< (D_{0+}^a v, D_{T-}^a v) / ||v||_{H^a}^2
};

inline EquivalenceRatios equivalence_ratio(const GridFunction& v, double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) fail(Errc::unsupported_order, "equivalence ratio needs alpha in (1,2)");
    if (v.is_zero()) fail(Errc::undefined_ratio, "equivalence ratio of the zero function");
    const FracOrder a(0.5 * (alpha - 1.0));
    const auto dl = rl_derivative_left(v, a);
    const auto dr = rl_derivative_right(v, a);
    const double hn = h_beta_norm(v, NormOrder(a.value()));
    const double h2 = hn * hn;
    return {l2_norm_squared(dl) / h2, l2_norm_squared(dr) / h2, inner(dl, dr) / h2};
}

}  // namespace fracwave
