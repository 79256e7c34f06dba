#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracwave/error.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/special.hpp"

namespace fracwave {

/// Order of a fractional operator. Validation depends on the operator, so construction
/// only rejects non-finite values.
class FracOrder {
public:
    explicit FracOrder(double beta) : beta_(beta) {
        if (!std::isfinite(beta)) fail(Errc::invalid_order, "fractional order must be finite");
    }
    double value() const noexcept { return beta_; }
    /// m = ceil(beta), the integer order of the outer derivative.
    int ceil() const noexcept { return static_cast<int>(std::ceil(beta_)); }

private:
    double beta_;
};

namespace detail {

/// Product-trapezoid weights for I^beta on a uniform grid with N subintervals.
///
/// I^beta v(t_n) ~ scale * (a0[n] v_0 + sum_{j=1}^{n-1} b[n-j] v_j + v_n).
/// The weights come from integrating the kernel against the piecewise-linear interpolant.
struct ProductTrapezoid {
    long double scale = 0.0L;
    std::vector<long double> a0;  ///< endpoint weight, indexed by n
    std::vector<long double> b;   ///< interior weight, indexed by distance k = n - j

    ProductTrapezoid(double beta, double h, std::size_t N) : a0(N + 1, 0.0L), b(N + 1, 0.0L) {
        const long double bl = beta;
        const long double p = bl + 1.0L;
        scale = std::pow(static_cast<long double>(h), bl) / std::tgamma(bl + 2.0L);
        for (std::size_t n = 1; n <= N; ++n) {
            const long double nn = static_cast<long double>(n);
            // (n-1)^{p} - (n-1-beta) n^beta, rewritten to avoid cancellation for large n
            a0[n] = std::pow(nn, p) * (std::expm1(p * std::log1p(-1.0L / nn)) + p / nn);
        }
        for (std::size_t k = 1; k <= N; ++k) {
            const long double kk = static_cast<long double>(k);
            const long double x = 1.0L / kk;
            // (k+1)^p - 2k^p + (k-1)^p
            b[k] = std::pow(kk, p) * (std::expm1(p * std::log1p(x)) + std::expm1(p * std::log1p(-x)));
        }
    }

    /// Value at node n >= 1 of the convolution applied to v.
    long double apply(const std::vector<double>& v, std::size_t n) const {
        long double s = a0[n] * v[0] + static_cast<long double>(v[n]);
        for (std::size_t j = 1; j < n; ++j) s += b[n - j] * v[j];
        return scale * s;
    }
};

inline void require_integral_order(double beta) {
    if (!(beta > 0.0)) fail(Errc::invalid_order, "integral order must be positive, got " + std::to_string(beta));
}

inline void require_derivative_order(double beta) {
    if (!(beta > 0.0 && beta < 2.0 && beta != 1.0)) {
        fail(Errc::unsupported_order, "derivative order must lie in (0,1) or (1,2), got " + std::to_string(beta));
    }
}

inline std::vector<double> left_integral(const std::vector<double>& v, double beta, double h) {
    const std::size_t N = v.size() - 1;
    const ProductTrapezoid w(beta, h, N);
    std::vector<double> out(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) out[n] = static_cast<double>(w.apply(v, n));
    return out;
}

/// Exponents sigma for which the derivative of order beta needs starting corrections:
/// beta - 1, beta and beta + 1, kept when positive and not within 0.02 of an integer.
inline std::vector<double> singular_exponents(double beta) {
    std::vector<double> out;
    for (double s : {beta - 1.0, beta, beta + 1.0}) {
        if (s > 0.0 && std::abs(s - std::round(s)) > 0.02) out.push_back(s);
    }
    return out;
}

/// I^gamma by product trapezoid plus starting weights on the first nodes, chosen so that the
/// rule stays exact on affine functions and becomes exact on t^sigma for every given sigma.
///
/// On the unit grid the defect of t^sigma at node n is d_n = Γ(σ+1)/Γ(σ+γ+1) n^{σ+γ} - Q_n[j^σ];
/// the weights W_n solve V W_n = d_n with V[k][j] = φ_k(j) over φ = (1, t, t^{σ_1}, ...), and
/// scale with h^gamma.
inline std::vector<double> corrected_left_integral(const std::vector<double>& v, double gamma, double h,
                                                   const std::vector<double>& sigmas) {
    const std::size_t N = v.size() - 1;
    const std::size_t J = 2 + sigmas.size();
    if (sigmas.empty() || N + 1 < J) return left_integral(v, gamma, h);
    const ProductTrapezoid unit(gamma, 1.0, N);
    const ProductTrapezoid grid(gamma, h, N);

    using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    Mat V(J, J);
    for (std::size_t j = 0; j < J; ++j) {
        V(0, j) = 1.0L;
        V(1, j) = static_cast<long double>(j);
        for (std::size_t k = 0; k < sigmas.size(); ++k) {
            V(2 + k, j) = j == 0 ? 0.0L : std::pow(static_cast<long double>(j), static_cast<long double>(sigmas[k]));
        }
    }
    // Defects for every n at once: rows 0 and 1 vanish by construction.
    Mat D = Mat::Zero(J, N + 1);
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        const long double sg = sigmas[k];
        std::vector<double> pw(N + 1);
        for (std::size_t j = 0; j <= N; ++j) pw[j] = static_cast<double>(std::pow(static_cast<long double>(j), sg));
        const long double c = std::exp(std::lgamma(sg + 1.0L) - std::lgamma(sg + gamma + 1.0L));
        for (std::size_t n = 1; n <= N; ++n) {
            D(2 + k, n) = c * std::pow(static_cast<long double>(n), sg + gamma) - unit.apply(pw, n);
        }
    }
    const Mat W = V.partialPivLu().solve(D);
    const long double hg = std::pow(static_cast<long double>(h), static_cast<long double>(gamma));

    std::vector<double> out(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        long double corr = 0.0L;
        for (std::size_t j = 0; j < J; ++j) corr += W(j, n) * v[j];
        out[n] = static_cast<double>(grid.apply(v, n) + hg * corr);
    }
    return out;
}

inline std::vector<double> reversed(std::vector<double> v) {
    std::reverse(v.begin(), v.end());
    return v;
}

/// m-th derivative stencil (m = 1 or 2) on grid samples.
inline GridFunction integer_derivative(const GridFunction& w, int m) {
    return m == 1 ? first_difference(w) : second_difference(w);
}

}  // namespace detail

/// Left-sided Riemann-Liouville integral I_{0+}^beta. Node 0 is exactly 0.
inline GridFunction rl_integral_left(const GridFunction& v, FracOrder beta) {
    detail::require_integral_order(beta.value());
    return GridFunction(v.grid(), detail::left_integral(v.vector(), beta.value(), v.grid().h()));
}

/// I_{0+}^beta with starting corrections that make it exact on t^sigma for each listed
/// exponent, for inputs whose behaviour at t = 0 is known to contain those powers.
inline GridFunction rl_integral_left(const GridFunction& v, FracOrder beta, const std::vector<double>& exponents) {
    detail::require_integral_order(beta.value());
    std::vector<double> kept;
    for (double s : exponents) {
        if (s > 0.0 && std::abs(s - std::round(s)) > 0.02) kept.push_back(s);
    }
    return GridFunction(v.grid(), detail::corrected_left_integral(v.vector(), beta.value(), v.grid().h(), kept));
}

/// Right-sided Riemann-Liouville integral I_{T-}^beta. Node N is exactly 0.
inline GridFunction rl_integral_right(const GridFunction& v, FracOrder beta) {
    detail::require_integral_order(beta.value());
    auto r = detail::left_integral(detail::reversed(v.vector()), beta.value(), v.grid().h());
    return GridFunction(v.grid(), detail::reversed(std::move(r)));
}

/// Derivative samples plus the index of the node whose value is a one-sided extrapolation
/// rather than a genuine approximation of a (possibly unbounded) limit.
struct FlaggedDerivative {
    GridFunction values;
    std::size_t extrapolated_node;
};

/// Left-sided Riemann-Liouville derivative D_{0+}^beta = D^m I_{0+}^{m-beta}.
///
/// The inner integral carries starting corrections that make it exact on t^{beta-1} and
/// t^beta, the two powers whose images under D^beta are the kernel and a constant.
inline FlaggedDerivative rl_derivative_left_flagged(const GridFunction& v, FracOrder beta) {
    detail::require_derivative_order(beta.value());
    if (v.grid().N() < 4) fail(Errc::grid_too_coarse, "fractional derivatives need N >= 4");
    const int m = beta.ceil();
    const double b = beta.value();
    const GridFunction w(v.grid(), detail::corrected_left_integral(v.vector(), m - b, v.grid().h(),
                                                                   detail::singular_exponents(b)));
    return {detail::integer_derivative(w, m), 0};
}

inline GridFunction rl_derivative_left(const GridFunction& v, FracOrder beta) {
    return rl_derivative_left_flagged(v, beta).values;
}

/// Right-sided Riemann-Liouville derivative D_{T-}^beta = (-1)^m D^m I_{T-}^{m-beta}.
/// Node N carries the extrapolated value.
inline FlaggedDerivative rl_derivative_right_flagged(const GridFunction& v, FracOrder beta) {
    // (-1)^m D^m I_{T-} v equals the reflection of D_{0+} applied to the reflected samples; the
    // two signs (-1)^m cancel. Computing it that way keeps the symmetry exact.
    auto d = rl_derivative_left_flagged(v.reversed(), beta).values.reversed();
    return {std::move(d), v.grid().N()};
}

inline GridFunction rl_derivative_right(const GridFunction& v, FracOrder beta) {
    return rl_derivative_right_flagged(v, beta).values;
}

/// First interior node used by identity checks; the singular behaviour at t = 0 pollutes
/// nodes 0 and 1.
inline constexpr std::size_t interior_first = 2;
inline std::size_t interior_last(const TimeGrid& g) { return g.N() - 2; }

/// Max-norm of I^beta I^gamma v - I^{beta+gamma} v over all nodes.
inline double check_semigroup(const GridFunction& v, FracOrder beta, FracOrder gamma) {
    detail::require_integral_order(beta.value());
    detail::require_integral_order(gamma.value());
    // I^gamma v behaves like v(0) t^gamma + v'(0) t^{gamma+1} near 0; the outer rule is told so.
    const auto lhs = rl_integral_left(rl_integral_left(v, gamma), beta, {gamma.value(), gamma.value() + 1.0});
    const auto rhs = rl_integral_left(v, FracOrder(beta.value() + gamma.value()));
    return (lhs - rhs).max_abs();
}

/// |(I_{0+}^beta u, v)_h - (u, I_{T-}^beta v)_h| under the trapezoidal inner product.
inline double check_adjoint(const GridFunction& u, const GridFunction& v, FracOrder beta) {
    u.require_same_grid(v);
    return std::abs(inner(rl_integral_left(u, beta), v) - inner(u, rl_integral_right(v, beta)));
}

/// How the split pairing (D_{0+}^{(a+1)/2} v, D_{T-}^{(a-1)/2} phi) is discretized.
enum class PairingRule {
    /// Move the outer first derivative onto the test side:
    /// -(D_{0+}^{(a-1)/2} v, D (D_{T-}^{(a-1)/2} phi))_h. Boundary terms vanish because
    /// phi is compactly supported and v(0) = 0.
    summation_by_parts,
    /// Trapezoidal product of the two discrete derivatives as written.
    direct,
};

/// Split-order pairing (D_{0+}^{(alpha+1)/2} v, D_{T-}^{(alpha-1)/2} phi).
inline double split_pairing(const GridFunction& v, const GridFunction& phi, double alpha,
                            PairingRule rule = PairingRule::summation_by_parts) {
    v.require_same_grid(phi);
    const double lo = 0.5 * (alpha - 1.0);
    const auto right = rl_derivative_right(phi, FracOrder(lo));
    if (rule == PairingRule::direct) {
        return inner(rl_derivative_left(v, FracOrder(0.5 * (alpha + 1.0))), right);
    }
    return -inner(rl_derivative_left(v, FracOrder(lo)), first_difference(right));
}

/// Both sides of the duality identity <D^alpha v, phi> = split pairing.
struct PairingSides {
    double lhs;
    double rhs;
    double gap() const noexcept { return std::abs(lhs - rhs); }
};

inline PairingSides duality_sides(const GridFunction& v, const GridFunction& phi, FracOrder alpha,
                                  PairingRule rule = PairingRule::summation_by_parts) {
    v.require_same_grid(phi);
    const double a = alpha.value();
    if (!(a > 1.0 && a < 2.0)) fail(Errc::unsupported_order, "duality check needs alpha in (1,2)");
    const double tol = 1e-10 * std::max(1.0, v.max_abs());
    if (std::abs(v[0]) > tol) {
        fail(Errc::precondition_violated, "duality check needs v(0) = 0, got " + std::to_string(v[0]));
    }
    return {inner(rl_derivative_left(v, alpha), phi), split_pairing(v, phi, a, rule)};
}

/// Absolute gap in <D^alpha v, phi> = (D_{0+}^{(alpha+1)/2} v, D_{T-}^{(alpha-1)/2} phi).
inline double check_duality_blm(const GridFunction& v, const GridFunction& phi, FracOrder alpha,
                                PairingRule rule = PairingRule::summation_by_parts) {
    return duality_sides(v, phi, alpha, rule).gap();
}

/// Smooth bump 64 (t(T-t)/T^2)^3 (t/T)^shift, vanishing to third order at both ends.
inline GridFunction bump_test_function(const TimeGrid& grid, int shift = 0) {
    const double T = grid.T();
    return GridFunction::sample(grid, [T, shift](double t) {
        const double s = t / T;
        const double q = s * (1.0 - s);
        return 64.0 * q * q * q * std::pow(s, shift);
    });
}

/// Removes the affine part v0 + v1 t that the derivative identities exclude, given v(0) and
/// v'(0) of the sampled function.
inline GridFunction strip_affine_part(const GridFunction& v, double v0, double v1) {
    const auto& g = v.grid();
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] - v0 - v1 * g.node(i);
    return GridFunction(g, std::move(out));
}

/// Same with v(0) from the samples and v'(0) from the one-sided second-order difference.
inline GridFunction strip_affine_part(const GridFunction& v) { return strip_affine_part(v, v[0], initial_slope(v)); }

/// Max gap between I^1 D^alpha v and D^alpha I^1 v over interior nodes.
inline double check_exchange(const GridFunction& v, FracOrder alpha) {
    const FracOrder one(1.0);
    const auto& g0 = v.grid();
    // The inner I^1 sees the same singular powers as the derivative.
    const GridFunction iv(g0, detail::corrected_left_integral(v.vector(), 1.0, g0.h(),
                                                              detail::singular_exponents(alpha.value())));
    const auto lhs = rl_integral_left(rl_derivative_left(v, alpha), one);
    const auto rhs = rl_derivative_left(iv, alpha);
    const auto& g = v.grid();
    return max_abs_on(lhs - rhs, interior_first, interior_last(g));
}

}  // namespace fracwave
