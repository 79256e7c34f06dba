#pragma once

#include <cmath>
#include <functional>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

/// Left Riemann-Liouville integral (1/Γ(b)) int_0^t (t-s)^{b-1} v(s) ds by tanh-sinh, which
/// absorbs the endpoint singularity.
inline double rl_integral_left(const std::function<double(double)>& v, double beta, double t) {
    if (t == 0.0) return 0.0;
    boost::math::quadrature::tanh_sinh<double> q;
    const double val = q.integrate([&](double u) { return std::pow(u, beta - 1.0) * v(t - u); }, 0.0, t);
    return val / std::tgamma(beta);
}

/// Right integral (1/Γ(b)) int_t^T (s-t)^{b-1} v(s) ds.
inline double rl_integral_right(const std::function<double(double)>& v, double beta, double t, double T) {
    if (t == T) return 0.0;
    boost::math::quadrature::tanh_sinh<double> q;
    const double val = q.integrate([&](double u) { return std::pow(u, beta - 1.0) * v(t + u); }, 0.0, T - t);
    return val / std::tgamma(beta);
}

/// Squared Slobodeckij seminorm of a polynomial p on (0,T), written as
/// 2 int_0^T r^{-1-2s} q(r) dr with q(r) = int_0^{T-r} (p(y+r) - p(y))^2 dy supplied in closed form.
inline double slobodeckij_from_profile(const std::function<double(double)>& q, double sigma, double T) {
    boost::math::quadrature::tanh_sinh<double> quad;
    return 2.0 * quad.integrate(
                     [&](double r) {
                         const double v = q(r);
                         return v == 0.0 ? 0.0 : std::pow(r, -1.0 - 2.0 * sigma) * v;
                     },
                     0.0, T);
}

/// Plain smooth integral on [a,b].
inline double integrate(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, a, b);
}

}  // namespace oracle
