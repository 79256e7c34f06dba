#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracwave/error.hpp"

namespace fracwave {

/// Uniform partition of [0, T] into N subintervals (N + 1 nodes).
class TimeGrid {
public:
    TimeGrid(double T, std::size_t N) : T_(T), N_(N) {
        if (!(T > 0.0) || !std::isfinite(T)) {
            fail(Errc::invalid_input, "final time T must be positive and finite");
        }
        if (N < 2) {
            fail(Errc::grid_too_coarse, "time grid needs N >= 2 subintervals, got " + std::to_string(N));
        }
    }

    double T() const noexcept { return T_; }
    std::size_t N() const noexcept { return N_; }
    std::size_t size() const noexcept { return N_ + 1; }
    double h() const noexcept { return T_ / static_cast<double>(N_); }

    /// t_i = i T / N; the endpoints are exactly 0 and T.
    double node(std::size_t i) const noexcept {
        return T_ * static_cast<double>(i) / static_cast<double>(N_);
    }

    std::vector<double> nodes() const {
        std::vector<double> t(size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = node(i);
        return t;
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double T_;
    std::size_t N_;
};

/// Real samples on the nodes of a TimeGrid. Values are always finite.
class GridFunction {
public:
    explicit GridFunction(const TimeGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

    GridFunction(const TimeGrid& grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            fail(Errc::invalid_input, "grid function has " + std::to_string(values_.size()) +
                                          " values, grid has " + std::to_string(grid_.size()) + " nodes");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                fail(Errc::invalid_input, "non-finite value at node " + std::to_string(i));
            }
        }
    }

    static GridFunction sample(const TimeGrid& grid, const std::function<double(double)>& fn) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
        return GridFunction(grid, std::move(v));
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& vector() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double front() const noexcept { return values_.front(); }
    double back() const noexcept { return values_.back(); }

    /// Time reversal t -> T - t.
    GridFunction reversed() const {
        std::vector<double> r(values_.rbegin(), values_.rend());
        return GridFunction(grid_, std::move(r));
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double x : values_) m = std::max(m, std::abs(x));
        return m;
    }

    bool is_zero() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
    }

    GridFunction& operator+=(const GridFunction& o) {
        require_same_grid(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        require_same_grid(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    GridFunction& operator*=(double c) {
        for (double& x : values_) x *= c;
        return *this;
    }

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double c, GridFunction a) { return a *= c; }
    friend GridFunction operator*(GridFunction a, double c) { return a *= c; }

    void require_same_grid(const GridFunction& o) const {
        if (!(grid_ == o.grid_)) fail(Errc::incompatible_grids, "grid functions live on different grids");
    }

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// Composite trapezoidal weight of node i.
inline double trapezoid_weight(const TimeGrid& grid, std::size_t i) noexcept {
    return (i == 0 || i == grid.N()) ? 0.5 * grid.h() : grid.h();
}

/// Trapezoidal L2(0,T) inner product.
inline double inner(const GridFunction& u, const GridFunction& v) {
    u.require_same_grid(v);
    const auto& g = u.grid();
    long double s = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s += static_cast<long double>(trapezoid_weight(g, i)) * u[i] * v[i];
    }
    return static_cast<double>(s);
}

inline double l2_norm_squared(const GridFunction& v) { return inner(v, v); }
inline double l2_norm(const GridFunction& v) { return std::sqrt(inner(v, v)); }

/// Central first difference with second-order one-sided stencils at both ends.
inline GridFunction first_difference(const GridFunction& w) {
    const std::size_t N = w.grid().N();
    const double h = w.grid().h();
    std::vector<double> d(N + 1);
    for (std::size_t i = 1; i < N; ++i) d[i] = (w[i + 1] - w[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h);
    d[N] = (3.0 * w[N] - 4.0 * w[N - 1] + w[N - 2]) / (2.0 * h);
    return GridFunction(w.grid(), std::move(d));
}

/// Central second difference; the end values use the four-point one-sided stencil.
inline GridFunction second_difference(const GridFunction& w) {
    const std::size_t N = w.grid().N();
    if (N < 3) fail(Errc::grid_too_coarse, "second differences need N >= 3");
    const double h2 = w.grid().h() * w.grid().h();
    std::vector<double> d(N + 1);
    for (std::size_t i = 1; i < N; ++i) d[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / h2;
    d[0] = (2.0 * w[0] - 5.0 * w[1] + 4.0 * w[2] - w[3]) / h2;
    d[N] = (2.0 * w[N] - 5.0 * w[N - 1] + 4.0 * w[N - 2] - w[N - 3]) / h2;
    return GridFunction(w.grid(), std::move(d));
}

/// j-th discrete derivative (j <= 3) built from the stencils above.
inline GridFunction discrete_derivative(const GridFunction& w, int j) {
    switch (j) {
        case 0: return w;
        case 1: return first_difference(w);
        case 2: return second_difference(w);
        case 3: return first_difference(second_difference(w));
        default: fail(Errc::unsupported_order, "discrete derivatives are implemented up to order 3");
    }
}

/// Second-order one-sided slope at t = 0.
inline double initial_slope(const GridFunction& w) {
    return (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * w.grid().h());
}

/// Max |v_i| over nodes i in [first, last].
inline double max_abs_on(const GridFunction& v, std::size_t first, std::size_t last) {
    double m = 0.0;
    for (std::size_t i = first; i <= last && i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

}  // namespace fracwave
