#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracwave/frac_calculus.hpp"
#include "support/quadrature.hpp"

using namespace fracwave;

namespace {

GridFunction sample(std::size_t N, const std::function<double(double)>& f, double T = 1.0) {
    return GridFunction::sample(TimeGrid(T, N), f);
}

double interior_max(const GridFunction& v) { return max_abs_on(v, interior_first, interior_last(v.grid())); }

}  // namespace

TEST(RlIntegral, ZeroMapsToZeroExactly) {
    const GridFunction z(TimeGrid(1.0, 64));
    EXPECT_TRUE(rl_integral_left(z, FracOrder(0.7)).is_zero());
    EXPECT_TRUE(rl_integral_right(z, FracOrder(0.7)).is_zero());
    EXPECT_TRUE(rl_derivative_left(z, FracOrder(1.5)).is_zero());
    EXPECT_TRUE(rl_derivative_right(z, FracOrder(0.3)).is_zero());
}

TEST(RlIntegral, ConstantHalfOrder) {
    const auto one = sample(256, [](double) { return 1.0; });
    const double expected = 2.0 / std::sqrt(std::numbers::pi);
    EXPECT_NEAR(rl_integral_left(one, FracOrder(0.5)).back(), expected, 1e-12);
    EXPECT_NEAR(rl_integral_right(one, FracOrder(0.5)).front(), expected, 1e-12);
    EXPECT_EQ(rl_integral_left(one, FracOrder(0.5)).front(), 0.0);
    EXPECT_EQ(rl_integral_right(one, FracOrder(0.5)).back(), 0.0);
}

TEST(RlIntegral, OrderOneIsTrapezoid) {
    const auto t = sample(10, [](double x) { return x; });
    EXPECT_NEAR(rl_integral_left(t, FracOrder(1.0)).back(), 0.5, 1e-15);
}

TEST(RlIntegral, MatchesQuadratureOracle) {
    // Smooth non-polynomial input; the oracle integrates the weakly singular kernel directly.
    const auto f = [](double t) { return std::exp(-t) * std::cos(3.0 * t); };
    for (double beta : {0.3, 0.5, 1.25}) {
        const auto v = sample(1024, f);
        const auto left = rl_integral_left(v, FracOrder(beta));
        const auto right = rl_integral_right(v, FracOrder(beta));
        const auto& g = v.grid();
        for (std::size_t i : {1u, 17u, 512u, 1000u, 1024u}) {
            EXPECT_NEAR(left[i], oracle::rl_integral_left(f, beta, g.node(i)), 2e-6) << beta << " " << i;
            EXPECT_NEAR(right[i], oracle::rl_integral_right(f, beta, g.node(i), 1.0), 2e-6) << beta << " " << i;
        }
    }
}

TEST(RlIntegral, SecondOrderOnSmoothInput) {
    const auto f = [](double t) { return std::sin(2.0 * t) + t * t; };
    const double ref = oracle::rl_integral_left(f, 0.6, 1.0);
    const double e1 = std::abs(rl_integral_left(sample(128, f), FracOrder(0.6)).back() - ref);
    const double e2 = std::abs(rl_integral_left(sample(256, f), FracOrder(0.6)).back() - ref);
    EXPECT_GT(e1 / e2, 3.5);
}

TEST(RlIntegral, RejectsNonPositiveOrder) {
    const auto v = sample(8, [](double) { return 1.0; });
    try {
        rl_integral_left(v, FracOrder(0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_order);
    }
    EXPECT_THROW(FracOrder(NAN), Error);
}

TEST(RlDerivative, PowerRuleExactAtInteriorNodes) {
    for (double a : {1.1, 1.5, 1.9}) {
        const auto v = sample(2048, [a](double t) { return std::pow(t, a); });
        const auto d = rl_derivative_left(v, FracOrder(a));
        const double G = std::tgamma(a + 1.0);
        EXPECT_LE(max_abs_on(d - GridFunction::sample(v.grid(), [G](double) { return G; }), 2, 2046), 1e-8 * G);
    }
}

TEST(RlDerivative, KernelPowersAnnihilated) {
    for (double a : {1.1, 1.5, 1.9}) {
        const auto v = sample(2048, [a](double t) { return std::pow(t, a - 1.0); });
        EXPECT_LE(interior_max(rl_derivative_left(v, FracOrder(a))), 1e-8 * std::tgamma(a));
    }
}

TEST(RlDerivative, AffineInKernel) {
    const auto v = sample(512, [](double t) { return 2.0 - 3.0 * t; });
    // D^a of an affine function is c0 t^{-a}/Γ(1-a) + c1 t^{1-a}/Γ(2-a), not zero. The inner
    // integral is exact; the second difference of t^{2-a} is accurate to O((h/t)^2).
    const double a = 1.5;
    const auto d = rl_derivative_left(v, FracOrder(a));
    for (std::size_t i : {64u, 100u, 510u}) {
        const double t = v.grid().node(i);
        const double exact = 2.0 * std::pow(t, -a) / std::tgamma(1.0 - a) - 3.0 * std::pow(t, 1.0 - a) / std::tgamma(2.0 - a);
        EXPECT_NEAR(d[i], exact, 1e-3 * std::abs(exact)) << i;
    }
}

TEST(RlDerivative, RightSidedPowerAgainstOracle) {
    // v(t) = (1-t)^{1.25}: D_{T-}^{0.25} v = Γ(2.25)/Γ(2) (1-t).
    const double b = 0.25;
    const auto v = sample(2048, [](double t) { return std::pow(1.0 - t, 1.25); });
    const auto d = rl_derivative_right(v, FracOrder(b));
    for (std::size_t i : {2u, 512u, 1024u, 2000u}) {
        const double t = v.grid().node(i);
        EXPECT_NEAR(d[i], std::tgamma(2.25) * (1.0 - t), 1e-6) << i;
    }
}

TEST(RlDerivative, ReversalSymmetryIsBitwise) {
    const auto v = sample(300, [](double t) { return std::exp(t) * std::sin(5.0 * t); });
    for (double b : {0.4, 1.3}) {
        const auto right = rl_derivative_right(v, FracOrder(b));
        // (-1)^m from the definition cancels the (-1)^m of differentiating reversed data.
        const auto mirrored = rl_derivative_left(v.reversed(), FracOrder(b)).reversed();
        for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(right[i], mirrored[i]) << i;
        const auto ir = rl_integral_right(v, FracOrder(b));
        const auto il = rl_integral_left(v.reversed(), FracOrder(b)).reversed();
        for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(ir[i], il[i]);
    }
}

TEST(RlDerivative, ExtrapolatedNodeFlagged) {
    const auto v = sample(16, [](double t) { return t; });
    EXPECT_EQ(rl_derivative_left_flagged(v, FracOrder(0.5)).extrapolated_node, 0u);
    EXPECT_EQ(rl_derivative_right_flagged(v, FracOrder(0.5)).extrapolated_node, 16u);
}

TEST(RlDerivative, Errors) {
    const auto v = sample(16, [](double t) { return t; });
    for (double b : {0.0, 1.0, 2.0, 2.5}) {
        try {
            rl_derivative_left(v, FracOrder(b));
            FAIL() << b;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::unsupported_order);
        }
    }
    try {
        rl_derivative_left(sample(3, [](double t) { return t; }), FracOrder(0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::grid_too_coarse);
    }
}

TEST(Properties, LinearityToRounding) {
    const auto u = sample(400, [](double t) { return std::cos(4.0 * t); });
    const auto v = sample(400, [](double t) { return t * t * t; });
    const double a = 2.5, b = -0.75;
    for (double beta : {0.3, 1.7}) {
        const auto lhs = rl_derivative_left(u * a + v * b, FracOrder(beta));
        const auto rhs = rl_derivative_left(u, FracOrder(beta)) * a + rl_derivative_left(v, FracOrder(beta)) * b;
        EXPECT_LE((lhs - rhs).max_abs(), 1e-9 * rhs.max_abs());
        const auto il = rl_integral_left(u * a + v * b, FracOrder(beta));
        const auto ir = rl_integral_left(u, FracOrder(beta)) * a + rl_integral_left(v, FracOrder(beta)) * b;
        EXPECT_LE((il - ir).max_abs(), 1e-13 * ir.max_abs());
    }
}

TEST(Properties, DerivativeShiftOnPowerFamily) {
    // D^a v = D^{a-1} v' for v(0) = 0, on t^mu with mu in {1, a, a+1}.
    const double a = 1.5;
    for (double mu : {1.0, a, a + 1.0}) {
        const auto v = sample(2048, [mu](double t) { return std::pow(t, mu); });
        const auto dv = sample(2048, [mu](double t) { return mu * std::pow(t, mu - 1.0); });
        const auto lhs = rl_derivative_left(v, FracOrder(a));
        const auto rhs = rl_derivative_left(dv, FracOrder(a - 1.0));
        EXPECT_LE(max_abs_on(lhs - rhs, 8, 2040), 1e-3 * std::max(1.0, lhs.max_abs())) << mu;
    }
}

TEST(Semigroup, ConstantAtHalfOrders) {
    const auto one = sample(1024, [](double) { return 1.0; });
    EXPECT_LE(check_semigroup(one, FracOrder(0.5), FracOrder(0.5)), 1e-4);
    EXPECT_EQ(check_semigroup(GridFunction(one.grid()), FracOrder(0.5), FracOrder(0.5)), 0.0);
}

TEST(Semigroup, ConvergesAtRateOneAndAHalf) {
    const auto f = [](double t) { return std::exp(t); };
    const double e1 = check_semigroup(sample(512, f), FracOrder(0.3), FracOrder(0.45));
    const double e2 = check_semigroup(sample(1024, f), FracOrder(0.3), FracOrder(0.45));
    EXPECT_GE(std::log2(e1 / e2), 1.5);
}

TEST(Adjoint, OracleCases) {
    const auto one = sample(1024, [](double) { return 1.0; });
    EXPECT_LE(check_adjoint(one, one, FracOrder(0.5)), 1e-4);
    const auto u = sample(2048, [](double t) { return t; });
    const auto v = sample(2048, [](double t) { return 1.0 - t; });
    EXPECT_LE(check_adjoint(u, v, FracOrder(0.3)), 1e-4);
    EXPECT_EQ(check_adjoint(GridFunction(u.grid()), v, FracOrder(0.3)), 0.0);
    // Both sides against the oracle: (I^b u, v) = int_0^1 t^{1+b}/Γ(2+b) (1-t) dt.
    const double b = 0.3;
    const double exact = 1.0 / std::tgamma(2.0 + b) * (1.0 / (2.0 + b) - 1.0 / (3.0 + b));
    EXPECT_NEAR(inner(rl_integral_left(u, FracOrder(b)), v), exact, 1e-6);
}

TEST(Adjoint, GridMismatch) {
    try {
        check_adjoint(sample(16, [](double t) { return t; }), sample(32, [](double t) { return t; }), FracOrder(0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::incompatible_grids);
    }
}

TEST(Duality, BumpPairings) {
    const double a = 1.5;
    const TimeGrid g(1.0, 2048);
    const auto phi = bump_test_function(g);
    EXPECT_EQ(check_duality_blm(GridFunction(g), phi, FracOrder(a)), 0.0);
    for (const auto& f : {std::function<double(double)>([](double t) { return t * t; }),
                          std::function<double(double)>([a](double t) { return std::pow(t, a); })}) {
        const auto v = GridFunction::sample(g, f);
        const auto sides = duality_sides(v, phi, FracOrder(a));
        EXPECT_LE(sides.gap(), 1e-3 * std::max(std::abs(sides.lhs), std::abs(sides.rhs)));
    }
    // Left side for t^a is Γ(a+1) int phi.
    const auto v = GridFunction::sample(g, [a](double t) { return std::pow(t, a); });
    const double int_phi = oracle::integrate([](double t) { return 64.0 * std::pow(t * (1.0 - t), 3); }, 0.0, 1.0);
    EXPECT_NEAR(duality_sides(v, phi, FracOrder(a)).lhs, std::tgamma(a + 1.0) * int_phi, 1e-6);
}

TEST(Duality, RejectsNonzeroInitialValue) {
    const TimeGrid g(1.0, 64);
    try {
        check_duality_blm(GridFunction::sample(g, [](double t) { return 1.0 + t; }), bump_test_function(g), FracOrder(1.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::precondition_violated);
    }
}

TEST(Exchange, PowerFamily) {
    const double a = 1.5;
    EXPECT_EQ(check_exchange(GridFunction(TimeGrid(1.0, 64)), FracOrder(a)), 0.0);
    for (double mu : {a, a + 1.0}) {
        const auto v = sample(2048, [mu](double t) { return std::pow(t, mu); });
        EXPECT_LE(check_exchange(v, FracOrder(a)), 1e-3) << mu;
    }
}

TEST(Exchange, StripAffinePart) {
    const auto v = sample(64, [](double t) { return 3.0 + 2.0 * t + t * t; });
    const auto s = strip_affine_part(v);
    EXPECT_EQ(s[0], 0.0);
    EXPECT_NEAR(initial_slope(s), 0.0, 1e-12);
    const auto s2 = strip_affine_part(v, 3.0, 2.0);
    EXPECT_NEAR(s2.back(), 1.0, 1e-15);
}
