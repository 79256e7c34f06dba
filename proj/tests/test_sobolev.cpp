#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fracwave/sobolev.hpp"
#include "support/errors.hpp"
#include "support/quadrature.hpp"

using namespace fracwave;
using testing_support::error_code;

namespace {

constexpr double pi = std::numbers::pi;

GridFunction sample(std::size_t N, const std::function<double(double)>& f, double T = 1.0) {
    return GridFunction::sample(TimeGrid(T, N), f);
}

/// Squared seminorm by nested quadrature of q(r) = int_0^{T-r} (p(y+r) - p(y))^2 dy.
double seminorm_oracle(const std::function<double(double)>& p, double sigma, double T = 1.0) {
    const auto q = [&](double r) {
        return oracle::integrate([&](double y) { const double d = p(y + r) - p(y); return d * d; }, 0.0, T - r);
    };
    return oracle::slobodeckij_from_profile(q, sigma, T);
}

struct Family {
    const char* name;
    std::function<double(double)> f;
};

std::vector<Family> smooth_family(double alpha) {
    return {{"one", [](double) { return 1.0; }},
            {"t", [](double t) { return t; }},
            {"t2", [](double t) { return t * t; }},
            {"sin", [](double t) { return std::sin(pi * t); }},
            {"cos", [](double t) { return std::cos(pi * t); }},
            {"exp", [](double t) { return std::exp(t); }},
            {"t^alpha", [alpha](double t) { return std::pow(t, alpha); }},
            {"1+t3", [](double t) { return 1.0 + t * t * t; }},
            {"sin3", [](double t) { return std::sin(3.0 * pi * t) + 2.0; }},
            {"(1-t)2", [](double t) { return (1.0 - t) * (1.0 - t); }}};
}

}  // namespace

TEST(NormOrder, SplitsIntegerAndFraction) {
    const NormOrder o(2.25);
    EXPECT_EQ(o.integer_part(), 2);
    EXPECT_DOUBLE_EQ(o.sigma(), 0.25);
    EXPECT_EQ(error_code([] { NormOrder(3.5); }), Errc::unsupported_norm);
    EXPECT_EQ(error_code([] { NormOrder(-0.1); }), Errc::unsupported_norm);
}

TEST(HBetaNorm, TrivialValues) {
    EXPECT_EQ(h_beta_norm(GridFunction(TimeGrid(1.0, 64)), NormOrder(1.7)), 0.0);
    const auto one = sample(64, [](double) { return 1.0; });
    EXPECT_NEAR(h_beta_norm(one, NormOrder(0.0)), 1.0, 1e-15);
    // Derivatives and seminorms of a constant vanish, so every order gives the L2 norm.
    for (double b : {0.5, 1.0, 2.3, 3.0}) EXPECT_NEAR(h_beta_norm(one, NormOrder(b)), 1.0, 1e-14) << b;
}

TEST(Slobodeckij, LinearFunctionClosedForm) {
    // |t|_sigma^2 on (0,1) = int int |t-s|^{1-2 sigma} = 2 / ((2 - 2 sigma)(3 - 2 sigma)).
    for (double sigma : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const double exact = 2.0 / ((2.0 - 2.0 * sigma) * (3.0 - 2.0 * sigma));
        const double got = slobodeckij_squared(sample(2048, [](double t) { return t; }), sigma);
        EXPECT_NEAR(got / exact, 1.0, 2e-3) << sigma;
    }
}

TEST(Slobodeckij, HalfOrderOfLinearWithinTwoPercentOfOracle) {
    const auto f = [](double t) { return t; };
    const double oracle_sq = 1.0 / 3.0 + seminorm_oracle(f, 0.5);
    const double got = h_beta_norm(sample(1 << 14, f), NormOrder(0.5));
    EXPECT_NEAR(got / std::sqrt(oracle_sq), 1.0, 0.02);
    EXPECT_NEAR(got / std::sqrt(oracle_sq), 1.0, 1e-5);
}

TEST(Slobodeckij, SmoothFunctionsMatchNestedQuadrature) {
    for (const auto& [name, f] : std::vector<Family>{{"sin", [](double t) { return std::sin(pi * t); }},
                                                    {"exp", [](double t) { return std::exp(-2.0 * t); }}}) {
        for (double sigma : {0.3, 0.7}) {
            const double got = slobodeckij_squared(sample(2048, f), sigma);
            EXPECT_NEAR(got / seminorm_oracle(f, sigma), 1.0, 1e-3) << name << " " << sigma;
        }
    }
}

TEST(Slobodeckij, RejectsIntegerOrders) {
    const auto v = sample(16, [](double t) { return t; });
    EXPECT_EQ(error_code([&] { slobodeckij_squared(v, 0.0); }), Errc::unsupported_norm);
    EXPECT_EQ(error_code([&] { slobodeckij_squared(v, 1.0); }), Errc::unsupported_norm);
}

TEST(HBetaNorm, Homogeneity) {
    const auto v = sample(512, [](double t) { return std::exp(t) * std::sin(2.0 * t); });
    for (double b : {0.0, 0.4, 1.0, 1.6, 2.5, 3.0}) {
        const double n = h_beta_norm(v, NormOrder(b));
        // Powers of two scale every sample exactly.
        for (double c : {-4.0, 0.5, 8.0}) EXPECT_EQ(h_beta_norm(c * v, NormOrder(b)), std::abs(c) * n) << b << " " << c;
        // Otherwise the scaled samples carry one rounding each, which m-th differences amplify by
        // up to ||v|| / (h^m ||v^(m)||).
        const double tol = b < 2.0 ? 1e-14 : 1e-10;
        for (double c : {-3.0, 0.3, 7.1}) {
            EXPECT_NEAR(h_beta_norm(c * v, NormOrder(b)), std::abs(c) * n, tol * std::abs(c) * n) << b << " " << c;
        }
    }
}

TEST(HBetaNorm, OrderOneIsL2PlusDerivative) {
    // ||sin(pi t)||^2 + ||pi cos(pi t)||^2 = 1/2 + pi^2/2 on (0,1).
    const auto v = sample(2048, [](double t) { return std::sin(pi * t); });
    const double expected = std::sqrt(0.5 + 0.5 * pi * pi);
    EXPECT_NEAR(h_beta_norm(v, NormOrder(1.0)), expected, 1e-5 * expected);
}

TEST(HBetaNorm, IncreasesWithOrderWithinIntegerBand) {
    // On (0,1) the kernel |t-s|^{-1-2 sigma} grows with sigma, so the norm is monotone for fixed
    // floor(beta). Across integers it need not be: the seminorm blows up like 1/(1-sigma).
    const auto v = sample(512, [](double t) { return std::sin(2.0 * pi * t); });
    for (int m = 0; m <= 2; ++m) {
        double prev = h_beta_norm(v, NormOrder(m));
        for (double sigma : {0.2, 0.4, 0.6, 0.8, 0.95}) {
            const double n = h_beta_norm(v, NormOrder(m + sigma));
            EXPECT_GT(n, prev) << m + sigma;
            prev = n;
        }
    }
}

TEST(HBetaNorm, PowerFamilyThreshold) {
    // t^a lies in H^b exactly for b < a + 1/2; above it the discrete norm grows like h^{a + 1/2 - b}.
    const double a = 1.5;
    const auto norms = [&](double b) {
        std::vector<double> out;
        for (std::size_t N : {512u, 1024u, 2048u}) {
            out.push_back(h_beta_norm(sample(N, [a](double t) { return std::pow(t, a); }), NormOrder(b)));
        }
        return out;
    };
    for (double b : {0.5, 1.0, 1.5, 1.75}) {
        const auto n = norms(b);
        EXPECT_LE(std::abs(n[2] / n[1] - 1.0), 0.05) << b;
        EXPECT_LE(std::abs(n[2] - n[1]), std::abs(n[1] - n[0])) << b;
    }
    for (double b : {2.75, 3.0}) {
        const auto n = norms(b);
        EXPECT_GE(n[1] / n[0], 1.5) << b;
        EXPECT_GE(n[2] / n[1], 1.5) << b;
    }
    // Just above the threshold the growth is real but slow, 2^{b - a - 1/2} per doubling.
    const auto n = norms(2.25);
    EXPECT_NEAR(n[2] / n[1], std::pow(2.0, 0.25), 0.1 * std::pow(2.0, 0.25));
}

TEST(HBetaNorm, TooCoarseGrid) {
    const auto v = sample(4, [](double t) { return t; });
    EXPECT_EQ(error_code([&] { h_beta_norm(v, NormOrder(0.5)); }), Errc::grid_too_coarse);
}

TEST(LiftedNorm, RangeAndConsistency) {
    const auto v = sample(256, [](double t) { return t * t * t; });
    EXPECT_EQ(error_code([&] { lifted_norm(v, 2.9); }), Errc::unsupported_norm);
    EXPECT_EQ(error_code([&] { lifted_norm(v, 5.0); }), Errc::unsupported_norm);
    // For a cubic the lifted norm adds ||v''||_{H^{s-2}}, which is finite and O(1).
    const double n = sobolev_norm(v, 3.25);
    EXPECT_TRUE(std::isfinite(n));
    EXPECT_GT(n, sobolev_norm(v, 1.0));
}

TEST(BochnerNorm, Structure) {
    const TimeGrid grid(1.0, 128);
    const GridFunction zero(grid);
    EXPECT_EQ(bochner_norm(CoeffStack({zero, zero}), NormOrder(1.2)), 0.0);

    const auto a = GridFunction::sample(grid, [](double t) { return std::sin(pi * t); });
    const double n = h_beta_norm(a, NormOrder(1.2));
    EXPECT_EQ(bochner_norm(CoeffStack({a}), NormOrder(1.2)), n);
    EXPECT_NEAR(bochner_norm(CoeffStack({a, -1.0 * a}), NormOrder(1.2)), n * std::sqrt(2.0), 1e-14 * n);

    std::vector<GridFunction> modes;
    double prev = 0.0;
    for (int k = 1; k <= 5; ++k) {
        modes.push_back(GridFunction::sample(grid, [k](double t) { return std::cos(k * t) / k; }));
        const double b = bochner_norm(CoeffStack(modes), 0.8);
        EXPECT_GE(b, prev);
        prev = b;
    }
}

TEST(BochnerNorm, EmptyOrMismatchedStack) {
    EXPECT_EQ(error_code([] { CoeffStack({}); }), Errc::invalid_input);
    EXPECT_THROW(CoeffStack({GridFunction(TimeGrid(1.0, 16)), GridFunction(TimeGrid(1.0, 32))}), Error);
}

TEST(EquivalenceRatio, ConstantAndSineBands) {
    for (const auto& [name, f] : std::vector<Family>{{"one", [](double) { return 1.0; }},
                                                    {"sin", [](double t) { return std::sin(pi * t); }}}) {
        const auto coarse = equivalence_ratio(sample(512, f), 1.5);
        const auto fine = equivalence_ratio(sample(2048, f), 1.5);
        for (auto [c, r] : {std::pair{coarse.left, fine.left}, {coarse.right, fine.right}, {coarse.mixed, fine.mixed}}) {
            EXPECT_GE(r, 0.1) << name;
            EXPECT_LE(r, 10.0) << name;
            EXPECT_LE(std::abs(r / c - 1.0), 0.2) << name;
        }
    }
}

TEST(EquivalenceRatio, ScalingIsExact) {
    const auto v = sample(256, [](double t) { return std::exp(t) - t; });
    const auto a = equivalence_ratio(v, 1.3);
    const auto b = equivalence_ratio(2.0 * v, 1.3);
    EXPECT_EQ(a.left, b.left);
    EXPECT_EQ(a.right, b.right);
    EXPECT_EQ(a.mixed, b.mixed);
}

TEST(EquivalenceRatio, SmoothFamilyBands) {
    for (double alpha : {1.1, 1.5, 1.9}) {
        for (const auto& [name, f] : smooth_family(alpha)) {
            const auto coarse = equivalence_ratio(sample(512, f), alpha);
            const auto fine = equivalence_ratio(sample(2048, f), alpha);
            for (auto [c, r] : {std::pair{coarse.left, fine.left}, {coarse.right, fine.right}}) {
                EXPECT_GT(r, 0.1) << name << " " << alpha;
                EXPECT_LT(r, 10.0) << name << " " << alpha;
                EXPECT_LE(std::abs(r / c - 1.0), 0.2) << name << " " << alpha;
            }
            // The mixed form is only bounded below by cos(pi s) ||D^s v||^2, s = (alpha-1)/2,
            // which degenerates as alpha -> 2; the band applies after removing that factor.
            const double cs = std::cos(pi * 0.5 * (alpha - 1.0));
            EXPECT_GT(fine.mixed / cs, 0.1) << name << " " << alpha;
            EXPECT_LT(fine.mixed / cs, 10.0) << name << " " << alpha;
            EXPECT_LE(std::abs(fine.mixed / coarse.mixed - 1.0), 0.2) << name << " " << alpha;
        }
    }
}

TEST(EquivalenceRatio, MixedFormDegeneratesNearOrderTwo) {
    // A concrete member where the unscaled mixed ratio leaves [0.1, 10] at every resolution.
    const auto f = [](double t) { return std::sin(pi * t); };
    for (std::size_t N : {512u, 2048u}) {
        const auto r = equivalence_ratio(sample(N, f), 1.9);
        EXPECT_GT(r.mixed, 0.0);
        EXPECT_LT(r.mixed, 0.1);
        EXPECT_NEAR(r.mixed, 0.0612, 5e-4);
    }
}

TEST(EquivalenceRatio, Errors) {
    EXPECT_EQ(error_code([] { equivalence_ratio(GridFunction(TimeGrid(1.0, 64)), 1.5); }), Errc::undefined_ratio);
    const auto v = sample(64, [](double t) { return t; });
    EXPECT_EQ(error_code([&] { equivalence_ratio(v, 2.0); }), Errc::unsupported_order);
}
