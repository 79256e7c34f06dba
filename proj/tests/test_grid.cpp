#include <cmath>

#include <gtest/gtest.h>

#include "fracwave/grid.hpp"
#include "fracwave/parallel.hpp"

using namespace fracwave;

TEST(TimeGrid, NodesHitEndpointsExactly) {
    const TimeGrid g(1.7, 7);
    EXPECT_EQ(g.size(), 8u);
    EXPECT_EQ(g.node(0), 0.0);
    EXPECT_EQ(g.node(7), 1.7);
    EXPECT_DOUBLE_EQ(g.h(), 1.7 / 7.0);
}

TEST(TimeGrid, RejectsCoarseOrInvalid) {
    try {
        TimeGrid(1.0, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::grid_too_coarse);
    }
    EXPECT_THROW(TimeGrid(0.0, 8), Error);
    EXPECT_THROW(TimeGrid(NAN, 8), Error);
}

TEST(GridFunction, ValidatesSizeAndFiniteness) {
    const TimeGrid g(1.0, 4);
    EXPECT_THROW(GridFunction(g, {1, 2, 3}), Error);
    EXPECT_THROW(GridFunction(g, {1, 2, NAN, 4, 5}), Error);
    const GridFunction f(g, {1, -2, 3, 0, 0});
    EXPECT_EQ(f.max_abs(), 3.0);
    EXPECT_FALSE(f.is_zero());
    EXPECT_EQ(f.reversed()[0], 0.0);
    EXPECT_EQ(f.reversed()[4], 1.0);
}

TEST(GridFunction, MismatchedGridsAreRejected) {
    const GridFunction a(TimeGrid(1.0, 4)), b(TimeGrid(1.0, 8));
    try {
        (void)(a + b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::incompatible_grids);
    }
}

TEST(Quadrature, TrapezoidInnerProductIsSecondOrder) {
    // int_0^1 sin(t) e^t dt = (e (sin 1 - cos 1) + 1) / 2
    const double exact = 0.5 * (std::exp(1.0) * (std::sin(1.0) - std::cos(1.0)) + 1.0);
    double prev = 0.0;
    for (std::size_t N : {64u, 128u, 256u}) {
        const TimeGrid g(1.0, N);
        const double err = std::abs(inner(GridFunction::sample(g, [](double t) { return std::sin(t); }),
                                          GridFunction::sample(g, [](double t) { return std::exp(t); })) -
                                    exact);
        if (prev > 0.0) {
            EXPECT_NEAR(prev / err, 4.0, 0.05);
        }
        prev = err;
    }
}

TEST(Differences, ExactOnQuadratics) {
    const TimeGrid g(2.0, 10);
    const auto q = GridFunction::sample(g, [](double t) { return 3.0 * t * t - t + 2.0; });
    const auto d1 = first_difference(q);
    const auto d2 = second_difference(q);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(d1[i], 6.0 * g.node(i) - 1.0, 1e-12);
        EXPECT_NEAR(d2[i], 6.0, 1e-10);
    }
    EXPECT_NEAR(initial_slope(q), -1.0, 1e-12);
    const auto d3 = discrete_derivative(q, 3);
    EXPECT_LT(d3.max_abs(), 1e-8);
}

TEST(Differences, CubicThirdDerivative) {
    const TimeGrid g(1.0, 40);
    const auto c = GridFunction::sample(g, [](double t) { return t * t * t; });
    EXPECT_NEAR(max_abs_on(discrete_derivative(c, 3), 2, 38), 6.0, 1e-6);
}

TEST(Parallel, RunsEveryIndexOnceAndRethrowsLowestFailure) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
    try {
        parallel_for(100, 4, [](std::size_t i) {
            if (i == 17 || i == 60) fail(Errc::mode_failure, std::to_string(i));
        });
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("17"), std::string::npos);
    }
}
