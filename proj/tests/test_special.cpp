#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracwave/special.hpp"

using namespace fracwave;

TEST(Gamma, ReciprocalVanishesAtPoles) {
    EXPECT_EQ(rgamma(0.0), 0.0);
    EXPECT_EQ(rgamma(-3.0), 0.0);
    EXPECT_NEAR(rgamma(0.5), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
    EXPECT_NEAR(fracwave::gamma(2.5), 0.75 * std::sqrt(std::numbers::pi), 1e-14);
}

TEST(PowerRule, IntegralCoefficients) {
    // I^b t^mu = Γ(mu+1)/Γ(mu+1+b) t^{mu+b}
    const auto r = power_rule(1.0, 0.5, PowerRuleMode::integral);
    EXPECT_NEAR(r.coefficient, 1.0 / fracwave::gamma(2.5), 1e-15);
    EXPECT_DOUBLE_EQ(r.exponent, 1.5);
    EXPECT_FALSE(r.kernel);
}

TEST(PowerRule, DerivativeOfPowerAlphaIsConstant) {
    for (double a : {1.1, 1.5, 1.9}) {
        const auto r = power_rule(a, a, PowerRuleMode::derivative);
        EXPECT_NEAR(r.coefficient, fracwave::gamma(a + 1.0), 1e-13);
        EXPECT_NEAR(r.exponent, 0.0, 1e-15);
    }
}

TEST(PowerRule, KernelDetected) {
    // D^a t^{a-1} = 0 and D^a t^{a-2} = 0 in the classical sense.
    for (double a : {1.1, 1.5, 1.9}) {
        EXPECT_TRUE(power_rule(a - 1.0, a, PowerRuleMode::derivative).kernel);
        EXPECT_EQ(power_rule(a - 1.0, a, PowerRuleMode::derivative).coefficient, 0.0);
    }
    EXPECT_FALSE(power_rule(2.0, 1.5, PowerRuleMode::derivative).kernel);
}

TEST(PowerRule, Errors) {
    try {
        power_rule(-1.0, 0.5, PowerRuleMode::integral);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::domain_error);
    }
    try {
        power_rule(1.0, 0.0, PowerRuleMode::integral);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_order);
    }
}
