#include <cmath>

#include <gtest/gtest.h>

#include "euii/dist.hpp"
#include "euii/errors.hpp"
#include "euii/evidence.hpp"
#include "euii/fixed_design.hpp"

using namespace euii;
using namespace euii::fixed_design;

namespace {

DesignPoint point(double delta, double n, Arms arms = Arms::one, double alpha = 0.05,
                  Sidedness sided = Sidedness::two, TestFamily test = TestFamily::z)
{
    DesignPoint p;
    p.delta = delta;
    p.n_total = n;
    p.arms = arms;
    p.alpha = alpha;
    p.sidedness = sided;
    p.test = test;
    return p;
}

}  // namespace

TEST(RequiredN, StandardDesigns)
{
    EXPECT_NEAR(required_n(0.5, 0.05, 0.2, Arms::one, Sidedness::two), 31.395518937396353, 1e-10);
    EXPECT_NEAR(required_n(0.5, 0.025, 0.2, Arms::one, Sidedness::two), 38.0201, 1e-4);
    EXPECT_NEAR(required_n(0.5, 0.05, 0.1, Arms::one, Sidedness::two), 42.0297, 1e-4);
    EXPECT_NEAR(required_n(0.5, 0.025, 0.1, Arms::one, Sidedness::two), 49.6448, 1e-4);
}

TEST(RequiredN, TwoArmsIsFourTimesOneArm)
{
    const double n1 = required_n(0.5, 0.05, 0.2, Arms::one, Sidedness::two);
    const double n2 = required_n(0.5, 0.05, 0.2, Arms::two, Sidedness::two);
    EXPECT_DOUBLE_EQ(n2, 4.0 * n1);
    EXPECT_NEAR(n2, 125.6, 0.05);
}

TEST(RequiredN, ZeroEffectIsDomainError)
{
    EXPECT_THROW(required_n(0.0, 0.05, 0.2, Arms::one, Sidedness::two), DomainError);
    EXPECT_THROW(required_n(0.5, 0.0, 0.2, Arms::one, Sidedness::two), DomainError);
    EXPECT_THROW(required_n(0.5, 0.05, 1.0, Arms::one, Sidedness::two), DomainError);
}

TEST(RequiredN, RoundTripsThroughPowerZ)
{
    for (double delta = 0.2; delta <= 1.0 + 1e-9; delta += 0.1) {
        for (double beta : {0.1, 0.2}) {
            for (double alpha : {0.025, 0.05}) {
                for (Arms arms : {Arms::one, Arms::two}) {
                    const double n = required_n(delta, alpha, beta, arms, Sidedness::two);
                    EXPECT_NEAR(power_z(point(delta, n, arms, alpha)), 1.0 - beta, 1e-10);
                }
            }
        }
    }
}

TEST(RequiredNT, ReachesTargetPowerAndExceedsZ)
{
    for (Arms arms : {Arms::one, Arms::two}) {
        const double n = required_n_t(0.5, 0.05, 0.2, arms, Sidedness::two);
        EXPECT_NEAR(power_t(point(0.5, n, arms, 0.05, Sidedness::two, TestFamily::t)), 0.8, 1e-9);
        EXPECT_GT(n, required_n(0.5, 0.05, 0.2, arms, Sidedness::two));
    }
}

TEST(PowerZ, Examples)
{
    EXPECT_NEAR(power_z(point(0.5, 31.395518937396353)), 0.8, 1e-12);
    EXPECT_NEAR(power_z(point(0.0, 17.0)), 0.025, 1e-15);
    EXPECT_NEAR(power_z(point(0.0, 17.0, Arms::one, 0.05, Sidedness::one)), 0.05, 1e-15);
    // scipy: norm.cdf(0.46 sqrt(50) - norm.ppf(0.975))
    EXPECT_NEAR(power_z(point(0.46, 50.0, Arms::one, 0.025, Sidedness::one)), 0.9019472881155574, 1e-12);
}

TEST(PowerZ, TwoArmsUsesHalfDrift)
{
    EXPECT_NEAR(power_z(point(0.5, 125.58207574958541, Arms::two)), 0.8, 1e-12);
}

TEST(PowerZUnequal, BalancedMatchesPowerZ)
{
    for (double n : {20.0, 64.0, 125.6, 300.0}) {
        EXPECT_EQ(power_z_unequal(0.5, n / 2, n / 2, 0.05, Sidedness::two), power_z(point(0.5, n, Arms::two)));
    }
}

TEST(PowerZUnequal, Examples)
{
    EXPECT_NEAR(power_z_unequal(0.5, 62.79103787479271, 62.79103787479271, 0.05, Sidedness::two), 0.8, 1e-12);
    EXPECT_NEAR(power_z_unequal(0.5, 42.0, 84.0, 0.05, Sidedness::two), 0.7535763853500698, 1e-12);
    EXPECT_NEAR(power_z_unequal(0.5, 1e-14, 84.0, 0.05, Sidedness::two), 0.025, 1e-6);
}

TEST(PowerZUnequal, SymmetricAndMaximisedAtBalance)
{
    const double total = 126.0;
    const double balanced = power_z_unequal(0.5, 63.0, 63.0, 0.05, Sidedness::two);
    for (double n1 = 5.0; n1 < total; n1 += 7.0) {
        const double a = power_z_unequal(0.5, n1, total - n1, 0.05, Sidedness::two);
        EXPECT_DOUBLE_EQ(a, power_z_unequal(0.5, total - n1, n1, 0.05, Sidedness::two));
        EXPECT_LE(a, balanced + 1e-15);
    }
}

TEST(PowerT, BiasedTestAtSmallEffect)
{
    // One-tail convention with a two-sided 5% test.
    const double p = power_t(point(0.1, 8.0, Arms::one, 0.05, Sidedness::two, TestFamily::t));
    EXPECT_NEAR(p, 0.04335019088122616, 1e-10);
    EXPECT_LT(p, 0.05);
}

TEST(PowerT, OneSidedReference)
{
    EXPECT_NEAR(power_t(point(0.1, 8.0, Arms::one, 0.05, Sidedness::one, TestFamily::t)), 0.0825392360194871,
                1e-10);
    EXPECT_NEAR(power_t(point(0.5, 64.0, Arms::two, 0.05, Sidedness::two, TestFamily::t)), 0.5035956208795742,
                1e-10);
}

TEST(PowerT, NullIsNominalLevel)
{
    EXPECT_NEAR(power_t(point(0.0, 20.0, Arms::one, 0.05, Sidedness::one, TestFamily::t)), 0.05, 1e-12);
}

TEST(PowerT, BelowPowerZAtSmallNAndConverges)
{
    for (double n : {4.0, 8.0, 16.0, 32.0}) {
        auto z = point(0.5, n, Arms::one, 0.05, Sidedness::one);
        auto t = z;
        t.test = TestFamily::t;
        EXPECT_LT(power_t(t), power_z(z)) << n;
    }
    auto z = point(0.5, 8192.0, Arms::one, 0.05, Sidedness::one);
    auto t = z;
    t.test = TestFamily::t;
    EXPECT_NEAR(power_t(t), power_z(z), 1e-4);
    // and a case where the power is not numerically 1
    auto z2 = point(0.05, 8192.0, Arms::one, 0.05, Sidedness::one);
    auto t2 = z2;
    t2.test = TestFamily::t;
    EXPECT_NEAR(power_t(t2), power_z(z2), 1e-4);
}

TEST(PowerT, InsufficientDegreesOfFreedom)
{
    EXPECT_THROW(power_t(point(0.5, 1.0, Arms::one, 0.05, Sidedness::two, TestFamily::t)), DomainError);
    EXPECT_THROW(power_t(point(0.5, 2.0, Arms::two, 0.05, Sidedness::two, TestFamily::t)), DomainError);
}

TEST(RejectionProbabilityT, CountsBothTails)
{
    auto p = point(0.0, 20.0, Arms::one, 0.05, Sidedness::two, TestFamily::t);
    EXPECT_NEAR(rejection_probability_t(p), 0.05, 1e-12);
    p.delta = 0.3;
    EXPECT_GT(rejection_probability_t(p), power_t(p));
}

TEST(Asymptote, Examples)
{
    EXPECT_NEAR(euii_asymptote(0.5, Arms::one), 1.1331484530668263, 1e-15);
    EXPECT_EQ(euii_asymptote(0.0, Arms::one), 1.0);
    EXPECT_EQ(euii_asymptote(0.0, Arms::two), 1.0);
    EXPECT_DOUBLE_EQ(euii_asymptote(1.0, Arms::two), euii_asymptote(0.5, Arms::one));
}

TEST(Evaluate, StandardDesignsEuii)
{
    struct Row {
        double power, alpha, dor, euii;
    };
    for (Row r : {Row{0.8, 0.05, 76, 1.14791}, Row{0.8, 0.025, 156, 1.14205}, Row{0.9, 0.05, 171, 1.13013},
                  Row{0.9, 0.025, 351, 1.12531}}) {
        const double n = required_n(0.5, r.alpha, 1.0 - r.power, Arms::one, Sidedness::two);
        const auto e = evaluate(point(0.5, n, Arms::one, r.alpha));
        EXPECT_NEAR(e.power, r.power, 1e-12);
        EXPECT_NEAR(e.dor / r.dor, 1.0, 1e-9);
        EXPECT_NEAR(e.euii, r.euii, 5e-6);
    }
}

TEST(Evaluate, UnequalAllocationBelowBalanced)
{
    auto p = point(0.5, 126.0, Arms::two);
    const double balanced = evaluate(p).euii;
    p.allocation = Allocation{42.0, 84.0};
    const double unequal = evaluate(p).euii;
    EXPECT_NEAR(balanced, 1.0350353845721092, 1e-12);
    EXPECT_NEAR(unequal, 1.0327651531869249, 1e-12);
    EXPECT_LT(unequal, balanced);
}

TEST(Evaluate, LargeNStaysFiniteAndApproachesAsymptote)
{
    const auto z = evaluate(point(0.5, 8192.0, Arms::one, 0.05, Sidedness::one));
    EXPECT_TRUE(std::isfinite(z.log_dor));
    EXPECT_NEAR(z.euii, 1.1241318321987652, 1e-9);
    EXPECT_LT(z.euii, euii_asymptote(0.5, Arms::one));
    auto tp = point(0.5, 8192.0, Arms::one, 0.05, Sidedness::one, TestFamily::t);
    const auto t = evaluate(tp);
    EXPECT_TRUE(std::isfinite(t.log_dor));
    EXPECT_LT(std::abs(t.euii / euii_asymptote(0.5, Arms::one) - 1.0), 0.01);
    EXPECT_LT(t.euii, z.euii);
}

TEST(Evaluate, EuiiRisesTowardsAsymptoteAtLargeN)
{
    double prev = 1.0;
    for (double n = 1024.0; n <= 16384.0; n *= 2.0) {
        const double e = evaluate(point(0.5, n, Arms::one, 0.05, Sidedness::one)).euii;
        EXPECT_GT(e, prev) << n;
        EXPECT_LT(e, euii_asymptote(0.5, Arms::one));
        prev = e;
    }
}

TEST(DesignPoint, ValidationErrors)
{
    auto p = point(0.5, 10.0);
    p.n_total = 0.0;
    EXPECT_THROW(p.validate(), DomainError);
    p = point(0.5, 10.0);
    p.alpha = 1.0;
    EXPECT_THROW(p.validate(), DomainError);
    p = point(std::nan(""), 10.0);
    EXPECT_THROW(p.validate(), DomainError);
    p = point(0.5, 10.0, Arms::two);
    p.allocation = Allocation{3.0, 6.0};
    EXPECT_THROW(p.validate(), DomainError);
    p = point(0.5, 9.0, Arms::one);
    p.allocation = Allocation{3.0, 6.0};
    EXPECT_THROW(p.validate(), DomainError);
}
