#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "euii/dist.hpp"
#include "euii/errors.hpp"
#include "euii/fixed_design.hpp"
#include "euii/gsd.hpp"
#include "oracles.hpp"

using namespace euii;
using namespace euii::gsd;

namespace {

// delta for which the fixed one-sided 2.5% design with 90% power has n = 50
const double kDelta50 = (dist::std_normal_quantile(0.975) + dist::std_normal_quantile(0.9)) / std::sqrt(50.0);

GsdSpec custom(std::vector<double> t, std::vector<double> a, Sidedness sided = Sidedness::one, double n_max = 1.0)
{
    GsdSpec s;
    s.info_fractions = std::move(t);
    s.nominal_levels = std::move(a);
    s.sidedness = sided;
    s.n_max = n_max;
    return s;
}

}  // namespace

TEST(Family, ParseAndPrint)
{
    EXPECT_EQ(parse_family("pocock"), BoundaryFamily::pocock);
    EXPECT_EQ(parse_family("obf"), BoundaryFamily::obrien_fleming);
    EXPECT_EQ(parse_family("hp"), BoundaryFamily::haybittle_peto);
    EXPECT_EQ(to_string(BoundaryFamily::obrien_fleming), "obrien_fleming");
    EXPECT_THROW(parse_family("lan_demets"), DomainError);
}

TEST(Spec, Validation)
{
    EXPECT_THROW(custom({0.5, 0.4, 1.0}, {0.01, 0.01, 0.01}).validate(), DomainError);
    EXPECT_THROW(custom({0.5, 0.9}, {0.01, 0.01}).validate(), DomainError);
    EXPECT_THROW(custom({0.5, 1.0}, {0.01}).validate(), DomainError);
    EXPECT_THROW(custom({0.5, 1.0}, {0.0, 0.01}).validate(), DomainError);
    EXPECT_THROW(custom({}, {}).validate(), DomainError);
    EXPECT_NO_THROW(custom({0.3, 1.0}, {0.01, 0.02}).validate());
    EXPECT_THROW(crossing_probabilities(custom({0.6, 0.5, 1.0}, {0.01, 0.01, 0.01}), 0.0), DomainError);
}

TEST(Crossing, SingleLook)
{
    const auto r = crossing_probabilities(custom({1.0}, {0.025}), 0.0);
    EXPECT_NEAR(r.overall_reject, 0.025, 1e-14);
    EXPECT_NEAR(r.total_mass(), 1.0, 1e-14);
}

TEST(Crossing, HaybittlePetoOverallLevel)
{
    const auto r = crossing_probabilities(custom(equally_spaced(4), {0.0005, 0.0005, 0.0005, 0.025}), 0.0);
    EXPECT_NEAR(r.overall_reject, 0.0254, 5e-5);
    EXPECT_NEAR(r.overall_reject, 0.02539642, 1e-6);
}

TEST(Crossing, TwoLookReference)
{
    // scipy multivariate_normal.cdf on the complement event
    const auto r = crossing_probabilities(custom({0.5, 1.0}, {0.01, 0.02}), 0.0);
    EXPECT_NEAR(r.overall_reject, 0.025930170223460225, 1e-7);
    EXPECT_NEAR(r.efficacy_stop_prob[0], 0.01, 1e-14);
}

TEST(Crossing, TwoLookMonteCarloOracle)
{
    const std::vector<double> t{0.5, 1.0};
    const auto spec = custom(t, {0.01, 0.02});
    const auto b = spec.critical_values();
    const auto mc = oracle::simulate_crossings(t, b, false, 0.0, 10'000'000, 99);
    const auto r = crossing_probabilities(spec, 0.0);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(r.efficacy_stop_prob[i], mc.stop[i], 3.0 * mc.se(i)) << i;
    }
}

TEST(Crossing, RandomDesignsAgainstMonteCarlo)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> frac(0.2, 0.8);
    std::uniform_real_distribution<double> bound(1.5, 3.0);
    std::uniform_real_distribution<double> drift(0.0, 3.5);
    int failures = 0;
    for (int c = 0; c < 10; ++c) {
        const std::size_t k = c % 2 == 0 ? 2 : 3;
        std::vector<double> t;
        if (k == 2) {
            t = {frac(rng), 1.0};
        } else {
            double a = frac(rng), b2 = frac(rng);
            if (a > b2) std::swap(a, b2);
            if (b2 - a < 0.05) b2 = a + 0.05;
            t = {a, b2, 1.0};
        }
        std::vector<double> b(k);
        for (auto& x : b) x = bound(rng);
        const double d = drift(rng);
        const bool two = c % 3 == 0;
        GsdSpec spec = custom(t, std::vector<double>(k, 0.5), two ? Sidedness::two : Sidedness::one);
        for (std::size_t i = 0; i < k; ++i) {
            const double tail = dist::std_normal_cdf(-b[i]);
            spec.nominal_levels[i] = two ? 2.0 * tail : tail;
        }
        const auto r = crossing_probabilities(spec, d);
        const auto mc = oracle::simulate_crossings(t, spec.critical_values(), two, d, 2'000'000, 1000 + c);
        for (std::size_t i = 0; i < k; ++i) {
            if (std::abs(r.efficacy_stop_prob[i] - mc.stop[i]) > 3.0 * mc.se(i) + 1e-6) ++failures;
        }
    }
    // 25 comparisons at 3 SE: allow one chance exceedance
    EXPECT_LE(failures, 1);
}

TEST(Crossing, MassSumsToOne)
{
    for (double d : {-2.0, 0.0, 1.0, 3.0, 6.0}) {
        for (auto family : {BoundaryFamily::pocock, BoundaryFamily::obrien_fleming, BoundaryFamily::haybittle_peto}) {
            for (auto sided : {Sidedness::one, Sidedness::two}) {
                const auto spec = make_spec(family, 5, 0.05, sided, 1.0);
                const auto r = crossing_probabilities(spec, d);
                EXPECT_NEAR(r.total_mass(), 1.0, 1e-8);
                EXPECT_NEAR(r.overall_reject,
                            std::accumulate(r.efficacy_stop_prob.begin(), r.efficacy_stop_prob.end(), 0.0), 1e-15);
                for (double p : r.efficacy_stop_prob) EXPECT_GE(p, 0.0);
                for (double p : r.futility_stop_prob) EXPECT_EQ(p, 0.0);
            }
        }
    }
}

TEST(Crossing, StrictlyIncreasingInDrift)
{
    const auto spec = make_spec(BoundaryFamily::obrien_fleming, 4, 0.025, Sidedness::one, 1.0);
    double prev = -1.0;
    for (double d = 0.0; d <= 5.0; d += 0.25) {
        const double p = crossing_probabilities(spec, d).overall_reject;
        EXPECT_GT(p, prev);
        prev = p;
    }
}

TEST(Crossing, TwoSidedIsSymmetricInDrift)
{
    const auto spec = make_spec(BoundaryFamily::pocock, 3, 0.05, Sidedness::two, 1.0);
    for (double d : {0.5, 1.7, 3.0}) {
        EXPECT_NEAR(crossing_probabilities(spec, d).overall_reject, crossing_probabilities(spec, -d).overall_reject,
                    1e-10);
    }
}

TEST(NominalLevels, PocockFourLooks)
{
    const auto a = nominal_levels(BoundaryFamily::pocock, 4, 0.025, Sidedness::one);
    ASSERT_EQ(a.size(), 4u);
    for (double x : a) EXPECT_NEAR(x, 0.00911, 5e-5);
    EXPECT_NEAR(crossing_probabilities(custom(equally_spaced(4), a), 0.0).overall_reject, 0.025, 1e-8);
}

TEST(NominalLevels, ObrienFlemingFourLooks)
{
    const auto a = nominal_levels(BoundaryFamily::obrien_fleming, 4, 0.025, Sidedness::one);
    const std::vector<double> ref{0.00003, 0.0021, 0.0097, 0.0215};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_TRUE(std::abs(a[i] - ref[i]) <= 0.1 * ref[i] || std::abs(a[i] - ref[i]) <= 2e-5) << i << ' ' << a[i];
        if (i > 0) {
            EXPECT_GT(a[i], a[i - 1]);
        }
    }
    EXPECT_NEAR(crossing_probabilities(custom(equally_spaced(4), a), 0.0).overall_reject, 0.025, 1e-8);
}

TEST(NominalLevels, SingleLookIsAlpha)
{
    for (auto f : {BoundaryFamily::pocock, BoundaryFamily::obrien_fleming, BoundaryFamily::haybittle_peto}) {
        const auto a = nominal_levels(f, 1, 0.05, Sidedness::two);
        ASSERT_EQ(a.size(), 1u);
        EXPECT_EQ(a[0], 0.05);
    }
}

TEST(NominalLevels, TwoSidedPocockReproducesAlpha)
{
    for (std::size_t k = 2; k <= 7; ++k) {
        const auto spec = make_spec(BoundaryFamily::pocock, k, 0.05, Sidedness::two, 1.0);
        EXPECT_NEAR(crossing_probabilities(spec, 0.0).overall_reject, 0.05, 1e-8) << k;
    }
    // Textbook two-sided Pocock k=2 constant: 2.178
    const auto spec = make_spec(BoundaryFamily::pocock, 2, 0.05, Sidedness::two, 1.0);
    EXPECT_NEAR(spec.critical_values()[0], 2.178, 5e-4);
}

TEST(NominalLevels, UnequalFractions)
{
    const std::vector<double> t{0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0};
    const auto a = nominal_levels(BoundaryFamily::obrien_fleming, 7, 0.05, Sidedness::two, t);
    EXPECT_NEAR(crossing_probabilities(custom(t, a, Sidedness::two), 0.0).overall_reject, 0.05, 1e-8);
    EXPECT_THROW(nominal_levels(BoundaryFamily::pocock, 3, 0.05, Sidedness::two, t), DomainError);
}

TEST(NominalLevels, HaybittlePetoIsFixed)
{
    EXPECT_EQ(nominal_levels(BoundaryFamily::haybittle_peto, 4, 0.025, Sidedness::one),
              (std::vector<double>{0.0005, 0.0005, 0.0005, 0.025}));
    EXPECT_EQ(nominal_levels(BoundaryFamily::haybittle_peto, 3, 0.05, Sidedness::two),
              (std::vector<double>{0.001, 0.001, 0.05}));
    EXPECT_THROW(nominal_levels(BoundaryFamily::custom, 3, 0.05, Sidedness::two), DomainError);
}

TEST(MaxSampleSize, FourLookDesigns)
{
    EXPECT_NEAR(max_sample_size(BoundaryFamily::pocock, 4, 0.025, 0.9, kDelta50, Sidedness::one), 59.2, 0.2);
    EXPECT_NEAR(max_sample_size(BoundaryFamily::obrien_fleming, 4, 0.025, 0.9, kDelta50, Sidedness::one), 51.1, 0.2);
    EXPECT_NEAR(max_sample_size(BoundaryFamily::custom, 1, 0.025, 0.9, kDelta50, Sidedness::one), 50.0, 1e-6);
    EXPECT_NEAR(max_sample_size(BoundaryFamily::haybittle_peto, 4, 0.025, 0.9, kDelta50, Sidedness::one), 50.0, 1e-6);
}

TEST(MaxSampleSize, AchievesPower)
{
    const double n = max_sample_size(BoundaryFamily::pocock, 4, 0.025, 0.9, 0.46, Sidedness::one);
    const auto spec = make_spec(BoundaryFamily::pocock, 4, 0.025, Sidedness::one, n);
    EXPECT_NEAR(crossing_probabilities(spec, drift_for(0.46, n)).overall_reject, 0.9, 1e-6);
    const double n2 = max_sample_size(BoundaryFamily::obrien_fleming, 3, 0.05, 0.8, 0.5, Sidedness::two, Arms::two);
    const auto spec2 = make_spec(BoundaryFamily::obrien_fleming, 3, 0.05, Sidedness::two, n2);
    EXPECT_NEAR(crossing_probabilities(spec2, drift_for(0.5, n2, Arms::two)).overall_reject, 0.8, 1e-6);
}

TEST(MaxSampleSize, Errors)
{
    EXPECT_THROW(max_sample_size(BoundaryFamily::pocock, 4, 0.025, 0.01, 0.46, Sidedness::one), DomainError);
    EXPECT_THROW(max_sample_size(BoundaryFamily::pocock, 4, 0.025, 0.9, 0.0, Sidedness::one), DomainError);
}

TEST(ExpectedSampleSizes, SingleLookCellsAllEqualNmax)
{
    const auto spec = make_spec(BoundaryFamily::custom, 1, 0.025, Sidedness::one, 50.0);
    const auto c = expected_sample_sizes(spec, 0.0, kDelta50);
    for (const auto* cell : {&c.h0_sig, &c.h0_nonsig, &c.h1_sig, &c.h1_nonsig}) {
        EXPECT_DOUBLE_EQ(cell->mean_n, 50.0);
        EXPECT_DOUBLE_EQ(cell->var_n, 0.0);
        EXPECT_FALSE(cell->empty);
    }
    EXPECT_NEAR(c.h0_sig.mass, 0.025, 1e-14);
    EXPECT_NEAR(c.h1_sig.mass, 0.9, 1e-9);
}

TEST(ExpectedSampleSizes, NonsignificantCellsAtNmaxAndMassesSumToOne)
{
    const double n = 59.2;
    const auto spec = make_spec(BoundaryFamily::pocock, 4, 0.025, Sidedness::one, n);
    const auto c = expected_sample_sizes(spec, 0.0, 0.46);
    EXPECT_DOUBLE_EQ(c.h0_nonsig.mean_n, n);
    EXPECT_DOUBLE_EQ(c.h1_nonsig.mean_n, n);
    EXPECT_NEAR(c.h0_sig.mass + c.h0_nonsig.mass, 1.0, 1e-8);
    EXPECT_NEAR(c.h1_sig.mass + c.h1_nonsig.mass, 1.0, 1e-8);
    EXPECT_LT(c.h1_sig.mean_n, n);
    EXPECT_GT(c.h1_sig.var_n, 0.0);
}

TEST(ExpectedSampleSizes, PocockNullSignificantSmallerBelowDesignEffect)
{
    const double n = max_sample_size(BoundaryFamily::pocock, 4, 0.025, 0.9, kDelta50, Sidedness::one);
    const auto spec = make_spec(BoundaryFamily::pocock, 4, 0.025, Sidedness::one, n);
    for (double d : {0.1, 0.2, 0.3, 0.4}) {
        const auto c = expected_sample_sizes(spec, 0.0, d);
        EXPECT_LT(c.h0_sig.mean_n, c.h1_sig.mean_n) << d;
    }
}

TEST(ExpectedSampleSizes, HaybittlePetoNullDominatedByFinalLook)
{
    const double n = 50.0;
    const auto spec = make_spec(BoundaryFamily::haybittle_peto, 4, 0.025, Sidedness::one, n);
    const auto c = expected_sample_sizes(spec, 0.0, kDelta50);
    EXPECT_GT(c.h0_sig.mean_n, 0.9 * n);
    // brute-force cross-check of E(N | significant) under H0
    const auto t = spec.info_fractions;
    const auto b = spec.critical_values();
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    double sum = 0.0;
    long hits = 0;
    for (int r = 0; r < 1'000'000; ++r) {
        double w = 0.0, prev = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            w += std::sqrt(t[i] - prev) * normal(rng);
            prev = t[i];
            if (w / std::sqrt(t[i]) > b[i]) {
                sum += t[i] * n;
                ++hits;
                break;
            }
        }
    }
    EXPECT_NEAR(c.h0_sig.mean_n, sum / hits, 0.5);
}

TEST(DriftFor, Arms)
{
    EXPECT_DOUBLE_EQ(drift_for(0.5, 16.0), 2.0);
    EXPECT_DOUBLE_EQ(drift_for(0.5, 64.0, Arms::two), 2.0);
}

TEST(GridOptions, CoarserGridStillClose)
{
    const auto spec = make_spec(BoundaryFamily::obrien_fleming, 4, 0.025, Sidedness::one, 1.0);
    const auto fine = crossing_probabilities(spec, 2.5);
    const auto coarse = crossing_probabilities(spec, 2.5, GridOptions{401, 6.0});
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(fine.efficacy_stop_prob[i], coarse.efficacy_stop_prob[i], 1e-6);
    }
}
