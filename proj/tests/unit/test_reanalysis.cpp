#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "euii/dist.hpp"
#include "euii/errors.hpp"
#include "euii/reanalysis.hpp"

using namespace euii;
using namespace euii::reanalysis;
using data::ExperimentRow;

namespace {

std::vector<ExperimentRow> synthetic_rows(int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> n(4, 15);
    std::normal_distribution<double> g(0.6, 0.8);
    std::vector<ExperimentRow> rows;
    for (int i = 0; i < count; ++i) {
        rows.push_back({"e" + std::to_string(i), n(rng), n(rng), g(rng)});
    }
    return rows;
}

Options opts(std::uint64_t reps, std::uint64_t seed = 1)
{
    Options o;
    o.reps = reps;
    o.seed = seed;
    return o;
}

}  // namespace

TEST(EffectiveN, Examples)
{
    EXPECT_DOUBLE_EQ(effective_n(6, 12), 4.0);
    EXPECT_DOUBLE_EQ(effective_n(10, 10), 5.0);
}

TEST(InterimSplit, Rounding)
{
    EXPECT_EQ(interim_split(7, 9), std::make_pair(4, 5));
    EXPECT_EQ(interim_split(8, 10), std::make_pair(4, 5));
    EXPECT_EQ(interim_split(7, 9, Rounding::ceil), std::make_pair(4, 5));
    EXPECT_EQ(interim_split(7, 9, Rounding::floor), std::make_pair(3, 4));
    EXPECT_EQ(interim_split(2, 3), std::make_pair(1, 2));
    EXPECT_THROW(interim_split(1, 5), DomainError);
    EXPECT_EQ(parse_rounding("nearest"), Rounding::half_up);
    EXPECT_THROW(parse_rounding("banker"), DomainError);
}

TEST(FinalZ, Formula)
{
    const ExperimentRow r{"a", 6, 12, 0.5};
    EXPECT_DOUBLE_EQ(final_z(r), 0.5 * 2.0);
}

TEST(SimulateInterimZ, ConditionalMoments)
{
    const double z2 = 2.0, t = 0.4;
    Engine e(77);
    const int reps = 1'000'000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < reps; ++i) {
        const double z = simulate_interim_z(z2, t, e);
        s += z;
        s2 += z * z;
    }
    const double mean = s / reps;
    const double var = s2 / reps - mean * mean;
    EXPECT_NEAR(mean, z2 * std::sqrt(t), 4.0 * std::sqrt(0.6 / reps));
    EXPECT_NEAR(var, 0.6, 0.004);
    EXPECT_THROW(simulate_interim_z(z2, 1.0, e), DomainError);
    EXPECT_THROW(simulate_interim_z(z2, 0.0, e), DomainError);
}

TEST(SimulateInterimZ, JointLawOfBrownianMotion)
{
    // (Z1, Z2) from the joint law restricted to a slab around z2 agrees
    // with the conditional draw.
    const double t = 0.5;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    double s = 0.0;
    long hits = 0;
    for (int i = 0; i < 4'000'000; ++i) {
        const double w1 = std::sqrt(t) * normal(rng);
        const double w2 = w1 + std::sqrt(1.0 - t) * normal(rng);
        if (std::abs(w2 - 1.0) < 0.02) {
            s += w1 / std::sqrt(t);
            ++hits;
        }
    }
    EXPECT_NEAR(s / hits, 1.0 * std::sqrt(t), 0.02);
}

TEST(InterimEfficacy, ClosedFormAgreesWithSimulation)
{
    const auto [a1, a2] = nominal_levels(Method::pocock);
    (void)a2;
    const double b = dist::std_normal_quantile(1.0 - a1 / 2.0);
    for (double z2 : {0.0, 1.5, 3.0}) {
        Engine e(100 + static_cast<int>(z2));
        const int reps = 400000;
        int hits = 0;
        for (int i = 0; i < reps; ++i) {
            hits += std::abs(simulate_interim_z(z2, 0.5, e)) > b;
        }
        const double p = interim_efficacy_probability(z2, 0.5, b);
        EXPECT_NEAR(static_cast<double>(hits) / reps, p, 4.0 * std::sqrt(p * (1 - p) / reps) + 1e-6) << z2;
    }
}

TEST(NominalLevels, Methods)
{
    EXPECT_EQ(nominal_levels(Method::none), std::make_pair(0.0, 0.05));
    EXPECT_EQ(nominal_levels(Method::haybittle_peto), std::make_pair(0.01, 0.05));
    const auto p = nominal_levels(Method::pocock);
    EXPECT_NEAR(p.first, 0.0294, 1e-4);
    EXPECT_DOUBLE_EQ(p.first, p.second);
    const auto o = nominal_levels(Method::obrien_fleming);
    EXPECT_NEAR(o.first, 0.0052, 1e-4);
    EXPECT_NEAR(o.second, 0.0480, 1e-4);
}

TEST(ApplySingleInterim, Decisions)
{
    const InterimContext ctx{0.5, 20.0, CriticalScale::normal};
    EXPECT_EQ(apply_single_interim(3.0, 0.0, {Method::haybittle_peto}, ctx), Decision::interim_efficacy);
    EXPECT_EQ(apply_single_interim(3.0, 0.0, {Method::none}, ctx), Decision::final_accept);
    EXPECT_EQ(apply_single_interim(0.1, 2.5, {Method::pocock, true}, ctx), Decision::interim_futility);
    EXPECT_EQ(apply_single_interim(0.1, 2.5, {Method::pocock, false}, ctx), Decision::final_reject);
    EXPECT_EQ(apply_single_interim(1.5, 1.0, {Method::obrien_fleming, true}, ctx), Decision::final_accept);
}

TEST(ApplySingleInterim, TScaleIsMoreConservative)
{
    InterimContext n{0.5, 6.0, CriticalScale::normal};
    InterimContext t = n;
    t.scale = CriticalScale::t;
    int fut_n = 0, fut_t = 0;
    for (double z1 = 0.0; z1 < 3.0; z1 += 0.01) {
        fut_n += apply_single_interim(z1, 0.0, {Method::pocock, true}, n) == Decision::interim_futility;
        fut_t += apply_single_interim(z1, 0.0, {Method::pocock, true}, t) == Decision::interim_futility;
    }
    EXPECT_GT(fut_t, fut_n);
}

TEST(Quantile, TypeSeven)
{
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile({5}, 0.975), 5.0);
    EXPECT_DOUBLE_EQ(quantile({3, 1, 2}, 1.0), 3.0);
    EXPECT_THROW(quantile({}, 0.5), DomainError);
}

TEST(Reanalyze, BaselineHasNoVarianceAndSavesNothing)
{
    const auto rows = synthetic_rows(40, 1);
    const auto r = reanalyze(rows, default_variants(), opts(300));
    ASSERT_EQ(r.methods.size(), 7u);
    const auto& base = r.methods[0];
    EXPECT_EQ(base.variant.method, Method::none);
    EXPECT_EQ(base.animals_saved.median, 0.0);
    EXPECT_EQ(base.animals_saved.lo, base.animals_saved.hi);
    EXPECT_EQ(base.rejection_pct.lo, base.rejection_pct.hi);
    EXPECT_EQ(base.interim_efficacy_pct.median, 0.0);
    double total = 0.0;
    int rej = 0;
    for (const auto& row : rows) {
        total += row.n_control + row.n_treatment;
        rej += std::abs(final_z(row)) > dist::std_normal_quantile(0.975);
    }
    EXPECT_DOUBLE_EQ(base.mean_n.median, total / rows.size());
    EXPECT_DOUBLE_EQ(base.rejection_pct.median, 100.0 * rej / rows.size());
    // baseline does not depend on the seed
    const auto r2 = reanalyze(rows, default_variants(), opts(300, 99));
    EXPECT_EQ(r2.methods[0].rejection_pct.median, base.rejection_pct.median);
}

TEST(Reanalyze, FutilitySavesAtLeastAsMuch)
{
    const auto rows = synthetic_rows(60, 2);
    const auto r = reanalyze(rows, default_variants(), opts(500));
    for (std::size_t i = 1; i + 1 < r.methods.size(); i += 2) {
        const auto& plain = r.methods[i];
        const auto& fut = r.methods[i + 1];
        EXPECT_EQ(plain.variant.method, fut.variant.method);
        EXPECT_TRUE(fut.variant.futility);
        EXPECT_GE(fut.animals_saved.median, plain.animals_saved.median);
        EXPECT_LE(fut.mean_n.median, plain.mean_n.median);
        EXPECT_EQ(plain.interim_futility_pct.median, 0.0);
        EXPECT_GE(plain.animals_saved.lo, 0.0);
    }
}

TEST(Reanalyze, DeterministicAcrossWorkers)
{
    const auto rows = synthetic_rows(30, 3);
    std::string ref;
    for (unsigned w : {1u, 3u, 8u}) {
        auto o = opts(400, 7);
        o.workers = w;
        std::ostringstream os;
        write_summary_csv(os, reanalyze(rows, default_variants(), o));
        if (ref.empty()) ref = os.str();
        EXPECT_EQ(os.str(), ref);
    }
}

TEST(Reanalyze, InterimEfficacyMatchesClosedForm)
{
    const auto rows = synthetic_rows(50, 4);
    const std::uint64_t reps = 2000;
    const auto r = reanalyze(rows, {{Method::haybittle_peto}}, opts(reps));
    const double b = dist::std_normal_quantile(1.0 - 0.01 / 2.0);
    double expected = 0.0;
    for (const auto& row : rows) {
        const auto m = interim_split(row.n_control, row.n_treatment);
        const double t = effective_n(m.first, m.second) / effective_n(row.n_control, row.n_treatment);
        expected += interim_efficacy_probability(final_z(row), t, b);
    }
    expected *= 100.0 / rows.size();
    EXPECT_NEAR(r.methods[0].interim_efficacy_pct.median, expected, 1.0);
}

TEST(Reanalyze, ExclusionsAndErrors)
{
    std::vector<ExperimentRow> rows{{"ok", 6, 6, 1.0}, {"tiny", 1, 6, 1.0}, {"nan", 6, 6, std::nan("")}};
    const auto r = reanalyze(rows, default_variants(), opts(50));
    EXPECT_EQ(r.experiments, 1u);
    EXPECT_EQ(r.excluded.size(), 2u);
    EXPECT_THROW(reanalyze({}, default_variants(), opts(50)), DataError);
    EXPECT_THROW(reanalyze(rows, {}, opts(50)), DomainError);
    EXPECT_THROW(reanalyze(rows, default_variants(), opts(0)), DomainError);
}

TEST(SummaryCsv, Header)
{
    const auto r = reanalyze(synthetic_rows(5, 6), default_variants(), opts(20));
    std::ostringstream os;
    write_summary_csv(os, r);
    const auto text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "design,futility,mean_n,mean_n_lo,mean_n_hi,rejection_pct,rejection_pct_lo,rejection_pct_hi,"
              "interim_efficacy_pct,interim_futility_pct,animals_saved,animals_saved_lo,animals_saved_hi");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 8);
}
