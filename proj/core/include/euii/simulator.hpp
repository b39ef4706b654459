#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "euii/adaptive_euii.hpp"
#include "euii/rng.hpp"

// Monte Carlo engine for sequential two-sample t-test experiments.
//
// Each replication draws n_max observations per group (control N(0, 1),
// treatment N(delta, 1)) and analyses them after 8, 12, ..., n_max
// observations per group with a two-sided pooled-variance t-test.
namespace euii::sim {

enum class Method { n_hacking, reinagel, pocock, obrien_fleming, haybittle_peto, fixed };
enum class Futility { none, predictive_power, reinagel_fixed };
enum class StopReason { efficacy, futility, max_reached };

/// How Pocock / O'Brien-Fleming levels place the looks.
enum class FractionPolicy {
    sample_size,      // t_i = n_i / n_max
    equally_spaced,   // t_i = i / k
};

std::string_view to_string(Method method);
std::string_view to_string(Futility futility);
std::string_view to_string(StopReason reason);
Method parse_method(std::string_view name);
Futility parse_futility(std::string_view name);

struct DesignVariant {
    Method method = Method::n_hacking;
    Futility futility = Futility::none;
    double pp_threshold = 0.30;  // predictive-power futility only

    /// e.g. "pocock", "pocock+pp", "reinagel".
    std::string label() const;
    /// Reinagel must use its fixed p > 0.1 futility rule; no other method may.
    void validate() const;
    bool operator==(const DesignVariant&) const = default;
};

struct SimCondition {
    int n_max_per_group = 32;
    double delta = 0.0;
    DesignVariant design;
};

struct TrialRecord {
    bool rejected = false;
    int stop_stage = 1;  // 1-based
    int n_per_group_terminal = 8;
    StopReason reason = StopReason::max_reached;
};

struct StageStatistic {
    double t = 0.0;  // pooled two-sample t statistic
    double p = 1.0;  // two-sided p-value
};

constexpr int kFirstStagePerGroup = 8;
constexpr int kStageIncrementPerGroup = 4;
constexpr double kReinagelEfficacy = 0.05;
constexpr double kReinagelFutility = 0.10;

/// Per-group sample size at each analysis: 8, 12, ..., n_max; {n_max} for
/// the fixed single-analysis control. n_max must be 8 + 4j.
std::vector<int> stage_sizes(int n_max_per_group, Method method);

/// Two-sided p-value of the equal-variance two-sample t-test with
/// df = n_a + n_b - 2. Zero pooled variance gives p = 1 when the means are
/// equal and p = 0 otherwise.
double two_sample_t_p(std::span<const double> group_a, std::span<const double> group_b);
StageStatistic two_sample_t(std::span<const double> group_a, std::span<const double> group_b);

/// Predictive power to reject at the next analysis:
///   Phi(-c / sqrt(1/f - 1) + z / sqrt(1 - f)) + Phi(-c / sqrt(1/f - 1) - z / sqrt(1 - f))
/// with c the 1 - a_next/2 quantile of t on 2 n_next - 2 df and f = n_i / n_next.
double predictive_power(double z_i, int n_i, int n_next, double a_next);

/// Same formula with a caller-supplied critical value c.
double predictive_power_with_critical(double z_i, double f, double critical);

/// Two-sided p-value at stage i below which predictive power reaches the
/// threshold. The interim statistic is treated as t on 2 n_i - 2 df.
double futility_p_threshold(int n_i, int n_next, double a_next, double pp_threshold);

/// A design compiled for one maximum sample size: stage grid, efficacy
/// levels and the predictive-power critical values.
class StoppingRule {
public:
    StoppingRule(int n_max_per_group, const DesignVariant& design,
                 FractionPolicy policy = FractionPolicy::sample_size);

    const std::vector<int>& stages() const { return stages_; }
    const std::vector<double>& efficacy_levels() const { return levels_; }
    const DesignVariant& design() const { return design_; }

    /// Applies the stage rules to precomputed statistics (one per stage).
    TrialRecord apply(std::span<const StageStatistic> stats) const;

private:
    DesignVariant design_;
    std::vector<int> stages_;
    std::vector<double> levels_;
    std::vector<double> next_critical_;  // t quantile at the following stage
};

/// Draws one data set and returns per-stage statistics for the stage grid.
std::vector<StageStatistic> simulate_stage_statistics(int n_max_per_group, double delta,
                                                      std::span<const int> stages, Engine& stream);

TrialRecord simulate_trial(const SimCondition& condition, Engine& stream,
                           FractionPolicy policy = FractionPolicy::sample_size);

struct StudyGrid {
    std::vector<int> n_max_per_group;
    std::vector<double> deltas;
    std::vector<DesignVariant> designs;
    std::vector<double> priors;
    FractionPolicy fraction_policy = FractionPolicy::sample_size;
};

/// 6 maximum sample sizes x 5 effects, nine design variants, priors
/// {0.01, 0.1, 0.5}.
StudyGrid default_grid();
/// The nine variants of the default grid.
std::vector<DesignVariant> default_designs();

struct RunOptions {
    std::uint64_t nsim = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // 0: hardware concurrency
};

/// Terminal per-group sample size statistics of one outcome.
struct OutcomeStats {
    std::uint64_t count = 0;
    double mean_n = 0.0;
    double var_n = 0.0;  // population variance over the replications in the cell
};

struct ConditionSummary {
    int n_max_per_group = 0;
    double delta = 0.0;
    DesignVariant design;
    std::uint64_t nsim = 0;
    std::uint64_t seed = 0;
    double rejection_rate = 0.0;
    double mcse_rejection = 0.0;
    double mean_n = 0.0;  // per group
    double mcse_mean_n = 0.0;
    OutcomeStats significant;
    OutcomeStats nonsignificant;
    std::uint64_t efficacy_stops = 0;
    std::uint64_t futility_stops = 0;
    std::uint64_t max_reached = 0;
};

/// EUII for one (n_max, delta != 0, design, prior). Sample sizes in the
/// EUII are totals over both groups.
struct EuiiRow {
    int n_max_per_group = 0;
    double delta = 0.0;
    DesignVariant design;
    double prior_h1 = 0.0;
    double power = 0.0;  // clamped empirical rejection rate at delta
    double t1e = 0.0;    // clamped empirical rejection rate at delta = 0
    double lr_plus = 1.0;
    double lr_minus = 1.0;
    double dor = 1.0;
    adaptive::AdaptiveEuii euii;
};

struct StudyResult {
    std::vector<ConditionSummary> conditions;
    std::vector<EuiiRow> euii;
    std::vector<double> priors;
    std::uint64_t clamped_rates = 0;  // rates pulled off 0 or 1 before EUII assembly

    const ConditionSummary* find(int n_max_per_group, double delta, const DesignVariant& design) const;
    const EuiiRow* find_euii(int n_max_per_group, double delta, const DesignVariant& design,
                             double prior_h1) const;
};

/// Stable identifier of the (n_max, delta) data cell; every design sees the
/// same data for a given replication.
std::uint64_t condition_id(int n_max_per_group, double delta);

/// Clamps an empirical rate to [1/(2 nsim), 1 - 1/(2 nsim)].
double clamp_rate(double rate, std::uint64_t nsim, bool* clamped = nullptr);

/// Runs every (n_max, delta) data cell nsim times and applies every design
/// to each replication. Replication r of a cell is seeded with
/// derive_seed(seed, condition_id, r), so results do not depend on the
/// worker count. The grid must contain delta = 0 for EUII assembly; an
/// empty outcome cell with posterior weight raises DataError naming the
/// condition.
StudyResult run_study(const StudyGrid& grid, const RunOptions& options);

/// Flat CSV, one row per (condition, prior). Header:
/// n_max_per_group,delta,method,futility,design,prior_h1,nsim,seed,
/// rejection_rate,mcse_rejection,mean_n,mcse_mean_n,
/// n_sig,mean_n_sig,var_n_sig,n_nonsig,mean_n_nonsig,var_n_nonsig,
/// efficacy_stops,futility_stops,max_reached,
/// power,t1e,lr_plus,lr_minus,dor,pr_h1_sig,pr_h1_nonsig,
/// e_n_plus,e_n_minus,cv_n_plus,cv_n_minus,euii_first,euii_second
/// Per-group sample sizes in the condition columns, totals in the EUII
/// columns. EUII columns are empty for delta = 0 rows.
void write_summary_csv(std::ostream& out, const StudyResult& result);
std::string_view summary_csv_header();

}  // namespace euii::sim
