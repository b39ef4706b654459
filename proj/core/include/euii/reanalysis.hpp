#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "euii/dataset.hpp"
#include "euii/rng.hpp"

// Post-hoc single-interim reanalysis of completed two-group experiments.
//
// The final statistic of each experiment is z2 = g * sqrt(n_c n_t / (n_c + n_t)).
// An interim look halfway through is simulated from the conditional law
// Z1 | Z2 = z2 ~ N(z2 sqrt(t), 1 - t), t the ratio of effective sizes.
namespace euii::reanalysis {

enum class Rounding { half_up, ceil, floor };
enum class CriticalScale { normal, t };
enum class Method { none, haybittle_peto, obrien_fleming, pocock };

std::string_view to_string(Rounding r);
std::string_view to_string(Method m);
Rounding parse_rounding(std::string_view name);  // "nearest" is half_up

/// n1 n2 / (n1 + n2).
double effective_n(double n1, double n2);

/// Interim group sizes. Throws DomainError if either would not be smaller
/// than the full group.
std::pair<int, int> interim_split(int n1, int n2, Rounding rounding = Rounding::half_up);

double final_z(const data::ExperimentRow& row);

/// One draw of Z1 given Z2 = z2 at information fraction t in (0, 1).
double simulate_interim_z(double z2, double t, Engine& stream);

struct Variant {
    Method method = Method::none;
    bool futility = false;
    double pp_threshold = 0.10;

    std::string label() const;
    bool operator==(const Variant&) const = default;
};

/// Two-sided nominal levels (interim, final) for the variant's method.
std::pair<double, double> nominal_levels(Method method);

enum class Decision { interim_efficacy, interim_futility, final_reject, final_accept };

struct InterimContext {
    double t = 0.5;        // information fraction of the interim
    double df_final = 0;   // only used with CriticalScale::t
    CriticalScale scale = CriticalScale::normal;
};

/// Applies the single-interim rule. Efficacy if |z1| exceeds the interim
/// bound; else futility if the predictive power of rejecting at the final
/// look is below the threshold; else reject iff |z2| exceeds the final bound.
Decision apply_single_interim(double z1, double z2, const Variant& variant, const InterimContext& ctx);

/// Closed-form Pr(|Z1| > b) given z2 at fraction t.
double interim_efficacy_probability(double z2, double t, double bound);

struct Quantiles {
    double median = 0.0;
    double lo = 0.0;  // 2.5%
    double hi = 0.0;  // 97.5%
};

struct MethodSummary {
    Variant variant;
    Quantiles mean_n;
    Quantiles rejection_pct;
    Quantiles interim_efficacy_pct;
    Quantiles interim_futility_pct;
    Quantiles animals_saved;
};

struct Exclusion {
    std::string id;
    std::string reason;
};

struct ReanalysisResult {
    std::size_t experiments = 0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<MethodSummary> methods;  // first row: no interim baseline
    std::vector<Exclusion> excluded;
};

struct Options {
    std::uint64_t reps = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    Rounding rounding = Rounding::half_up;
    CriticalScale scale = CriticalScale::normal;
    double pp_threshold = 0.10;
};

/// Baseline plus Haybittle-Peto, O'Brien-Fleming and Pocock, each without
/// and with predictive-power futility.
std::vector<Variant> default_variants(double pp_threshold = 0.10);

/// Sample quantile with linear interpolation between order statistics
/// (the default of most statistics packages).
double quantile(std::vector<double> values, double p);

/// Throws DataError if no usable experiment remains.
ReanalysisResult reanalyze(const std::vector<data::ExperimentRow>& rows, const std::vector<Variant>& variants,
                           const Options& options);

/// Columns: design,futility,mean_n,mean_n_lo,mean_n_hi,rejection_pct,
/// rejection_pct_lo,rejection_pct_hi,interim_efficacy_pct,interim_futility_pct,
/// animals_saved,animals_saved_lo,animals_saved_hi
void write_summary_csv(std::ostream& out, const ReanalysisResult& result);

}  // namespace euii::reanalysis
