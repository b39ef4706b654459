#include "euii/reanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "euii/dist.hpp"
#include "euii/errors.hpp"
#include "euii/format.hpp"
#include "euii/gsd.hpp"
#include "euii/parallel.hpp"
#include "euii/simulator.hpp"

namespace euii::reanalysis {
namespace {

constexpr std::uint64_t kStreamId = 0x7265616e616c7973ULL;
constexpr double kAlpha = 0.05;

struct Prepared {
    double z2;
    double t;
    double df_final;
    std::uint64_t n_full;
    std::uint64_t n_interim;
};

struct RepCounts {
    std::uint64_t used = 0;
    std::uint64_t rejected = 0;
    std::uint64_t efficacy = 0;
    std::uint64_t futility = 0;
};

Quantiles summarize(const std::vector<double>& values)
{
    return {quantile(values, 0.5), quantile(values, 0.025), quantile(values, 0.975)};
}

}  // namespace

std::string_view to_string(Rounding r)
{
    switch (r) {
    case Rounding::half_up: return "nearest";
    case Rounding::ceil: return "ceil";
    case Rounding::floor: return "floor";
    }
    return "nearest";
}

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::none: return "none";
    case Method::haybittle_peto: return "haybittle_peto";
    case Method::obrien_fleming: return "obrien_fleming";
    case Method::pocock: return "pocock";
    }
    return "none";
}

Rounding parse_rounding(std::string_view name)
{
    if (name == "nearest" || name == "half_up") return Rounding::half_up;
    if (name == "ceil") return Rounding::ceil;
    if (name == "floor") return Rounding::floor;
    throw DomainError("unknown rounding: " + std::string(name));
}

double effective_n(double n1, double n2)
{
    if (!(n1 > 0.0 && n2 > 0.0)) {
        throw DomainError("effective_n: group sizes must be positive");
    }
    return n1 * n2 / (n1 + n2);
}

std::pair<int, int> interim_split(int n1, int n2, Rounding rounding)
{
    auto half = [rounding](int n) {
        switch (rounding) {
        case Rounding::half_up:
        case Rounding::ceil: return (n + 1) / 2;  // n/2 is an integer or ends in .5
        case Rounding::floor: return n / 2;
        }
        return (n + 1) / 2;
    };
    const int m1 = half(n1);
    const int m2 = half(n2);
    if (m1 < 1 || m2 < 1 || m1 >= n1 || m2 >= n2) {
        throw DomainError("interim_split: experiment too small for an interim analysis");
    }
    return {m1, m2};
}

double final_z(const data::ExperimentRow& row)
{
    return row.effect * std::sqrt(effective_n(row.n_control, row.n_treatment));
}

double simulate_interim_z(double z2, double t, Engine& stream)
{
    if (!(t > 0.0 && t < 1.0)) {
        throw DomainError("simulate_interim_z: information fraction must lie in (0, 1)");
    }
    std::normal_distribution<double> normal(z2 * std::sqrt(t), std::sqrt(1.0 - t));
    return normal(stream);
}

std::string Variant::label() const
{
    std::string out(to_string(method));
    if (futility) out += "+futility";
    return out;
}

std::pair<double, double> nominal_levels(Method method)
{
    switch (method) {
    case Method::none: return {0.0, kAlpha};
    case Method::haybittle_peto: return {0.01, kAlpha};
    case Method::obrien_fleming: {
        static const auto a = gsd::nominal_levels(gsd::BoundaryFamily::obrien_fleming, 2, kAlpha, Sidedness::two);
        return {a[0], a[1]};
    }
    case Method::pocock: {
        static const auto a = gsd::nominal_levels(gsd::BoundaryFamily::pocock, 2, kAlpha, Sidedness::two);
        return {a[0], a[1]};
    }
    }
    return {0.0, kAlpha};
}

Decision apply_single_interim(double z1, double z2, const Variant& variant, const InterimContext& ctx)
{
    const auto [a1, a2] = nominal_levels(variant.method);
    const double c2 = dist::std_normal_quantile(1.0 - a2 / 2.0);
    if (variant.method != Method::none) {
        const double c1 = dist::std_normal_quantile(1.0 - a1 / 2.0);
        if (std::abs(z1) > c1) {
            return Decision::interim_efficacy;
        }
        if (variant.futility) {
            const double c = ctx.scale == CriticalScale::normal ? c2
                                                                 : dist::t_quantile(1.0 - a2 / 2.0, ctx.df_final);
            if (sim::predictive_power_with_critical(z1, ctx.t, c) < variant.pp_threshold) {
                return Decision::interim_futility;
            }
        }
    }
    return std::abs(z2) > c2 ? Decision::final_reject : Decision::final_accept;
}

double interim_efficacy_probability(double z2, double t, double bound)
{
    if (!(t > 0.0 && t < 1.0)) {
        throw DomainError("interim_efficacy_probability: information fraction must lie in (0, 1)");
    }
    const double mean = z2 * std::sqrt(t);
    const double sd = std::sqrt(1.0 - t);
    return dist::std_normal_cdf((-bound - mean) / sd) + dist::std_normal_cdf((mean - bound) / sd);
}

std::vector<Variant> default_variants(double pp_threshold)
{
    std::vector<Variant> out{{Method::none, false, pp_threshold}};
    for (Method m : {Method::haybittle_peto, Method::obrien_fleming, Method::pocock}) {
        out.push_back({m, false, pp_threshold});
        out.push_back({m, true, pp_threshold});
    }
    return out;
}

double quantile(std::vector<double> values, double p)
{
    if (values.empty()) {
        throw DomainError("quantile: empty sample");
    }
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ReanalysisResult reanalyze(const std::vector<data::ExperimentRow>& rows, const std::vector<Variant>& variants,
                           const Options& options)
{
    if (options.reps == 0) {
        throw DomainError("reanalyze: at least one repetition is required");
    }
    if (variants.empty()) {
        throw DomainError("reanalyze: no methods given");
    }
    ReanalysisResult result;
    result.reps = options.reps;
    result.seed = options.seed;

    std::vector<Prepared> prepared;
    std::uint64_t baseline_total = 0;
    for (const auto& row : rows) {
        if (row.n_control < 2 || row.n_treatment < 2 || !std::isfinite(row.effect)) {
            result.excluded.push_back({row.id, "fails row invariants"});
            continue;
        }
        std::pair<int, int> m;
        try {
            m = interim_split(row.n_control, row.n_treatment, options.rounding);
        } catch (const DomainError&) {
            result.excluded.push_back({row.id, "too small for an interim analysis"});
            continue;
        }
        Prepared p;
        p.z2 = final_z(row);
        p.t = effective_n(m.first, m.second) / effective_n(row.n_control, row.n_treatment);
        p.df_final = row.n_control + row.n_treatment - 2.0;
        p.n_full = static_cast<std::uint64_t>(row.n_control + row.n_treatment);
        p.n_interim = static_cast<std::uint64_t>(m.first + m.second);
        baseline_total += p.n_full;
        prepared.push_back(p);
    }
    if (prepared.empty()) {
        throw DataError("reanalyze: zero valid rows");
    }
    result.experiments = prepared.size();

    for (const auto& v : variants) {
        nominal_levels(v.method);  // solve the boundaries before going parallel
    }

    const std::size_t nv = variants.size();
    std::vector<RepCounts> counts(options.reps * nv);
    parallel_for(options.reps, options.workers, [&](std::size_t rep) {
        Engine stream = make_stream(options.seed, kStreamId, rep);
        RepCounts* out = &counts[rep * nv];
        for (const auto& e : prepared) {
            const double z1 = simulate_interim_z(e.z2, e.t, stream);
            const InterimContext ctx{e.t, e.df_final, options.scale};
            for (std::size_t v = 0; v < nv; ++v) {
                switch (apply_single_interim(z1, e.z2, variants[v], ctx)) {
                case Decision::interim_efficacy:
                    ++out[v].efficacy;
                    ++out[v].rejected;
                    out[v].used += e.n_interim;
                    break;
                case Decision::interim_futility:
                    ++out[v].futility;
                    out[v].used += e.n_interim;
                    break;
                case Decision::final_reject:
                    ++out[v].rejected;
                    out[v].used += e.n_full;
                    break;
                case Decision::final_accept:
                    out[v].used += e.n_full;
                    break;
                }
            }
        }
    });

    const double n_exp = static_cast<double>(prepared.size());
    for (std::size_t v = 0; v < nv; ++v) {
        std::vector<double> mean_n, rej, eff, fut, saved;
        for (std::uint64_t r = 0; r < options.reps; ++r) {
            const RepCounts& c = counts[r * nv + v];
            mean_n.push_back(static_cast<double>(c.used) / n_exp);
            rej.push_back(100.0 * static_cast<double>(c.rejected) / n_exp);
            eff.push_back(100.0 * static_cast<double>(c.efficacy) / n_exp);
            fut.push_back(100.0 * static_cast<double>(c.futility) / n_exp);
            saved.push_back(static_cast<double>(baseline_total - c.used));
        }
        result.methods.push_back(
            {variants[v], summarize(mean_n), summarize(rej), summarize(eff), summarize(fut), summarize(saved)});
    }
    return result;
}

void write_summary_csv(std::ostream& out, const ReanalysisResult& result)
{
    out << "design,futility,mean_n,mean_n_lo,mean_n_hi,rejection_pct,rejection_pct_lo,rejection_pct_hi,"
           "interim_efficacy_pct,interim_futility_pct,animals_saved,animals_saved_lo,animals_saved_hi\n";
    for (const auto& m : result.methods) {
        out << to_string(m.variant.method) << ',' << (m.variant.futility ? "pp" : "none");
        for (double v : {m.mean_n.median, m.mean_n.lo, m.mean_n.hi, m.rejection_pct.median, m.rejection_pct.lo,
                         m.rejection_pct.hi, m.interim_efficacy_pct.median, m.interim_futility_pct.median,
                         m.animals_saved.median, m.animals_saved.lo, m.animals_saved.hi}) {
            out << ',' << format_exact(v);
        }
        out << '\n';
    }
}

}  // namespace euii::reanalysis
