#include "euii/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "euii/dist.hpp"
#include "euii/errors.hpp"
#include "euii/evidence.hpp"
#include "euii/format.hpp"
#include "euii/gsd.hpp"
#include "euii/parallel.hpp"
#include "solve.hpp"

namespace euii::sim {
namespace {

constexpr double kOverallAlpha = 0.05;
constexpr double kHaybittlePetoInterim = 0.001;
constexpr std::uint64_t kBlockSize = 1000;

bool same_delta(double a, double b)
{
    return std::abs(a - b) <= 1e-12;
}

// Integer accumulators, so merging partial results is exact in any order.
struct Accumulator {
    std::uint64_t sig_count = 0;
    std::uint64_t sig_sum = 0;
    std::uint64_t sig_sum2 = 0;
    std::uint64_t non_count = 0;
    std::uint64_t non_sum = 0;
    std::uint64_t non_sum2 = 0;
    std::uint64_t efficacy = 0;
    std::uint64_t futility = 0;
    std::uint64_t max_reached = 0;

    void add(const TrialRecord& r)
    {
        const auto n = static_cast<std::uint64_t>(r.n_per_group_terminal);
        if (r.rejected) {
            ++sig_count;
            sig_sum += n;
            sig_sum2 += n * n;
        } else {
            ++non_count;
            non_sum += n;
            non_sum2 += n * n;
        }
        switch (r.reason) {
        case StopReason::efficacy: ++efficacy; break;
        case StopReason::futility: ++futility; break;
        case StopReason::max_reached: ++max_reached; break;
        }
    }

    void merge(const Accumulator& o)
    {
        sig_count += o.sig_count;
        sig_sum += o.sig_sum;
        sig_sum2 += o.sig_sum2;
        non_count += o.non_count;
        non_sum += o.non_sum;
        non_sum2 += o.non_sum2;
        efficacy += o.efficacy;
        futility += o.futility;
        max_reached += o.max_reached;
    }
};

OutcomeStats outcome_stats(std::uint64_t count, std::uint64_t sum, std::uint64_t sum2)
{
    OutcomeStats s;
    s.count = count;
    if (count > 0) {
        const double c = static_cast<double>(count);
        s.mean_n = static_cast<double>(sum) / c;
        s.var_n = std::max(static_cast<double>(sum2) / c - s.mean_n * s.mean_n, 0.0);
    }
    return s;
}

// Cell in total sample size (both groups) from per-group outcome stats.
adaptive::Cell total_n_cell(const OutcomeStats& s, std::uint64_t nsim)
{
    adaptive::Cell c;
    c.count = s.count;
    c.empty = s.count == 0;
    c.mass = static_cast<double>(s.count) / static_cast<double>(nsim);
    c.mean_n = 2.0 * s.mean_n;
    c.var_n = 4.0 * s.var_n;
    return c;
}

std::string describe(int n_max, double delta, const DesignVariant& design)
{
    std::ostringstream os;
    os << "n_max=" << n_max << " delta=" << format_exact(delta) << " design=" << design.label();
    return os.str();
}

}  // namespace

std::string_view to_string(Method method)
{
    switch (method) {
    case Method::n_hacking: return "n_hacking";
    case Method::reinagel: return "reinagel";
    case Method::pocock: return "pocock";
    case Method::obrien_fleming: return "obrien_fleming";
    case Method::haybittle_peto: return "haybittle_peto";
    case Method::fixed: return "fixed";
    }
    return "fixed";
}

std::string_view to_string(Futility futility)
{
    switch (futility) {
    case Futility::none: return "none";
    case Futility::predictive_power: return "predictive_power";
    case Futility::reinagel_fixed: return "reinagel_fixed";
    }
    return "none";
}

std::string_view to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::efficacy: return "efficacy";
    case StopReason::futility: return "futility";
    case StopReason::max_reached: return "max_reached";
    }
    return "max_reached";
}

Method parse_method(std::string_view name)
{
    for (Method m : {Method::n_hacking, Method::reinagel, Method::pocock, Method::obrien_fleming,
                     Method::haybittle_peto, Method::fixed}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    if (name == "obf") return Method::obrien_fleming;
    if (name == "hp") return Method::haybittle_peto;
    throw DomainError("unknown method: " + std::string(name));
}

Futility parse_futility(std::string_view name)
{
    if (name == "none") return Futility::none;
    if (name == "pp" || name == "predictive_power") return Futility::predictive_power;
    if (name == "reinagel_fixed") return Futility::reinagel_fixed;
    throw DomainError("unknown futility rule: " + std::string(name));
}

std::string DesignVariant::label() const
{
    std::string out(to_string(method));
    if (futility == Futility::predictive_power) {
        out += "+pp";
        if (std::abs(pp_threshold - 0.30) > 1e-12) {
            out += format_exact(pp_threshold);
        }
    }
    return out;
}

void DesignVariant::validate() const
{
    if ((method == Method::reinagel) != (futility == Futility::reinagel_fixed)) {
        throw DomainError("the reinagel method requires (and is the only user of) reinagel_fixed futility");
    }
    if (futility == Futility::predictive_power && !(pp_threshold > 0.0 && pp_threshold < 1.0)) {
        throw DomainError("predictive-power threshold must lie in (0, 1)");
    }
    if (method == Method::fixed && futility != Futility::none) {
        throw DomainError("the fixed design has no interim analysis to stop at");
    }
}

std::vector<int> stage_sizes(int n_max_per_group, Method method)
{
    if (n_max_per_group < kFirstStagePerGroup
        || (n_max_per_group - kFirstStagePerGroup) % kStageIncrementPerGroup != 0) {
        throw DomainError("n_max per group must be 8 + 4j");
    }
    if (method == Method::fixed) {
        return {n_max_per_group};
    }
    std::vector<int> stages;
    for (int n = kFirstStagePerGroup; n <= n_max_per_group; n += kStageIncrementPerGroup) {
        stages.push_back(n);
    }
    return stages;
}

StageStatistic two_sample_t(std::span<const double> group_a, std::span<const double> group_b)
{
    if (group_a.size() < 2 || group_b.size() < 2) {
        throw DomainError("two_sample_t: each group needs at least two observations");
    }
    const double na = static_cast<double>(group_a.size());
    const double nb = static_cast<double>(group_b.size());
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (double x : group_a) mean_a += x;
    for (double x : group_b) mean_b += x;
    mean_a /= na;
    mean_b /= nb;
    double ss = 0.0;
    for (double x : group_a) ss += (x - mean_a) * (x - mean_a);
    for (double x : group_b) ss += (x - mean_b) * (x - mean_b);
    const double df = na + nb - 2.0;
    const double pooled = ss / df;
    const double diff = mean_a - mean_b;
    if (pooled == 0.0) {
        if (diff == 0.0) {
            return {0.0, 1.0};
        }
        return {diff > 0 ? HUGE_VAL : -HUGE_VAL, 0.0};
    }
    const double t = diff / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
    return {t, 2.0 * dist::t_cdf(-std::abs(t), df)};
}

double two_sample_t_p(std::span<const double> group_a, std::span<const double> group_b)
{
    return two_sample_t(group_a, group_b).p;
}

double predictive_power_with_critical(double z_i, double f, double critical)
{
    if (!(f > 0.0 && f < 1.0)) {
        throw DomainError("predictive_power: information ratio must lie in (0, 1)");
    }
    if (std::isinf(z_i)) {
        return 1.0;
    }
    const double shift = -critical / std::sqrt(1.0 / f - 1.0);
    const double scale = std::sqrt(1.0 - f);
    return dist::std_normal_cdf(shift + z_i / scale) + dist::std_normal_cdf(shift - z_i / scale);
}

double predictive_power(double z_i, int n_i, int n_next, double a_next)
{
    if (!(n_next > n_i && n_i >= 2)) {
        throw DomainError("predictive_power: requires n_next > n_i >= 2");
    }
    if (!(a_next > 0.0 && a_next < 1.0)) {
        throw DomainError("predictive_power: level must lie in (0, 1)");
    }
    const double critical = dist::t_quantile(1.0 - a_next / 2.0, 2.0 * n_next - 2.0);
    return predictive_power_with_critical(z_i, static_cast<double>(n_i) / n_next, critical);
}

double futility_p_threshold(int n_i, int n_next, double a_next, double pp_threshold)
{
    if (!(pp_threshold > 0.0 && pp_threshold < 1.0)) {
        throw DomainError("futility_p_threshold: threshold must lie in (0, 1)");
    }
    const double at_zero = predictive_power(0.0, n_i, n_next, a_next);
    if (at_zero >= pp_threshold) {
        return 1.0;  // every interim result clears the threshold
    }
    auto f = [&](double z) { return predictive_power(z, n_i, n_next, a_next) - pp_threshold; };
    double hi = 1.0;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e4) {
            throw NumericError("futility_p_threshold: no bracket found");
        }
    }
    const double z = detail::solve_bracketed(f, 0.0, hi, "futility_p_threshold");
    return 2.0 * dist::t_cdf(-z, 2.0 * n_i - 2.0);
}

StoppingRule::StoppingRule(int n_max_per_group, const DesignVariant& design, FractionPolicy policy)
    : design_(design), stages_(stage_sizes(n_max_per_group, design.method))
{
    design_.validate();
    const std::size_t k = stages_.size();
    switch (design.method) {
    case Method::n_hacking:
    case Method::reinagel:
    case Method::fixed:
        levels_.assign(k, kOverallAlpha);
        break;
    case Method::haybittle_peto:
        levels_ = gsd::haybittle_peto_levels(k, kHaybittlePetoInterim, kOverallAlpha);
        break;
    case Method::pocock:
    case Method::obrien_fleming: {
        std::vector<double> fractions;
        if (policy == FractionPolicy::sample_size) {
            for (int n : stages_) {
                fractions.push_back(static_cast<double>(n) / n_max_per_group);
            }
        } else {
            fractions = gsd::equally_spaced(k);
        }
        const auto family = design.method == Method::pocock ? gsd::BoundaryFamily::pocock
                                                            : gsd::BoundaryFamily::obrien_fleming;
        levels_ = gsd::nominal_levels(family, k, kOverallAlpha, Sidedness::two, fractions);
        break;
    }
    }
    next_critical_.assign(k, 0.0);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        next_critical_[i] = dist::t_quantile(1.0 - levels_[i + 1] / 2.0, 2.0 * stages_[i + 1] - 2.0);
    }
}

TrialRecord StoppingRule::apply(std::span<const StageStatistic> stats) const
{
    if (stats.size() != stages_.size()) {
        throw DomainError("StoppingRule::apply: one statistic per stage is required");
    }
    const std::size_t k = stages_.size();
    for (std::size_t i = 0; i < k; ++i) {
        TrialRecord record;
        record.stop_stage = static_cast<int>(i + 1);
        record.n_per_group_terminal = stages_[i];
        if (stats[i].p <= levels_[i]) {
            record.rejected = true;
            record.reason = StopReason::efficacy;
            return record;
        }
        if (i + 1 == k) {
            record.reason = StopReason::max_reached;
            return record;
        }
        bool futile = false;
        if (design_.futility == Futility::reinagel_fixed) {
            futile = stats[i].p > kReinagelFutility;
        } else if (design_.futility == Futility::predictive_power) {
            const double f = static_cast<double>(stages_[i]) / stages_[i + 1];
            futile = predictive_power_with_critical(stats[i].t, f, next_critical_[i]) < design_.pp_threshold;
        }
        if (futile) {
            record.reason = StopReason::futility;
            return record;
        }
    }
    return {};  // unreachable: the last stage always returns
}

std::vector<StageStatistic> simulate_stage_statistics(int n_max_per_group, double delta,
                                                      std::span<const int> stages, Engine& stream)
{
    const auto n = static_cast<std::size_t>(n_max_per_group);
    std::vector<double> data(2 * n);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        data[i] = normal(stream);
    }
    for (std::size_t i = 0; i < n; ++i) {
        data[n + i] = delta + normal(stream);
    }
    const std::span<const double> control(data.data(), n);
    const std::span<const double> treatment(data.data() + n, n);
    std::vector<StageStatistic> stats;
    stats.reserve(stages.size());
    for (int size : stages) {
        const auto m = static_cast<std::size_t>(size);
        stats.push_back(two_sample_t(treatment.first(m), control.first(m)));
    }
    return stats;
}

TrialRecord simulate_trial(const SimCondition& condition, Engine& stream, FractionPolicy policy)
{
    const StoppingRule rule(condition.n_max_per_group, condition.design, policy);
    const auto stats = simulate_stage_statistics(condition.n_max_per_group, condition.delta, rule.stages(), stream);
    return rule.apply(stats);
}

std::vector<DesignVariant> default_designs()
{
    return {
        {Method::n_hacking, Futility::none},
        {Method::n_hacking, Futility::predictive_power},
        {Method::reinagel, Futility::reinagel_fixed},
        {Method::pocock, Futility::none},
        {Method::pocock, Futility::predictive_power},
        {Method::obrien_fleming, Futility::none},
        {Method::obrien_fleming, Futility::predictive_power},
        {Method::haybittle_peto, Futility::none},
        {Method::haybittle_peto, Futility::predictive_power},
    };
}

StudyGrid default_grid()
{
    StudyGrid grid;
    grid.n_max_per_group = {12, 16, 20, 24, 28, 32};
    grid.deltas = {0.0, 0.3, 0.5, 0.8, 1.0};
    grid.designs = default_designs();
    grid.priors = {0.01, 0.1, 0.5};
    return grid;
}

std::uint64_t condition_id(int n_max_per_group, double delta)
{
    const auto milli = static_cast<std::int64_t>(std::llround(delta * 1000.0));
    return static_cast<std::uint64_t>(n_max_per_group) * 1000003ULL + static_cast<std::uint64_t>(milli);
}

double clamp_rate(double rate, std::uint64_t nsim, bool* clamped)
{
    const double floor = 0.5 / static_cast<double>(nsim);
    const double out = std::clamp(rate, floor, 1.0 - floor);
    if (clamped) {
        *clamped = out != rate;
    }
    return out;
}

const ConditionSummary* StudyResult::find(int n_max, double delta, const DesignVariant& design) const
{
    for (const auto& c : conditions) {
        if (c.n_max_per_group == n_max && same_delta(c.delta, delta) && c.design == design) {
            return &c;
        }
    }
    return nullptr;
}

const EuiiRow* StudyResult::find_euii(int n_max, double delta, const DesignVariant& design, double prior) const
{
    for (const auto& e : euii) {
        if (e.n_max_per_group == n_max && same_delta(e.delta, delta) && e.design == design
            && std::abs(e.prior_h1 - prior) <= 1e-12) {
            return &e;
        }
    }
    return nullptr;
}

StudyResult run_study(const StudyGrid& grid, const RunOptions& options)
{
    if (options.nsim < 1000) {
        throw DomainError("run_study: at least 1000 replications are required");
    }
    if (grid.designs.empty() || grid.n_max_per_group.empty() || grid.deltas.empty()) {
        throw DomainError("run_study: empty grid");
    }
    for (const auto& d : grid.designs) {
        d.validate();
    }

    struct DataCell {
        int n_max;
        double delta;
        std::size_t n_index;
    };
    std::vector<DataCell> cells;
    std::vector<std::vector<StoppingRule>> rules;  // [n_index][design]
    for (std::size_t ni = 0; ni < grid.n_max_per_group.size(); ++ni) {
        const int n_max = grid.n_max_per_group[ni];
        std::vector<StoppingRule> per_design;
        for (const auto& d : grid.designs) {
            per_design.emplace_back(n_max, d, grid.fraction_policy);
        }
        rules.push_back(std::move(per_design));
        for (double delta : grid.deltas) {
            cells.push_back({n_max, delta, ni});
        }
    }

    const std::uint64_t nsim = options.nsim;
    const std::uint64_t blocks = (nsim + kBlockSize - 1) / kBlockSize;
    const std::size_t designs = grid.designs.size();
    std::vector<std::vector<Accumulator>> partial(cells.size() * blocks, std::vector<Accumulator>(designs));

    parallel_for(partial.size(), options.workers, [&](std::size_t task) {
        const DataCell& cell = cells[task / blocks];
        const std::uint64_t block = task % blocks;
        const std::uint64_t begin = block * kBlockSize;
        const std::uint64_t end = std::min(nsim, begin + kBlockSize);
        const auto full_stages = stage_sizes(cell.n_max, Method::n_hacking);
        const std::uint64_t id = condition_id(cell.n_max, cell.delta);
        auto& acc = partial[task];
        for (std::uint64_t rep = begin; rep < end; ++rep) {
            Engine stream = make_stream(options.seed, id, rep);
            const auto stats = simulate_stage_statistics(cell.n_max, cell.delta, full_stages, stream);
            const std::span<const StageStatistic> all(stats);
            for (std::size_t d = 0; d < designs; ++d) {
                const auto& rule = rules[cell.n_index][d];
                acc[d].add(rule.apply(all.last(rule.stages().size())));
            }
        }
    });

    StudyResult result;
    result.priors = grid.priors;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t d = 0; d < designs; ++d) {
            Accumulator total;
            for (std::uint64_t b = 0; b < blocks; ++b) {
                total.merge(partial[c * blocks + b][d]);
            }
            ConditionSummary s;
            s.n_max_per_group = cells[c].n_max;
            s.delta = cells[c].delta;
            s.design = grid.designs[d];
            s.nsim = nsim;
            s.seed = options.seed;
            const double n = static_cast<double>(nsim);
            s.rejection_rate = static_cast<double>(total.sig_count) / n;
            s.mcse_rejection = std::sqrt(s.rejection_rate * (1.0 - s.rejection_rate) / n);
            const double sum = static_cast<double>(total.sig_sum + total.non_sum);
            const double sum2 = static_cast<double>(total.sig_sum2 + total.non_sum2);
            s.mean_n = sum / n;
            s.mcse_mean_n = std::sqrt(std::max(sum2 / n - s.mean_n * s.mean_n, 0.0) / n);
            s.significant = outcome_stats(total.sig_count, total.sig_sum, total.sig_sum2);
            s.nonsignificant = outcome_stats(total.non_count, total.non_sum, total.non_sum2);
            s.efficacy_stops = total.efficacy;
            s.futility_stops = total.futility;
            s.max_reached = total.max_reached;
            result.conditions.push_back(s);
        }
    }

    const bool has_null = std::any_of(grid.deltas.begin(), grid.deltas.end(),
                                      [](double d) { return same_delta(d, 0.0); });
    if (!has_null || grid.priors.empty()) {
        return result;
    }
    for (const auto& alt : result.conditions) {
        if (same_delta(alt.delta, 0.0)) {
            continue;
        }
        const ConditionSummary* null = result.find(alt.n_max_per_group, 0.0, alt.design);
        bool clamped_power = false;
        bool clamped_t1e = false;
        const double power = clamp_rate(alt.rejection_rate, nsim, &clamped_power);
        const double t1e = clamp_rate(null->rejection_rate, nsim, &clamped_t1e);
        result.clamped_rates += (clamped_power ? 1 : 0) + (clamped_t1e ? 1 : 0);

        adaptive::OutcomeCells cells_2x2;
        cells_2x2.h0_sig = total_n_cell(null->significant, nsim);
        cells_2x2.h0_nonsig = total_n_cell(null->nonsignificant, nsim);
        cells_2x2.h1_sig = total_n_cell(alt.significant, nsim);
        cells_2x2.h1_nonsig = total_n_cell(alt.nonsignificant, nsim);

        const auto lr = evidence::likelihood_ratios(power, t1e);
        for (double prior : grid.priors) {
            EuiiRow row;
            row.n_max_per_group = alt.n_max_per_group;
            row.delta = alt.delta;
            row.design = alt.design;
            row.prior_h1 = prior;
            row.power = power;
            row.t1e = t1e;
            row.lr_plus = lr.lr_plus;
            row.lr_minus = lr.lr_minus;
            row.dor = evidence::dor(power, t1e);
            try {
                row.euii = adaptive::assess(power, t1e, cells_2x2, prior);
            } catch (const DataError& e) {
                throw DataError(describe(alt.n_max_per_group, alt.delta, alt.design) + " prior="
                                + format_exact(prior) + ": " + e.what());
            }
            result.euii.push_back(row);
        }
    }
    return result;
}

std::string_view summary_csv_header()
{
    return "n_max_per_group,delta,method,futility,design,prior_h1,nsim,seed,"
           "rejection_rate,mcse_rejection,mean_n,mcse_mean_n,"
           "n_sig,mean_n_sig,var_n_sig,n_nonsig,mean_n_nonsig,var_n_nonsig,"
           "efficacy_stops,futility_stops,max_reached,"
           "power,t1e,lr_plus,lr_minus,dor,pr_h1_sig,pr_h1_nonsig,"
           "e_n_plus,e_n_minus,cv_n_plus,cv_n_minus,euii_first,euii_second";
}

void write_summary_csv(std::ostream& out, const StudyResult& result)
{
    out << summary_csv_header() << '\n';
    const auto& priors = result.priors;
    for (const auto& c : result.conditions) {
        for (double prior : priors) {
            out << c.n_max_per_group << ',' << format_exact(c.delta) << ',' << to_string(c.design.method)
                << ',' << to_string(c.design.futility) << ',' << c.design.label() << ','
                << format_exact(prior) << ',' << c.nsim << ',' << c.seed << ','
                << format_exact(c.rejection_rate) << ',' << format_exact(c.mcse_rejection) << ','
                << format_exact(c.mean_n) << ',' << format_exact(c.mcse_mean_n) << ','
                << c.significant.count << ',' << format_exact(c.significant.mean_n) << ','
                << format_exact(c.significant.var_n) << ',' << c.nonsignificant.count << ','
                << format_exact(c.nonsignificant.mean_n) << ',' << format_exact(c.nonsignificant.var_n)
                << ',' << c.efficacy_stops << ',' << c.futility_stops << ',' << c.max_reached;
            const EuiiRow* e = result.find_euii(c.n_max_per_group, c.delta, c.design, prior);
            if (e) {
                const auto& a = e->euii;
                for (double v : {e->power, e->t1e, e->lr_plus, e->lr_minus, e->dor, a.pr_h1_given_sig,
                                 a.pr_h1_given_nonsig, a.e_n_plus, a.e_n_minus, a.cv_n_plus, a.cv_n_minus,
                                 a.euii_first, a.euii_second}) {
                    out << ',' << format_exact(v);
                }
            } else {
                out << ",,,,,,,,,,,,,";
            }
            out << '\n';
        }
    }
}

}  // namespace euii::sim
