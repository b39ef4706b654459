#include "euii/gsd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "euii/dist.hpp"
#include "euii/fixed_design.hpp"
#include "solve.hpp"

namespace euii::gsd {
namespace {

constexpr double kHaybittlePetoInterimTail = 0.0005;

// One-tail probability of a nominal level.
double tail_of_level(double level, Sidedness sided)
{
    return sided == Sidedness::two ? level / 2.0 : level;
}

double level_of_bound(double bound, Sidedness sided)
{
    const double tail = dist::std_normal_cdf(-bound);
    return sided == Sidedness::two ? 2.0 * tail : tail;
}

std::vector<double> fractions_or_default(std::span<const double> fractions, std::size_t k)
{
    if (fractions.empty()) {
        return equally_spaced(k);
    }
    if (fractions.size() != k) {
        throw DomainError("information fractions must have one entry per look");
    }
    return {fractions.begin(), fractions.end()};
}

struct Grid {
    std::vector<double> z;
    std::vector<double> weight;  // Simpson weight times step
};

Grid simpson_grid(double lo, double hi, int points)
{
    Grid g;
    if (!(hi > lo)) {
        return g;
    }
    const int m = points % 2 == 1 ? points : points + 1;
    const double h = (hi - lo) / (m - 1);
    g.z.resize(m);
    g.weight.resize(m);
    for (int i = 0; i < m; ++i) {
        g.z[i] = lo + i * h;
        const double w = (i == 0 || i == m - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        g.weight[i] = w * h / 3.0;
    }
    return g;
}

StagewiseResult crossings(const std::vector<double>& t, const std::vector<double>& bounds, bool two_sided,
                          double drift, const std::vector<double>& n, const GridOptions& grid);

// Overall rejection probability with every bound replaced by bounds(t_i).
template <class Bounds>
double reject_with(const std::vector<double>& fractions, Sidedness sided, double drift, Bounds bounds)
{
    std::vector<double> b(fractions.size());
    std::transform(fractions.begin(), fractions.end(), b.begin(), bounds);
    return crossings(fractions, b, sided == Sidedness::two, drift, fractions, GridOptions{}).overall_reject;
}

double solve_constant(BoundaryFamily family, const std::vector<double>& fractions, double alpha,
                      Sidedness sided)
{
    const double z_single = -dist::std_normal_quantile(tail_of_level(alpha, sided));
    auto f = [&](double c) {
        if (family == BoundaryFamily::pocock) {
            return reject_with(fractions, sided, 0.0, [c](double) { return c; }) - alpha;
        }
        return reject_with(fractions, sided, 0.0, [c](double t) { return c / std::sqrt(t); }) - alpha;
    };
    return detail::solve_bracketed(f, z_single, 12.0, "nominal_levels");
}

}  // namespace

std::string_view to_string(BoundaryFamily family)
{
    switch (family) {
    case BoundaryFamily::pocock: return "pocock";
    case BoundaryFamily::obrien_fleming: return "obrien_fleming";
    case BoundaryFamily::haybittle_peto: return "haybittle_peto";
    case BoundaryFamily::custom: return "custom";
    }
    return "custom";
}

BoundaryFamily parse_family(std::string_view name)
{
    if (name == "pocock") return BoundaryFamily::pocock;
    if (name == "obrien_fleming" || name == "obf") return BoundaryFamily::obrien_fleming;
    if (name == "haybittle_peto" || name == "hp") return BoundaryFamily::haybittle_peto;
    if (name == "custom" || name == "fixed") return BoundaryFamily::custom;
    throw DomainError("unknown boundary family: " + std::string(name));
}

void GsdSpec::validate() const
{
    if (info_fractions.empty()) {
        throw DomainError("a design needs at least one look");
    }
    if (nominal_levels.size() != info_fractions.size()) {
        throw DomainError("one nominal level per look is required");
    }
    double previous = 0.0;
    for (double t : info_fractions) {
        if (!(t > previous) || t > 1.0) {
            throw DomainError("information fractions must increase strictly inside (0, 1]");
        }
        previous = t;
    }
    if (std::abs(info_fractions.back() - 1.0) > 1e-12) {
        throw DomainError("the last information fraction must be 1");
    }
    for (double a : nominal_levels) {
        if (!(a > 0.0 && a < 1.0)) {
            throw DomainError("nominal levels must lie strictly inside (0, 1)");
        }
    }
    if (!(n_max > 0.0)) {
        throw DomainError("n_max must be positive");
    }
}

std::vector<double> GsdSpec::critical_values() const
{
    std::vector<double> b(nominal_levels.size());
    std::transform(nominal_levels.begin(), nominal_levels.end(), b.begin(), [this](double a) {
        return -dist::std_normal_quantile(tail_of_level(a, sidedness));
    });
    return b;
}

std::vector<double> GsdSpec::look_sample_sizes() const
{
    std::vector<double> n(info_fractions.size());
    std::transform(info_fractions.begin(), info_fractions.end(), n.begin(),
                   [this](double t) { return t * n_max; });
    return n;
}

double StagewiseResult::total_mass() const
{
    return std::accumulate(efficacy_stop_prob.begin(), efficacy_stop_prob.end(), 0.0)
        + std::accumulate(futility_stop_prob.begin(), futility_stop_prob.end(), 0.0) + continue_mass;
}

std::vector<double> equally_spaced(std::size_t k)
{
    if (k == 0) {
        throw DomainError("a design needs at least one look");
    }
    std::vector<double> t(k);
    for (std::size_t i = 0; i < k; ++i) {
        t[i] = static_cast<double>(i + 1) / static_cast<double>(k);
    }
    t.back() = 1.0;
    return t;
}

double drift_for(double delta, double n_total, Arms arms)
{
    return arms == Arms::one ? delta * std::sqrt(n_total) : 0.5 * delta * std::sqrt(n_total);
}

namespace {

StagewiseResult crossings(const std::vector<double>& t, const std::vector<double>& bounds, bool two_sided,
                          double drift, const std::vector<double>& n, const GridOptions& grid)
{
    const std::size_t k = t.size();

    StagewiseResult out;
    out.efficacy_stop_prob.assign(k, 0.0);
    out.futility_stop_prob.assign(k, 0.0);

    auto region = [&](std::size_t i) {
        const double mean = drift * std::sqrt(t[i]);
        const double lo = two_sided ? std::max(-bounds[i], mean - grid.span_sd) : mean - grid.span_sd;
        const double hi = std::min(bounds[i], mean + grid.span_sd);
        return simpson_grid(lo, hi, grid.points);
    };

    // Look 1: Z_1 ~ N(drift * sqrt(t_1), 1).
    const double mean1 = drift * std::sqrt(t[0]);
    out.efficacy_stop_prob[0] = dist::std_normal_cdf(mean1 - bounds[0]);
    if (two_sided) {
        out.efficacy_stop_prob[0] += dist::std_normal_cdf(-bounds[0] - mean1);
    }
    if (k == 1) {
        out.continue_mass = dist::std_normal_cdf(bounds[0] - mean1)
            - (two_sided ? dist::std_normal_cdf(-bounds[0] - mean1) : 0.0);
    }

    Grid current = region(0);
    std::vector<double> density(current.z.size());
    for (std::size_t j = 0; j < current.z.size(); ++j) {
        density[j] = dist::std_normal_pdf(current.z[j] - mean1);
    }

    for (std::size_t i = 1; i < k; ++i) {
        const double dt = t[i] - t[i - 1];
        const double sd = std::sqrt(dt);
        const double root_prev = std::sqrt(t[i - 1]);
        const double root_next = std::sqrt(t[i]);
        const double b_score = bounds[i] * root_next;  // bound on the score scale

        // Crossing at look i, and the no-crossing mass when this is the last look.
        double cross = 0.0;
        double stay = 0.0;
        for (std::size_t j = 0; j < current.z.size(); ++j) {
            const double shift = current.z[j] * root_prev + drift * dt;
            const double mass = density[j] * current.weight[j];
            double up = dist::std_normal_cdf((shift - b_score) / sd);
            double down = two_sided ? dist::std_normal_cdf((-b_score - shift) / sd) : 0.0;
            cross += mass * (up + down);
            if (i + 1 == k) {
                stay += mass * (1.0 - up - down);
            }
        }
        out.efficacy_stop_prob[i] = std::max(cross, 0.0);
        if (i + 1 == k) {
            out.continue_mass = std::max(stay, 0.0);
            break;
        }

        Grid next = region(i);
        std::vector<double> next_density(next.z.size(), 0.0);
        const double scale = root_next / sd;
        const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(current.z.size());
        std::vector<double> mass(current.z.size());
        for (std::size_t j = 0; j < current.z.size(); ++j) {
            mass[j] = density[j] * current.weight[j];
        }
        // On the uniform grid u_j = u0 - j c, so exp(-u_j^2 / 2) follows a
        // two-multiplication recurrence outward from its peak.
        const double c = count > 1 ? (current.z[1] - current.z[0]) * root_prev / sd : 0.0;
        const double decay = std::exp(-c * c);
        constexpr double kNegligible = 1e-25;
        for (std::size_t m = 0; m < next.z.size(); ++m) {
            const double target = next.z[m] * root_next - drift * dt;
            const double u0 = (target - current.z[0] * root_prev) / sd;
            double acc = 0.0;
            if (count == 1 || c == 0.0) {
                acc = mass[0] * std::exp(-0.5 * u0 * u0);
            } else {
                const std::ptrdiff_t peak = std::clamp<std::ptrdiff_t>(std::llround(u0 / c), 0, count - 1);
                const double u_peak = u0 - static_cast<double>(peak) * c;
                const double e_peak = std::exp(-0.5 * u_peak * u_peak);
                double e = e_peak;
                double ratio = std::exp(c * u_peak - 0.5 * c * c);
                for (std::ptrdiff_t j = peak; j < count && e > kNegligible; ++j) {
                    acc += mass[j] * e;
                    e *= ratio;
                    ratio *= decay;
                }
                e = e_peak;
                ratio = std::exp(-c * u_peak - 0.5 * c * c);
                for (std::ptrdiff_t j = peak - 1; j >= 0; --j) {
                    e *= ratio;
                    ratio *= decay;
                    if (e <= kNegligible) break;
                    acc += mass[j] * e;
                }
            }
            next_density[m] = acc * scale * 0.39894228040143267794;  // 1 / sqrt(2 pi)
        }
        current = std::move(next);
        density = std::move(next_density);
    }

    double reject = 0.0;
    double sum_n = 0.0;
    double sum_n2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        reject += out.efficacy_stop_prob[i];
        sum_n += out.efficacy_stop_prob[i] * n[i];
        sum_n2 += out.efficacy_stop_prob[i] * n[i] * n[i];
    }
    out.overall_reject = reject;
    if (reject > 0.0) {
        out.e_n_reject = sum_n / reject;
        out.var_n_reject = std::max(sum_n2 / reject - out.e_n_reject * out.e_n_reject, 0.0);
    }
    out.e_n_accept = n.back();
    out.var_n_accept = 0.0;
    return out;
}

}  // namespace

StagewiseResult crossing_probabilities(const GsdSpec& spec, double drift, const GridOptions& grid)
{
    spec.validate();
    if (!std::isfinite(drift)) {
        throw DomainError("drift must be finite");
    }
    return crossings(spec.info_fractions, spec.critical_values(), spec.sidedness == Sidedness::two, drift,
                     spec.look_sample_sizes(), grid);
}

std::vector<double> haybittle_peto_levels(std::size_t k, double interim_level, double final_level)
{
    if (k == 0) {
        throw DomainError("a design needs at least one look");
    }
    std::vector<double> a(k, interim_level);
    a.back() = final_level;
    return a;
}

std::vector<double> nominal_levels(BoundaryFamily family, std::size_t k, double alpha_overall,
                                   Sidedness sided, std::span<const double> info_fractions)
{
    if (!(alpha_overall > 0.0 && alpha_overall < 1.0)) {
        throw DomainError("alpha must lie strictly inside (0, 1)");
    }
    const auto fractions = fractions_or_default(info_fractions, k);
    if (k == 1) {
        return {alpha_overall};
    }
    switch (family) {
    case BoundaryFamily::haybittle_peto: {
        const double interim = sided == Sidedness::two ? 2.0 * kHaybittlePetoInterimTail
                                                       : kHaybittlePetoInterimTail;
        return haybittle_peto_levels(k, interim, alpha_overall);
    }
    case BoundaryFamily::pocock: {
        const double c = solve_constant(family, fractions, alpha_overall, sided);
        return std::vector<double>(k, level_of_bound(c, sided));
    }
    case BoundaryFamily::obrien_fleming: {
        const double c = solve_constant(family, fractions, alpha_overall, sided);
        std::vector<double> a(k);
        for (std::size_t i = 0; i < k; ++i) {
            a[i] = level_of_bound(c / std::sqrt(fractions[i]), sided);
        }
        return a;
    }
    case BoundaryFamily::custom:
        break;
    }
    throw DomainError("custom designs need explicit nominal levels");
}

GsdSpec make_spec(BoundaryFamily family, std::size_t k, double alpha_overall, Sidedness sided,
                  double n_max, std::span<const double> info_fractions)
{
    GsdSpec spec;
    spec.info_fractions = fractions_or_default(info_fractions, k);
    spec.nominal_levels = (family == BoundaryFamily::custom && k == 1)
        ? std::vector<double>{alpha_overall}
        : nominal_levels(family, k, alpha_overall, sided, spec.info_fractions);
    spec.family = family;
    spec.sidedness = sided;
    spec.n_max = n_max;
    spec.validate();
    return spec;
}

double max_sample_size(BoundaryFamily family, std::size_t k, double alpha_overall, double power,
                       double delta, Sidedness sided, Arms arms)
{
    if (!(power > 0.0 && power < 1.0)) {
        throw DomainError("power must lie strictly inside (0, 1)");
    }
    if (delta == 0.0 || !std::isfinite(delta)) {
        throw DomainError("delta must be finite and non-zero");
    }
    if (family == BoundaryFamily::haybittle_peto) {
        return fixed_design::required_n(delta, alpha_overall, 1.0 - power, arms, sided);
    }
    GsdSpec spec = make_spec(family, k, alpha_overall, sided, 1.0);
    const double level = crossing_probabilities(spec, 0.0).overall_reject;
    if (!(power > level)) {
        throw DomainError("power must exceed the overall Type-I error rate");
    }
    auto f = [&](double drift) { return crossing_probabilities(spec, drift).overall_reject - power; };
    const double drift = detail::solve_bracketed(f, 0.0, 40.0, "max_sample_size");
    const double root_n = arms == Arms::one ? drift / std::abs(delta) : 2.0 * drift / std::abs(delta);
    return root_n * root_n;
}

adaptive::OutcomeCells expected_sample_sizes(const GsdSpec& spec, double delta_null, double delta_alt,
                                             Arms arms)
{
    auto fill = [&](double delta, adaptive::Cell& sig, adaptive::Cell& nonsig) {
        const auto r = crossing_probabilities(spec, drift_for(delta, spec.n_max, arms));
        sig.mass = r.overall_reject;
        sig.mean_n = r.e_n_reject;
        sig.var_n = r.var_n_reject;
        sig.empty = !(r.overall_reject > 0.0);
        nonsig.mass = r.continue_mass;
        nonsig.mean_n = r.e_n_accept;
        nonsig.var_n = r.var_n_accept;
        nonsig.empty = !(r.continue_mass > 0.0);
    };
    adaptive::OutcomeCells cells;
    fill(delta_null, cells.h0_sig, cells.h0_nonsig);
    fill(delta_alt, cells.h1_sig, cells.h1_nonsig);
    return cells;
}

}  // namespace euii::gsd
