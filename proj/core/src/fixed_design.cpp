#include "euii/fixed_design.hpp"

#include <algorithm>
#include <cmath>

#include "euii/dist.hpp"
#include "euii/evidence.hpp"
#include "solve.hpp"

namespace euii::fixed_design {
namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie strictly inside (0, 1)");
    }
}

double critical_z(double alpha, Sidedness sided)
{
    return dist::std_normal_quantile(1.0 - one_tail_level(alpha, sided));
}

}  // namespace

void DesignPoint::validate() const
{
    if (!std::isfinite(delta)) {
        throw DomainError("delta must be finite");
    }
    check_alpha(alpha);
    if (!(n_total > 0.0)) {
        throw DomainError("n_total must be positive");
    }
    if (allocation) {
        if (arms != Arms::two) {
            throw DomainError("an allocation only applies to two-arm designs");
        }
        if (!(allocation->n1 > 0.0 && allocation->n2 > 0.0)) {
            throw DomainError("group sizes must be positive");
        }
        if (std::abs(allocation->n1 + allocation->n2 - n_total) > 1e-9 * n_total) {
            throw DomainError("group sizes must sum to n_total");
        }
    }
}

double DesignPoint::n1() const
{
    if (arms == Arms::one) {
        return n_total;
    }
    return allocation ? allocation->n1 : 0.5 * n_total;
}

double DesignPoint::n2() const
{
    if (arms == Arms::one) {
        return 0.0;
    }
    return allocation ? allocation->n2 : 0.5 * n_total;
}

double DesignPoint::information() const
{
    if (arms == Arms::one) {
        return n_total;
    }
    return n1() * n2() / (n1() + n2());
}

double DesignPoint::drift() const
{
    return delta * std::sqrt(information());
}

double DesignPoint::degrees_of_freedom() const
{
    return arms == Arms::one ? n_total - 1.0 : n_total - 2.0;
}

double required_n(double delta, double alpha, double beta, Arms arms, Sidedness sided)
{
    check_alpha(alpha);
    if (!(beta > 0.0 && beta < 1.0)) {
        throw DomainError("beta must lie strictly inside (0, 1)");
    }
    if (delta == 0.0 || !std::isfinite(delta)) {
        throw DomainError("required_n: delta must be finite and non-zero");
    }
    const double u = dist::std_normal_quantile(1.0 - beta);
    const double v = critical_z(alpha, sided);
    const double n = (u + v) * (u + v) / (delta * delta);
    return arms == Arms::two ? 4.0 * n : n;
}

double required_n_t(double delta, double alpha, double beta, Arms arms, Sidedness sided)
{
    const double n_z = required_n(delta, alpha, beta, arms, sided);
    const double lo = arms == Arms::one ? 2.0 : 4.0;
    auto f = [&](double n) {
        DesignPoint p;
        p.delta = delta;
        p.arms = arms;
        p.n_total = n;
        p.alpha = alpha;
        p.sidedness = sided;
        p.test = TestFamily::t;
        return power_t(p) - (1.0 - beta);
    };
    double hi = std::max(n_z, lo) * 2.0 + 20.0;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e9) {
            throw NumericError("required_n_t: power target not reachable");
        }
    }
    if (f(lo) >= 0.0) {
        return lo;
    }
    return detail::solve_bracketed(f, lo, hi, "required_n_t", 1e-12);
}

double power_z(const DesignPoint& point)
{
    point.validate();
    return dist::std_normal_cdf(point.drift() - critical_z(point.alpha, point.sidedness));
}

double power_z_unequal(double delta, double n1, double n2, double alpha, Sidedness sided)
{
    DesignPoint point;
    point.delta = delta;
    point.arms = Arms::two;
    point.n_total = n1 + n2;
    point.allocation = Allocation{n1, n2};
    point.alpha = alpha;
    point.sidedness = sided;
    return power_z(point);
}

double power_t(const DesignPoint& point)
{
    point.validate();
    const bool enough = point.arms == Arms::one ? point.n_total >= 2.0
                                                : point.n1() >= 2.0 && point.n2() >= 2.0;
    if (!enough) {
        throw DomainError("power_t: at least two observations per group are required");
    }
    const double df = point.degrees_of_freedom();
    const double crit = dist::t_quantile(1.0 - one_tail_level(point.alpha, point.sidedness), df);
    return 1.0 - dist::noncentral_t_cdf(crit, df, point.drift());
}

double rejection_probability_t(const DesignPoint& point)
{
    const double upper = power_t(point);
    if (point.sidedness == Sidedness::one) {
        return upper;
    }
    const double df = point.degrees_of_freedom();
    const double crit = dist::t_quantile(1.0 - point.alpha / 2.0, df);
    return upper + dist::noncentral_t_cdf(-crit, df, point.drift());
}

double euii_asymptote(double delta, Arms arms)
{
    if (!std::isfinite(delta)) {
        throw DomainError("euii_asymptote: delta must be finite");
    }
    return std::exp(delta * delta / (arms == Arms::one ? 2.0 : 8.0));
}

Evaluation evaluate(const DesignPoint& point)
{
    point.validate();
    double log_power = 0.0;
    double log_miss = 0.0;  // log(1 - power)
    if (point.test == TestFamily::z) {
        const double x = point.drift() - critical_z(point.alpha, point.sidedness);
        log_power = dist::log_std_normal_cdf(x);
        log_miss = dist::log_std_normal_cdf(-x);
    } else {
        const double power = power_t(point);
        const double df = point.degrees_of_freedom();
        const double crit = dist::t_quantile(1.0 - one_tail_level(point.alpha, point.sidedness), df);
        log_power = std::log(power);
        log_miss = dist::log_noncentral_t_cdf(crit, df, point.drift());
    }
    Evaluation out;
    out.power = std::exp(log_power);
    out.t1e = point.alpha;
    out.log_dor = (log_power - log_miss) - std::log(evidence::odds(point.alpha));
    out.dor = std::exp(out.log_dor);
    out.euii = evidence::euii_from_log_dor(out.log_dor, point.n_total);
    return out;
}

}  // namespace euii::fixed_design
