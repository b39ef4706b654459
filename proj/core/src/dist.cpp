#include "euii/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "euii/errors.hpp"

namespace euii::dist {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))
constexpr double kSeriesTolerance = 1e-12;
constexpr int kMaxSeriesTerms = 10000;

void require_finite(double x, const char* what)
{
    if (!std::isfinite(x)) {
        throw DomainError(std::string(what) + ": non-finite argument");
    }
}

void require_df(double df, const char* what)
{
    if (!(df > 0.0) || std::isnan(df)) {
        throw DomainError(std::string(what) + ": degrees of freedom must be positive");
    }
}

// 1 / (t + 1/(t + 2/(t + 3/(t + ...)))), the Mills ratio (1 - Phi(t)) / phi(t).
double mills_ratio(double t)
{
    double r = t;
    for (int k = 200; k >= 1; --k) {
        r = t + k / r;
    }
    return 1.0 / r;
}

// P(T <= t) for t >= 0 by the Poisson-mixture series.
double noncentral_t_series(double t, double df, double ncp)
{
    if (t == 0.0) {
        return std_normal_cdf(-ncp);
    }
    const double lambda = 0.5 * ncp * ncp;
    const double x = t * t / (t * t + df);
    const double b = 0.5 * df;
    const double log_lambda = std::log(lambda);
    const double q_scale = ncp / kSqrt2;

    auto poisson_p = [&](int i) {
        return std::exp(-lambda + i * log_lambda - std::lgamma(i + 1.0));
    };
    auto poisson_q = [&](int i) {
        return std::exp(-lambda + i * log_lambda - std::lgamma(i + 1.5));
    };
    auto term = [&](int i) {
        return poisson_p(i) * boost::math::ibeta(i + 0.5, b, x)
            + q_scale * poisson_q(i) * boost::math::ibeta(i + 1.0, b, x);
    };

    const int mode = static_cast<int>(std::floor(lambda));
    double sum = 0.0;
    int terms = 0;

    // Upward from the mode; beyond the mode the weights decay with ratio
    // lambda / (i + 1), which bounds the remaining tail.
    for (int i = mode;; ++i) {
        const double value = term(i);
        sum += value;
        if (++terms > kMaxSeriesTerms) {
            throw NumericError("noncentral_t_cdf: series did not converge");
        }
        const double ratio = lambda / (i + 1.0);
        const double tail = ratio < 1.0 ? std::abs(value) / (1.0 - ratio)
                                        : std::numeric_limits<double>::infinity();
        if (tail <= kSeriesTolerance * std::abs(sum) || (sum == 0.0 && value == 0.0 && i > mode)) {
            break;
        }
    }
    // Downward; incomplete betas are at most 1, so weights alone bound terms.
    for (int i = mode - 1; i >= 0; --i) {
        const double value = term(i);
        sum += value;
        if (++terms > kMaxSeriesTerms) {
            throw NumericError("noncentral_t_cdf: series did not converge");
        }
        const double weight_bound = poisson_p(i) + std::abs(q_scale) * poisson_q(i);
        const double ratio = i / lambda;
        const double tail = weight_bound * ratio / (1.0 - ratio);
        if (tail <= kSeriesTolerance * std::abs(sum)) {
            break;
        }
    }
    const double result = std_normal_cdf(-ncp) + 0.5 * sum;
    return std::clamp(result, 0.0, 1.0);
}

// log P(T <= x) by integrating Phi(x sqrt(u) - ncp) against the density of
// u = V / df, V ~ chi-square(df), on the log scale.
double log_noncentral_t_quadrature(double x, double df, double ncp)
{
    const double half_df = 0.5 * df;
    const double log_norm = half_df * std::log(half_df) - std::lgamma(half_df);
    auto log_integrand = [&](double s) {
        const double u = std::exp(s);
        return log_std_normal_cdf(x * std::sqrt(u) - ncp) + log_norm
            + half_df * s - half_df * u;  // includes the du = u ds Jacobian
    };

    constexpr double kLo = -60.0;
    constexpr double kHi = 12.0;
    constexpr int kCoarse = 14401;
    const double coarse_step = (kHi - kLo) / (kCoarse - 1);
    std::vector<double> coarse(kCoarse);
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kCoarse; ++i) {
        coarse[i] = log_integrand(kLo + i * coarse_step);
        peak = std::max(peak, coarse[i]);
    }
    int first = kCoarse;
    int last = -1;
    for (int i = 0; i < kCoarse; ++i) {
        if (coarse[i] > peak - 60.0) {
            first = std::min(first, i);
            last = std::max(last, i);
        }
    }
    const double lo = kLo + std::max(first - 1, 0) * coarse_step;
    const double hi = kLo + std::min(last + 1, kCoarse - 1) * coarse_step;

    constexpr int kFine = 8001;
    const double h = (hi - lo) / (kFine - 1);
    double acc = 0.0;
    for (int i = 0; i < kFine; ++i) {
        const double w = (i == 0 || i == kFine - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * std::exp(log_integrand(lo + i * h) - peak);
    }
    return peak + std::log(acc * h / 3.0);
}

}  // namespace

double std_normal_cdf(double x)
{
    require_finite(x, "std_normal_cdf");
    return 0.5 * std::erfc(-x / kSqrt2);
}

double std_normal_pdf(double x)
{
    return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double log_std_normal_cdf(double x)
{
    require_finite(x, "log_std_normal_cdf");
    if (x > 0.0) {
        return std::log1p(-0.5 * std::erfc(x / kSqrt2));
    }
    if (x > -35.0) {
        return std::log(0.5 * std::erfc(-x / kSqrt2));
    }
    return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio(-x));
}

double std_normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("std_normal_quantile: p must lie in (0, 1)");
    }
    // Work on the lower tail so that 1 - p never loses digits.
    const double q = p < 0.5 ? p : 1.0 - p;
    double x = -kSqrt2 * boost::math::erfc_inv(2.0 * q);
    const double density = std_normal_pdf(x);
    if (density > 0.0) {
        x -= (std_normal_cdf(x) - q) / density;
    }
    return p < 0.5 ? x : -x;
}

double t_cdf(double x, double df)
{
    require_df(df, "t_cdf");
    if (std::isnan(x)) {
        throw DomainError("t_cdf: NaN argument");
    }
    if (std::isinf(x)) {
        return x > 0 ? 1.0 : 0.0;
    }
    return boost::math::cdf(boost::math::students_t_distribution<double>(df), x);
}

double t_quantile(double p, double df)
{
    require_df(df, "t_quantile");
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("t_quantile: p must lie in (0, 1)");
    }
    if (p == 0.5) {
        return 0.0;
    }
    return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

double noncentral_t_cdf(double x, double df, double ncp)
{
    require_df(df, "noncentral_t_cdf");
    if (std::isnan(x) || !std::isfinite(ncp)) {
        throw DomainError("noncentral_t_cdf: invalid argument");
    }
    if (std::isinf(x)) {
        return x > 0 ? 1.0 : 0.0;
    }
    if (ncp == 0.0) {
        return t_cdf(x, df);
    }
    if (x >= 0.0) {
        return noncentral_t_series(x, df, ncp);
    }
    return std::clamp(1.0 - noncentral_t_series(-x, df, -ncp), 0.0, 1.0);
}

double log_noncentral_t_cdf(double x, double df, double ncp)
{
    const double value = noncentral_t_cdf(x, df, ncp);
    if (value > 1e-280) {
        return std::log(value);
    }
    return log_noncentral_t_quadrature(x, df, ncp);
}

}  // namespace euii::dist
