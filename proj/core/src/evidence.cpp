#include "euii/evidence.hpp"

#include <cmath>
#include <limits>

#include "euii/errors.hpp"

namespace euii::evidence {
namespace {

void check_rates(double power, double t1e)
{
    if (!(t1e > 0.0 && t1e < 1.0)) {
        throw DomainError("Type-I error rate must lie strictly inside (0, 1)");
    }
    if (!(power >= 0.0 && power <= 1.0)) {
        throw DomainError("power must lie in [0, 1]");
    }
    if (power == 0.0 || power == 1.0) {
        throw DegenerateEvidenceError("power of 0 or 1 gives a degenerate likelihood ratio");
    }
}

}  // namespace

double odds(double probability)
{
    return probability / (1.0 - probability);
}

double probability_from_odds(double o)
{
    if (std::isinf(o)) {
        return 1.0;
    }
    return o / (1.0 + o);
}

LikelihoodRatios likelihood_ratios(double power, double t1e)
{
    check_rates(power, t1e);
    return {power / t1e, (1.0 - power) / (1.0 - t1e)};
}

double dor(double power, double t1e)
{
    check_rates(power, t1e);
    return odds(power) / odds(t1e);
}

double euii_fixed(double dor_value, double n)
{
    if (!(n > 0.0) || !(dor_value > 0.0)) {
        throw DomainError("euii_fixed: dor and n must be positive");
    }
    return std::pow(dor_value, 1.0 / n);
}

double euii_from_log_dor(double log_dor, double n)
{
    if (!(n > 0.0) || std::isnan(log_dor)) {
        throw DomainError("euii_from_log_dor: n must be positive");
    }
    return std::exp(log_dor / n);
}

double update_odds(double prior_h1, double lr)
{
    if (!(prior_h1 >= 0.0 && prior_h1 < 1.0)) {
        throw DomainError("update_odds: prior must lie in [0, 1)");
    }
    if (!(lr > 0.0)) {
        throw DomainError("update_odds: likelihood ratio must be positive");
    }
    return probability_from_odds(lr * odds(prior_h1));
}

EvidenceSummary summarize(double power, double t1e, double n)
{
    const double d = dor(power, t1e);
    return {d, euii_fixed(d, n), n};
}

}  // namespace euii::evidence
