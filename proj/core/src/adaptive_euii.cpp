#include "euii/adaptive_euii.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "euii/errors.hpp"

namespace euii::adaptive {
namespace {

struct Moments {
    double mean;
    double var;
};

// Two-component mixture with weight w on the H1 component.
Moments mix(const Cell& h0, const Cell& h1, double w, const char* label)
{
    if (h1.empty && w > 0.0) {
        throw DataError(std::string("empty H1 ") + label + " cell with non-zero posterior weight");
    }
    if (h0.empty && w < 1.0) {
        throw DataError(std::string("empty H0 ") + label + " cell with non-zero posterior weight");
    }
    if (h0.empty) {
        return {h1.mean_n, h1.var_n};
    }
    if (h1.empty) {
        return {h0.mean_n, h0.var_n};
    }
    const double mean = (1.0 - w) * h0.mean_n + w * h1.mean_n;
    const double d0 = h0.mean_n - mean;
    const double d1 = h1.mean_n - mean;
    const double var = (1.0 - w) * h0.var_n + w * h1.var_n + (1.0 - w) * d0 * d0 + w * d1 * d1;
    return {mean, var};
}

}  // namespace

const Cell& OutcomeCells::at(Hypothesis h, Outcome o) const
{
    if (h == Hypothesis::h0) {
        return o == Outcome::significant ? h0_sig : h0_nonsig;
    }
    return o == Outcome::significant ? h1_sig : h1_nonsig;
}

Cell& OutcomeCells::at(Hypothesis h, Outcome o)
{
    return const_cast<Cell&>(std::as_const(*this).at(h, o));
}

double MixtureMoments::cv_plus() const
{
    return std::sqrt(var_plus) / mean_plus;
}

double MixtureMoments::cv_minus() const
{
    return std::sqrt(var_minus) / mean_minus;
}

PosteriorWeights posterior_weights(double prior_h1, double lr_plus, double dor)
{
    if (!(prior_h1 >= 0.0 && prior_h1 < 1.0)) {
        throw DomainError("posterior_weights: prior must lie in [0, 1)");
    }
    if (!(dor > 0.0)) {
        throw DomainError("posterior_weights: DOR must be positive");
    }
    const double sig = evidence::update_odds(prior_h1, lr_plus);
    // odds(H1 | nonsig) = odds(H1 | sig) / DOR
    const double nonsig = sig == 1.0 ? 1.0 : evidence::probability_from_odds(evidence::odds(sig) / dor);
    return {sig, nonsig};
}

MixtureMoments mixture_moments(const OutcomeCells& cells, const PosteriorWeights& weights)
{
    const Moments plus = mix(cells.h0_sig, cells.h1_sig, weights.h1_given_sig, "significant");
    const Moments minus = mix(cells.h0_nonsig, cells.h1_nonsig, weights.h1_given_nonsig, "nonsignificant");
    return {plus.mean, plus.var, minus.mean, minus.var};
}

AdaptiveEuii euii_adaptive(const evidence::LikelihoodRatios& lr, const MixtureMoments& moments)
{
    if (!(moments.mean_plus > 0.0 && moments.mean_minus > 0.0)) {
        throw DomainError("euii_adaptive: expected sample sizes must be positive");
    }
    const double log_plus = std::log(lr.lr_plus);
    const double log_minus = std::log(lr.lr_minus);
    const double cv_plus = moments.cv_plus();
    const double cv_minus = moments.cv_minus();

    AdaptiveEuii out;
    out.e_n_plus = moments.mean_plus;
    out.e_n_minus = moments.mean_minus;
    out.cv_n_plus = cv_plus;
    out.cv_n_minus = cv_minus;
    out.euii_first = std::exp(log_plus / moments.mean_plus - log_minus / moments.mean_minus);
    out.euii_second = std::exp(log_plus * (1.0 + cv_plus * cv_plus) / moments.mean_plus
                               - log_minus * (1.0 + cv_minus * cv_minus) / moments.mean_minus);
    return out;
}

AdaptiveEuii assess(double power, double t1e, const OutcomeCells& cells, double prior_h1)
{
    const auto lr = evidence::likelihood_ratios(power, t1e);
    const double d = evidence::dor(power, t1e);
    const auto weights = posterior_weights(prior_h1, lr.lr_plus, d);
    auto out = euii_adaptive(lr, mixture_moments(cells, weights));
    out.pr_h1_given_sig = weights.h1_given_sig;
    out.pr_h1_given_nonsig = weights.h1_given_nonsig;
    return out;
}

}  // namespace euii::adaptive
