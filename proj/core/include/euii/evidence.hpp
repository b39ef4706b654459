#pragma once

namespace euii::evidence {

struct LikelihoodRatios {
    double lr_plus = 1.0;   // Pr(significant | H1) / Pr(significant | H0)
    double lr_minus = 1.0;  // Pr(nonsignificant | H1) / Pr(nonsignificant | H0)
};

struct EvidenceSummary {
    double dor = 1.0;
    double euii = 1.0;
    double n_basis = 1.0;  // sample size the DOR is normalised by
};

/// p / (1 - p). All odds conversions in the library go through this pair.
double odds(double probability);
/// o / (1 + o); infinite odds map to 1.
double probability_from_odds(double odds);

/// LR+ = power / t1e and LR- = (1 - power) / (1 - t1e).
/// Power of exactly 0 or 1 raises DegenerateEvidenceError; t1e outside
/// (0, 1) raises DomainError.
LikelihoodRatios likelihood_ratios(double power, double t1e);

/// Diagnostic odds ratio: power odds over Type-I error odds.
double dor(double power, double t1e);

/// dor^(1/n): the geometric-mean evidence contributed per experimental unit.
double euii_fixed(double dor, double n);

/// exp(log_dor / n); use when the DOR itself over- or underflows.
double euii_from_log_dor(double log_dor, double n);

/// Posterior Pr(H1) after multiplying the prior odds by lr.
double update_odds(double prior_h1, double lr);

EvidenceSummary summarize(double power, double t1e, double n);

}  // namespace euii::evidence
