#pragma once

#include <cstdint>

#include "euii/evidence.hpp"

namespace euii::adaptive {

enum class Hypothesis { h0, h1 };
enum class Outcome { significant, nonsignificant };

/// Distribution summary of the terminal sample size N within one
/// (hypothesis, outcome) cell.
struct Cell {
    double mean_n = 0.0;
    double var_n = 0.0;
    double mass = 0.0;       // Pr(outcome | hypothesis)
    std::uint64_t count = 0;  // simulated replications in the cell; 0 for analytic cells
    bool empty = true;
};

/// The 2x2 table of sample-size distributions, hypothesis x test outcome.
struct OutcomeCells {
    Cell h0_sig;
    Cell h0_nonsig;
    Cell h1_sig;
    Cell h1_nonsig;

    const Cell& at(Hypothesis h, Outcome o) const;
    Cell& at(Hypothesis h, Outcome o);
};

struct PosteriorWeights {
    double h1_given_sig = 0.0;
    double h1_given_nonsig = 0.0;
};

struct MixtureMoments {
    double mean_plus = 0.0;
    double var_plus = 0.0;
    double mean_minus = 0.0;
    double var_minus = 0.0;

    double cv_plus() const;
    double cv_minus() const;
};

struct AdaptiveEuii {
    double euii_first = 1.0;
    double euii_second = 1.0;
    double e_n_plus = 0.0;
    double e_n_minus = 0.0;
    double cv_n_plus = 0.0;
    double cv_n_minus = 0.0;
    double pr_h1_given_sig = 0.0;
    double pr_h1_given_nonsig = 0.0;
};

/// Pr(H1 | significant) from the prior and LR+, and Pr(H1 | nonsignificant)
/// from the former divided by the DOR on the odds scale.
PosteriorWeights posterior_weights(double prior_h1, double lr_plus, double dor);

/// Posterior-weighted mean and law-of-total-variance variance of N for the
/// significant (+) and nonsignificant (-) outcomes. An empty cell with
/// non-zero posterior weight raises DataError.
MixtureMoments mixture_moments(const OutcomeCells& cells, const PosteriorWeights& weights);

/// First-order EUII normalises log LR+ by E(N+) and log LR- by E(N-);
/// the second-order version scales both exponents by (1 + CV^2).
AdaptiveEuii euii_adaptive(const evidence::LikelihoodRatios& lr, const MixtureMoments& moments);

/// Convenience composition for one assumed Pr(H1).
AdaptiveEuii assess(double power, double t1e, const OutcomeCells& cells, double prior_h1);

}  // namespace euii::adaptive
