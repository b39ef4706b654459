#pragma once

#include <optional>

#include "euii/types.hpp"

namespace euii::fixed_design {

struct Allocation {
    double n1 = 0.0;
    double n2 = 0.0;
};

/// One fixed-sample design. Sample sizes are real-valued and never rounded.
struct DesignPoint {
    double delta = 0.0;  // standardised effect size
    Arms arms = Arms::one;
    double n_total = 0.0;  // across both arms for two-arm designs
    std::optional<Allocation> allocation;  // two arms only; equal split if empty
    double alpha = 0.05;
    Sidedness sidedness = Sidedness::two;
    TestFamily test = TestFamily::z;

    /// Throws DomainError when the invariants do not hold.
    void validate() const;

    double n1() const;
    double n2() const;
    /// n for one arm, n1 * n2 / (n1 + n2) for two arms; drift = delta * sqrt(.)
    double information() const;
    double drift() const;
    /// n - 1 (one arm) or n - 2 (two arms, pooled variance).
    double degrees_of_freedom() const;
};

/// Unrounded sample size (u + v)^2 / delta^2 for power 1 - beta; four times
/// that for two equal arms (total over both arms).
double required_n(double delta, double alpha, double beta, Arms arms, Sidedness sided);

/// Sample size at which power_t reaches 1 - beta (unrounded).
double required_n_t(double delta, double alpha, double beta, Arms arms, Sidedness sided);

/// Power of the z-test. The opposite rejection tail is neglected, so at
/// delta = 0 this returns the one-tail level.
double power_z(const DesignPoint& point);

/// Phi(delta * sqrt(n1 n2 / (n1 + n2)) - z) for a two-arm z-test.
double power_z_unequal(double delta, double n1, double n2, double alpha, Sidedness sided);

/// Power of the t-test via the noncentral t, one-tail convention.
double power_t(const DesignPoint& point);

/// Exact rejection probability of the t-test, counting both rejection
/// tails for two-sided tests. This is what a simulation estimates.
double rejection_probability_t(const DesignPoint& point);

/// Limit of the EUII as n grows: exp(delta^2 / 2) for one arm,
/// exp(delta^2 / 8) for two equal arms.
double euii_asymptote(double delta, Arms arms);

struct Evaluation {
    double power = 0.0;
    double t1e = 0.0;
    double log_dor = 0.0;
    double dor = 1.0;  // may be +inf for very large n; log_dor stays finite
    double euii = 1.0;
};

/// Power, DOR and EUII of a design, with the odds computed on the log scale
/// so that n in the thousands does not underflow.
Evaluation evaluate(const DesignPoint& point);

}  // namespace euii::fixed_design
