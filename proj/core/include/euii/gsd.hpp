#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "euii/adaptive_euii.hpp"
#include "euii/types.hpp"

namespace euii::gsd {

enum class BoundaryFamily { pocock, obrien_fleming, haybittle_peto, custom };

std::string_view to_string(BoundaryFamily family);
/// Accepts "pocock", "obrien_fleming" (or "obf"), "haybittle_peto" (or "hp"),
/// "custom". Throws DomainError otherwise.
BoundaryFamily parse_family(std::string_view name);

/// A group-sequential design on the canonical z scale.
///
/// Nominal levels are per-look p-value thresholds: one-tail probabilities
/// for one-sided designs, two-sided p-value thresholds (both tails
/// together) for two-sided designs.
struct GsdSpec {
    std::vector<double> info_fractions;  // 0 < t_1 < ... < t_k = 1
    std::vector<double> nominal_levels;  // a_1..a_k in (0, 1)
    BoundaryFamily family = BoundaryFamily::custom;
    Sidedness sidedness = Sidedness::one;
    double n_max = 1.0;  // total sample size at the last look

    std::size_t looks() const { return info_fractions.size(); }
    /// Throws DomainError on size mismatch, non-monotone fractions or levels
    /// outside (0, 1).
    void validate() const;
    /// z critical values b_i matching the nominal levels.
    std::vector<double> critical_values() const;
    /// Sample size at each look, t_i * n_max.
    std::vector<double> look_sample_sizes() const;
};

/// Quadrature settings for the stagewise recursion.
struct GridOptions {
    int points = 2001;      // odd; composite Simpson nodes per stage
    double span_sd = 8.0;   // continuation region clipped to mean +- span_sd
};

struct StagewiseResult {
    std::vector<double> efficacy_stop_prob;
    std::vector<double> futility_stop_prob;  // all zero: no futility rule here
    double continue_mass = 0.0;              // reaches the last look without crossing
    double overall_reject = 0.0;
    double e_n_reject = 0.0;
    double e_n_accept = 0.0;
    double var_n_reject = 0.0;
    double var_n_accept = 0.0;

    double total_mass() const;
};

/// t_i = i / k.
std::vector<double> equally_spaced(std::size_t k);

/// Canonical drift at the final look: delta * sqrt(n) for one arm,
/// (delta / 2) * sqrt(n) for two equal arms with total n.
double drift_for(double delta, double n_total, Arms arms = Arms::one);

/// Per-look boundary-crossing probabilities for Z_i with
/// E[Z_i] = drift * sqrt(t_i) and Cor(Z_i, Z_j) = sqrt(t_i / t_j).
///
/// The sub-density of the not-yet-stopped statistic is carried on a
/// Simpson grid and convolved with the Gaussian increment at each look;
/// crossing masses use exact normal tails of the increment. Two-sided
/// designs cross at +-b_i and both tails are counted.
StagewiseResult crossing_probabilities(const GsdSpec& spec, double drift, const GridOptions& grid = {});

/// Nominal levels for a family. Pocock (constant bound) and O'Brien-Fleming
/// (bounds c / sqrt(t_i)) are solved so the overall Type-I error equals
/// alpha_overall. Haybittle-Peto uses a fixed interim level (0.0005 per
/// tail) and alpha_overall at the last look, so its overall error exceeds
/// alpha_overall slightly. Empty fractions mean equally spaced looks.
std::vector<double> nominal_levels(BoundaryFamily family, std::size_t k, double alpha_overall,
                                   Sidedness sided, std::span<const double> info_fractions = {});

/// Haybittle-Peto levels with an explicit interim level.
std::vector<double> haybittle_peto_levels(std::size_t k, double interim_level, double final_level);

GsdSpec make_spec(BoundaryFamily family, std::size_t k, double alpha_overall, Sidedness sided,
                  double n_max, std::span<const double> info_fractions = {});

/// Maximum sample size giving overall rejection probability `power` at
/// effect delta. Haybittle-Peto returns the fixed-design sample size.
double max_sample_size(BoundaryFamily family, std::size_t k, double alpha_overall, double power,
                       double delta, Sidedness sided, Arms arms = Arms::one);

/// Mean and variance of the terminal sample size per (hypothesis, outcome)
/// cell, from the stagewise stop masses at delta_null (H0) and delta_alt (H1).
adaptive::OutcomeCells expected_sample_sizes(const GsdSpec& spec, double delta_null, double delta_alt,
                                             Arms arms = Arms::one);

}  // namespace euii::gsd
