#pragma once

#include "fairsim/rng.hpp"
#include "fairsim/types.hpp"

namespace fairsim {

/// Pair of group-specific linear labelers plus per-group label-flip rates.
/// Defaults are the fixed reference labelers used by every experiment preset.
struct BayesParams {
    Features coeffs_a{-0.7, 0.5, 1.5};
    Features coeffs_b{0.5, -0.2, 0.1};
    double noise_majority = 0.4;
    double noise_minority = 0.4;

    void validate() const;  // throws ConfigError on violation
};

struct GenConfig {
    std::size_t n = 0;               // rows per generated split
    double minority_fraction = 0.2;  // r in (0, 0.5]
    double feature_shift = 0.0;      // mean of every majority-group coordinate
    BayesParams bayes;

    void validate() const;
};

/// Noiseless labeler output: 1 iff the group's linear score is >= 0.
/// Exact zero ties predict 1 (a measure-zero event under continuous features,
/// pinned for determinism).
int bayes_label(const Features& x, Group g, const BayesParams& params);

/// Draws one dataset: group membership Bernoulli(r), minority features are
/// standard normal, majority features normal with mean `feature_shift`;
/// observed labels flip the labeler output at the group's noise rate.
Dataset sample_ground_truth(const GenConfig& cfg, Rng& rng);

/// Standard normal quantile, computed by inverting Phi via erfc bisection
/// plus one Newton polish. Requires p in (0, 1).
double normal_quantile(double p);

/// Majority feature mean d with P(b . x >= 0) = target_rate for x_i ~ N(d, 1):
/// d = ||b|| * Phi^-1(target_rate) / sum(b). Rejects target rates {0, 1} and
/// coefficient vectors whose components sum to zero.
double calibrate_feature_shift(double target_rate, const Features& coeffs);

/// True positive rate of the generating labeler on noisy unbiased data:
/// (1 - eta) p / (p (1 - eta) + (1 - p) eta).
double bayes_tpr(double noise, double base_rate);

/// Recovery precondition (1 - r)(1 - 2 eta) + r (1 - eta) beta > 0.
bool theorem_condition(double r, double eta, double beta);

}  // namespace fairsim
