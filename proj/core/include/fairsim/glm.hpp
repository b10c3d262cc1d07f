#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairsim/types.hpp"

namespace fairsim {

/// The 7-parameter group-expanded logistic model: shared intercept plus one
/// 3-vector of slopes per group.
struct ModelCoeffs {
    double intercept = 0.0;
    Features coeffs_a{0.0, 0.0, 0.0};
    Features coeffs_b{0.0, 0.0, 0.0};
};

inline bool operator==(const ModelCoeffs& a, const ModelCoeffs& b) {
    return a.intercept == b.intercept && a.coeffs_a == b.coeffs_a && a.coeffs_b == b.coeffs_b;
}

using ExpandedFeatures = std::array<double, 6>;

struct WeightedSample {
    ExpandedFeatures expanded_features{};
    std::uint8_t target = 0;
    double weight = 0.0;
};

struct FitSettings {
    double gradient_tolerance = 1e-8;  // max-norm of the weighted gradient
    int max_iterations = 100;
    double coeff_clamp = 30.0;  // max-norm bound, reached only on separable data
};

struct FitResult {
    ModelCoeffs model;
    bool converged = false;
    int iterations = 0;
    std::vector<double> loglik_trace;  // weighted log-likelihood per accepted step
};

/// Group indicator absorbed into the feature vector: group A occupies the
/// first block, group B the second, the other block is zero.
ExpandedFeatures expand_features(const Features& x, Group g);

/// Unpenalized weighted maximum likelihood for the 7-parameter model.
/// Newton-Raphson with step halving; if the Hessian is singular (an emptied
/// group cell zeroes a block) the step falls back to scaled gradient ascent.
/// Throws DegenerateDataError when a target class has zero total weight.
FitResult fit_weighted_logreg(std::span<const WeightedSample> samples,
                              const FitSettings& settings = {});

/// Weighted Bernoulli log-likelihood of the model on raw (unnormalized)
/// weights, and its analytic gradient ordered (intercept, a0..a2, b0..b2).
double weighted_loglik(const ModelCoeffs& model, std::span<const WeightedSample> samples);
std::array<double, 7> weighted_loglik_gradient(const ModelCoeffs& model,
                                               std::span<const WeightedSample> samples);

double linear_score(const ModelCoeffs& model, const Features& x, Group g);

/// 1 iff the linear score is >= 0 (same tie-break as the generating labeler).
int predict_binary(const ModelCoeffs& model, const Features& x, Group g);

/// Logistic sigmoid of the linear score.
double predict_score(const ModelCoeffs& model, const Features& x, Group g);

/// Binary predictions for a whole dataset.
std::vector<std::uint8_t> predict_dataset(const ModelCoeffs& model, const Dataset& ds);
std::vector<double> score_dataset(const ModelCoeffs& model, const Dataset& ds);

}  // namespace fairsim
