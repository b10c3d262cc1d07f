#pragma once

#include <variant>
#include <vector>

#include "fairsim/glm.hpp"
#include "fairsim/metrics.hpp"
#include "fairsim/rng.hpp"
#include "fairsim/types.hpp"

namespace fairsim {

/// Multiplier grid and candidate-selection weights for the in-processing
/// reduction.
struct GridSpec {
    double lambda_limit = 2.0;     // grid spans [-limit, limit] per axis
    int grid_size = 10;            // points per axis including the origin
    double tradeoff_weight = 0.5;  // objective = w * error + (1 - w) * excess disparity
    // Training disparities below this slack count as zero in the selection
    // objective; the finite-sample disparity of a fair candidate on a
    // decimated cell is noise of about this size, and 0.02 is also the
    // certification bound of the post-processor.
    double disparity_slack = 0.02;

    void validate() const;
};

/// Group-specific two-threshold mixture: use t_hi with probability q,
/// otherwise t_lo. Predicts 1 iff the base model score is >= the drawn
/// threshold.
struct GroupThresholds {
    double t_lo = 0.5;
    double t_hi = 0.5;
    double q = 0.0;
};

struct RandomizedGroupThresholds {
    GroupThresholds a;
    GroupThresholds b;
    ModelCoeffs base_model;
};

using Predictor = std::variant<ModelCoeffs, RandomizedGroupThresholds>;

/// One-axis multiplier grid: zero plus sign-symmetric geometrically spaced
/// magnitudes down from `lambda_limit` (ratio 3). The grid always contains 0
/// so the unconstrained candidate stays in the search set; a single-point
/// grid is {0}.
std::vector<double> make_lambda_grid(const GridSpec& grid);

/// Per-example signed cost of predicting 1 for the Lagrangian
///   error + l0 * gap_0 + l1 * gap_1,
/// where gap_y is the minority-minus-majority mean prediction difference in
/// label cell y. Emits target 1{cost < 0} with weight |cost|. Throws
/// EmptyCellError if some (group, label) cell is empty.
std::vector<WeightedSample> lagrangian_weights(const Dataset& ds, double lambda0,
                                               double lambda1);

/// Fits one reweighted model per multiplier pair (a per-label relaxation of
/// the minority conditioning cells) and returns the candidate minimizing
/// tradeoff_weight * training error + (1 - w) * slack-excess training
/// disparity, ties broken by smaller disparity then smaller |lambda|.
Predictor grid_search_eo(const Dataset& train, const GridSpec& grid,
                         const FitSettings& settings = {});

/// Derives group-specific randomized thresholds equalizing the empirical
/// (FPR, TPR) operating points across groups at minimal expected weighted
/// error, following the ROC convex hull construction. Throws
/// NotApplicableError when the base model does not emit both classes within
/// each group, when a (group, label) cell is empty, or when no two-threshold
/// mixture keeps the calibration disparity within 0.02.
RandomizedGroupThresholds threshold_postprocess(std::span<const double> scores,
                                                std::span<const Group> groups,
                                                std::span<const std::uint8_t> labels,
                                                const ModelCoeffs& base_model);

/// Removes a fraction alpha of each feature column's projection onto the
/// centered group indicator; alpha = 1 leaves zero sample covariance between
/// every feature and group membership.
Dataset correlation_remover(const Dataset& ds, double alpha);

/// Linear predictors threshold deterministically; randomized-threshold
/// predictors draw the mixture component from the given stream.
int apply_predictor(const Predictor& p, const Features& x, Group g, Rng& rng);

std::vector<std::uint8_t> apply_predictor_dataset(const Predictor& p, const Dataset& ds,
                                                  Rng& rng);

}  // namespace fairsim
