#pragma once

#include <cstdint>
#include <span>

#include "fairsim/types.hpp"

namespace fairsim {

enum class DisparityMode { Odds, Opportunity };

/// Mean agreement between predictions and labels.
double accuracy(std::span<const std::uint8_t> preds, std::span<const std::uint8_t> labels);

/// Finite-sample Equalized Odds violation:
///   max over (g, y) of |mean(pred | g, y) - mean(pred | y)|,
/// with Opportunity mode restricting the max to y = 1. Throws EmptyCellError
/// naming the first missing (group, label) cell the mode needs.
double eo_disparity(std::span<const std::uint8_t> preds, std::span<const Group> groups,
                    std::span<const std::uint8_t> labels,
                    DisparityMode mode = DisparityMode::Odds);

/// Same maximum restricted to one group's conditioning cells.
double eo_disparity_group(std::span<const std::uint8_t> preds, std::span<const Group> groups,
                          std::span<const std::uint8_t> labels, Group g,
                          DisparityMode mode = DisparityMode::Odds);

/// Fraction of positions where two prediction vectors agree.
double fidelity(std::span<const std::uint8_t> preds1, std::span<const std::uint8_t> preds2);

struct GroupedValue {
    double all = 0.0;
    double group_a = 0.0;
    double group_b = 0.0;
};

/// Accuracy, disparity and agreement with a reference predictor, overall and
/// per group. Overall accuracy/fidelity satisfy the group-mixture identity.
struct MetricReport {
    GroupedValue accuracy;
    GroupedValue eo_disparity;
    GroupedValue fidelity_to_bayes;
};

MetricReport make_metric_report(std::span<const std::uint8_t> preds,
                                std::span<const Group> groups,
                                std::span<const std::uint8_t> labels,
                                std::span<const std::uint8_t> bayes_reference);

}  // namespace fairsim
