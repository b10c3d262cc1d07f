#pragma once

#include <string>
#include <vector>

#include "fairsim/harness.hpp"

namespace fairsim {

/// Standalone SVG line chart of test-split aggregates for one metric:
/// x = sweep level, y = mean with one-standard-deviation error bars, one
/// series per (model variant, group). Fidelity charts show the biased and
/// intervened models; accuracy and disparity charts additionally show the
/// data-driven reference model. Output bytes are a pure function of the
/// inputs.
std::string figure_svg_text(const std::string& experiment,
                            const std::vector<AggregateRecord>& aggregates, MetricName metric,
                            const std::string& x_label = "bias level");

void emit_figure(const std::string& experiment,
                 const std::vector<AggregateRecord>& aggregates, MetricName metric,
                 const std::string& path, const std::string& x_label = "bias level");

}  // namespace fairsim
