#include "fairsim/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace fairsim {

namespace {

struct CellMeans {
    // counts and prediction sums indexed by [group][label] plus marginals by label
    double count[2][2] = {{0, 0}, {0, 0}};
    double sum[2][2] = {{0, 0}, {0, 0}};
    double marginal_count[2] = {0, 0};
    double marginal_sum[2] = {0, 0};
};

CellMeans tally(std::span<const std::uint8_t> preds, std::span<const Group> groups,
                std::span<const std::uint8_t> labels) {
    assert(preds.size() == groups.size() && preds.size() == labels.size());
    CellMeans m;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const int g = static_cast<int>(groups[i]);
        const int y = labels[i] ? 1 : 0;
        const double p = preds[i] ? 1.0 : 0.0;
        m.count[g][y] += 1.0;
        m.sum[g][y] += p;
        m.marginal_count[y] += 1.0;
        m.marginal_sum[y] += p;
    }
    return m;
}

double max_gap(const CellMeans& m, Group g, DisparityMode mode) {
    const int gi = static_cast<int>(g);
    const int y_first = (mode == DisparityMode::Opportunity) ? 1 : 0;
    double gap = 0.0;
    for (int y = y_first; y <= 1; ++y) {
        if (m.count[gi][y] == 0.0) throw EmptyCellError(g, y);
        const double cell_mean = m.sum[gi][y] / m.count[gi][y];
        const double marginal_mean = m.marginal_sum[y] / m.marginal_count[y];
        gap = std::max(gap, std::abs(cell_mean - marginal_mean));
    }
    return gap;
}

}  // namespace

double accuracy(std::span<const std::uint8_t> preds, std::span<const std::uint8_t> labels) {
    assert(preds.size() == labels.size());
    if (preds.empty()) return 0.0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        agree += ((preds[i] != 0) == (labels[i] != 0)) ? 1 : 0;
    return static_cast<double>(agree) / static_cast<double>(preds.size());
}

double eo_disparity(std::span<const std::uint8_t> preds, std::span<const Group> groups,
                    std::span<const std::uint8_t> labels, DisparityMode mode) {
    const CellMeans m = tally(preds, groups, labels);
    return std::max(max_gap(m, Group::A, mode), max_gap(m, Group::B, mode));
}

double eo_disparity_group(std::span<const std::uint8_t> preds, std::span<const Group> groups,
                          std::span<const std::uint8_t> labels, Group g, DisparityMode mode) {
    const CellMeans m = tally(preds, groups, labels);
    return max_gap(m, g, mode);
}

double fidelity(std::span<const std::uint8_t> preds1, std::span<const std::uint8_t> preds2) {
    return accuracy(preds1, preds2);
}

namespace {

GroupedValue grouped_agreement(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                               std::span<const Group> groups) {
    std::size_t n[2] = {0, 0}, agree[2] = {0, 0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int g = static_cast<int>(groups[i]);
        n[g] += 1;
        agree[g] += ((a[i] != 0) == (b[i] != 0)) ? 1 : 0;
    }
    GroupedValue v;
    v.group_a = n[0] ? static_cast<double>(agree[0]) / static_cast<double>(n[0]) : 0.0;
    v.group_b = n[1] ? static_cast<double>(agree[1]) / static_cast<double>(n[1]) : 0.0;
    v.all = a.empty() ? 0.0
                      : static_cast<double>(agree[0] + agree[1]) / static_cast<double>(a.size());
    return v;
}

}  // namespace

MetricReport make_metric_report(std::span<const std::uint8_t> preds,
                                std::span<const Group> groups,
                                std::span<const std::uint8_t> labels,
                                std::span<const std::uint8_t> bayes_reference) {
    MetricReport r;
    r.accuracy = grouped_agreement(preds, labels, groups);
    r.fidelity_to_bayes = grouped_agreement(preds, bayes_reference, groups);
    r.eo_disparity.group_a = eo_disparity_group(preds, groups, labels, Group::A);
    r.eo_disparity.group_b = eo_disparity_group(preds, groups, labels, Group::B);
    r.eo_disparity.all = std::max(r.eo_disparity.group_a, r.eo_disparity.group_b);
    return r;
}

}  // namespace fairsim
