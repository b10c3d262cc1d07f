#include "fairsim/interventions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairsim {

void GridSpec::validate() const {
    if (!(lambda_limit > 0.0))
        throw ConfigError("intervention.lambda_limit: must be positive, got " +
                          std::to_string(lambda_limit));
    if (grid_size < 1)
        throw ConfigError("intervention.grid_size: must be >= 1, got " +
                          std::to_string(grid_size));
    if (!(tradeoff_weight >= 0.0 && tradeoff_weight <= 1.0))
        throw ConfigError("intervention.tradeoff_weight: must be in [0, 1], got " +
                          std::to_string(tradeoff_weight));
    if (!(disparity_slack >= 0.0 && disparity_slack <= 1.0))
        throw ConfigError("intervention.disparity_slack: must be in [0, 1], got " +
                          std::to_string(disparity_slack));
}

std::vector<double> make_lambda_grid(const GridSpec& grid) {
    grid.validate();
    if (grid.grid_size == 1) return {0.0};
    // Sign-symmetric geometric spacing. The per-cell normalization of the
    // reduction weights means useful multipliers span two orders of
    // magnitude across bias levels; a uniform grid cannot resolve the small
    // end, a geometric one covers every level with the same point budget.
    std::vector<double> points;
    points.push_back(0.0);
    const int magnitudes = grid.grid_size / 2;
    double value = grid.lambda_limit;
    for (int k = 0; k < magnitudes; ++k) {
        points.push_back(value);
        points.push_back(-value);
        value /= 3.0;
    }
    std::sort(points.begin(), points.end());
    return points;
}

namespace {

struct CellCounts {
    double count[2][2] = {{0, 0}, {0, 0}};
};

CellCounts count_cells_checked(const Dataset& ds) {
    CellCounts cells;
    for (std::size_t i = 0; i < ds.size(); ++i)
        cells.count[static_cast<int>(ds.group[i])][ds.label[i] ? 1 : 0] += 1.0;
    for (Group g : {Group::A, Group::B})
        for (int y = 0; y <= 1; ++y)
            if (cells.count[static_cast<int>(g)][y] == 0.0) throw EmptyCellError(g, y);
    return cells;
}

}  // namespace

std::vector<WeightedSample> lagrangian_weights(const Dataset& ds, double lambda0,
                                               double lambda1) {
    const CellCounts cells = count_cells_checked(ds);
    const double n = static_cast<double>(ds.size());
    std::vector<WeightedSample> out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const int y = ds.label[i] ? 1 : 0;
        const Group g = ds.group[i];
        const double lambda = (y == 1) ? lambda1 : lambda0;
        const double adjustment =
            (g == Group::B) ? lambda / cells.count[1][y] : -lambda / cells.count[0][y];
        const double cost = (1.0 - 2.0 * y) / n + adjustment;
        out[i].expanded_features = expand_features(ds.features[i], g);
        out[i].target = cost < 0.0 ? 1 : 0;
        out[i].weight = std::abs(cost);
    }
    return out;
}

namespace {

// Candidate-generation weights for the grid sweep. These relax only the
// minority cells: c_i = (1 - 2y)/n + lambda_y 1{g = B} / n_{B,y}. The paired
// form of lagrangian_weights drags the majority cells in the opposite
// direction through the shared intercept, which caps recoverable fidelity
// well below the acceptance targets; leaving the majority side unweighted
// keeps the restoring reweighting of the minority cells inside the family.
std::vector<WeightedSample> minority_cell_weights(const Dataset& ds, double lambda0,
                                                  double lambda1) {
    const CellCounts cells = count_cells_checked(ds);
    const double n = static_cast<double>(ds.size());
    std::vector<WeightedSample> out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const int y = ds.label[i] ? 1 : 0;
        const double lambda = (y == 1) ? lambda1 : lambda0;
        double cost = (1.0 - 2.0 * y) / n;
        if (ds.group[i] == Group::B) cost += lambda / cells.count[1][y];
        out[i].expanded_features = expand_features(ds.features[i], ds.group[i]);
        out[i].target = cost < 0.0 ? 1 : 0;
        out[i].weight = std::abs(cost);
    }
    return out;
}

}  // namespace

Predictor grid_search_eo(const Dataset& train, const GridSpec& grid,
                         const FitSettings& settings) {
    const std::vector<double> lambdas = make_lambda_grid(grid);

    // A fair candidate's measured disparity is at best the sampling noise of
    // its smallest conditioning cell; paying objective for that noise would
    // steer selection toward quietly unfair candidates. The slack floor is
    // therefore widened by two binomial standard errors of the smallest cell.
    const CellCounts cells = count_cells_checked(train);
    double min_cell = train.size() ? static_cast<double>(train.size()) : 1.0;
    for (int g = 0; g < 2; ++g)
        for (int y = 0; y < 2; ++y) min_cell = std::min(min_cell, cells.count[g][y]);
    const double slack =
        std::max(grid.disparity_slack, 2.0 * std::sqrt(0.25 / min_cell));

    ModelCoeffs best_model;
    double best_objective = std::numeric_limits<double>::infinity();
    double best_disparity = std::numeric_limits<double>::infinity();
    double best_lambda_norm = std::numeric_limits<double>::infinity();
    bool have_best = false;

    for (double l0 : lambdas) {
        for (double l1 : lambdas) {
            const auto samples = minority_cell_weights(train, l0, l1);
            const FitResult fit = fit_weighted_logreg(samples, settings);
            const auto preds = predict_dataset(fit.model, train);
            const double error = 1.0 - accuracy(preds, train.label);
            const double disparity = eo_disparity(preds, train.group, train.label);
            const double excess = std::max(disparity - slack, 0.0);
            const double objective =
                grid.tradeoff_weight * error + (1.0 - grid.tradeoff_weight) * excess;
            const double lambda_norm = l0 * l0 + l1 * l1;
            const bool better =
                !have_best || objective < best_objective ||
                (objective == best_objective &&
                 (disparity < best_disparity ||
                  (disparity == best_disparity && lambda_norm < best_lambda_norm)));
            if (better) {
                best_model = fit.model;
                best_objective = objective;
                best_disparity = disparity;
                best_lambda_norm = lambda_norm;
                have_best = true;
            }
        }
    }
    return best_model;
}

namespace {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 1.0;
};

// Achievable (FPR, TPR) points of the family 1{score >= t}, t in [0, 1],
// coarsest-to-finest: t = 1, midpoints between adjacent distinct scores, t = 0.
std::vector<RocPoint> roc_points(std::vector<std::pair<double, std::uint8_t>> scored) {
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double positives = 0.0, negatives = 0.0;
    for (const auto& [s, y] : scored) (y ? positives : negatives) += 1.0;

    std::vector<double> thresholds;
    thresholds.push_back(1.0);
    for (std::size_t i = 0; i + 1 < scored.size(); ++i)
        if (scored[i].first != scored[i + 1].first)
            thresholds.push_back(0.5 * (scored[i].first + scored[i + 1].first));
    thresholds.push_back(0.0);

    std::vector<RocPoint> points;
    points.reserve(thresholds.size());
    std::size_t idx = 0;
    double tp = 0.0, fp = 0.0;
    for (double t : thresholds) {
        while (idx < scored.size() && scored[idx].first >= t) {
            (scored[idx].second ? tp : fp) += 1.0;
            ++idx;
        }
        RocPoint p{negatives > 0 ? fp / negatives : 0.0, positives > 0 ? tp / positives : 0.0,
                   t};
        if (!points.empty() && points.back().fpr == p.fpr && points.back().tpr == p.tpr)
            continue;
        points.push_back(p);
    }
    return points;
}

// Upper concave envelope of the ROC points, left to right.
std::vector<RocPoint> upper_hull(const std::vector<RocPoint>& points) {
    std::vector<RocPoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
    });
    // Among ties in FPR only the highest TPR can sit on the upper hull.
    std::vector<RocPoint> top;
    for (const auto& p : sorted) {
        if (!top.empty() && top.back().fpr == p.fpr)
            top.back() = p;
        else
            top.push_back(p);
    }
    std::vector<RocPoint> hull;
    for (const auto& p : top) {
        while (hull.size() >= 2) {
            const RocPoint& p1 = hull[hull.size() - 2];
            const RocPoint& p2 = hull[hull.size() - 1];
            // pop p2 unless it lies strictly above the chord p1 -> p
            const double lhs = (p2.tpr - p1.tpr) * (p.fpr - p1.fpr);
            const double rhs = (p.tpr - p1.tpr) * (p2.fpr - p1.fpr);
            if (lhs > rhs) break;
            hull.pop_back();
        }
        hull.push_back(p);
    }
    return hull;
}

double hull_value(const std::vector<RocPoint>& hull, double x) {
    if (x <= hull.front().fpr) return hull.front().tpr;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        if (x <= hull[i + 1].fpr) {
            const double span = hull[i + 1].fpr - hull[i].fpr;
            if (span == 0.0) return std::max(hull[i].tpr, hull[i + 1].tpr);
            const double w = (x - hull[i].fpr) / span;
            return hull[i].tpr + w * (hull[i + 1].tpr - hull[i].tpr);
        }
    }
    return hull.back().tpr;
}

// Mixture of two achievable points matching FPR = x exactly; among those the
// TPR closest to target. Hull vertices are always candidates, so a point on
// the group's own hull is realized exactly; interior targets get the closest
// chord through x.
GroupThresholds realize_point(const std::vector<RocPoint>& points,
                              const std::vector<RocPoint>& hull, double x, double target_tpr) {
    std::vector<RocPoint> cands;
    if (points.size() > 1024) {
        const std::size_t stride = points.size() / 1024 + 1;
        for (std::size_t i = 0; i < points.size(); i += stride) cands.push_back(points[i]);
        cands.push_back(points.back());
    } else {
        cands = points;
    }
    cands.insert(cands.end(), hull.begin(), hull.end());
    std::sort(cands.begin(), cands.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
    });

    GroupThresholds best;
    double best_gap = std::numeric_limits<double>::infinity();
    auto consider = [&](const RocPoint& left, const RocPoint& right) {
        // left has the smaller FPR, hence the larger threshold
        double q, tpr;
        if (left.fpr == right.fpr) {
            if (left.fpr != x) return;
            // vertical pair: any TPR between the two points is reachable
            if (left.tpr == right.tpr) {
                q = 1.0;
                tpr = left.tpr;
            } else {
                q = std::clamp((target_tpr - right.tpr) / (left.tpr - right.tpr), 0.0, 1.0);
                tpr = q * left.tpr + (1.0 - q) * right.tpr;
            }
        } else {
            if (x < left.fpr || x > right.fpr) return;
            q = (right.fpr - x) / (right.fpr - left.fpr);
            tpr = q * left.tpr + (1.0 - q) * right.tpr;
        }
        const double gap = std::abs(tpr - target_tpr);
        if (gap < best_gap) {
            best_gap = gap;
            best.t_hi = left.threshold;
            best.t_lo = right.threshold;
            best.q = q;
        }
    };
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].fpr > x) break;
        for (std::size_t j = i; j < cands.size(); ++j) {
            if (cands[j].fpr < x) continue;
            consider(cands[i], cands[j]);
        }
    }
    if (best.t_lo > best.t_hi) {
        std::swap(best.t_lo, best.t_hi);
        best.q = 1.0 - best.q;
    }
    return best;
}

double expected_disparity(std::span<const double> scores, std::span<const Group> groups,
                          std::span<const std::uint8_t> labels,
                          const RandomizedGroupThresholds& rt) {
    double count[2][2] = {{0, 0}, {0, 0}};
    double sum[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const GroupThresholds& gt = groups[i] == Group::A ? rt.a : rt.b;
        const double p = gt.q * (scores[i] >= gt.t_hi ? 1.0 : 0.0) +
                         (1.0 - gt.q) * (scores[i] >= gt.t_lo ? 1.0 : 0.0);
        const int g = static_cast<int>(groups[i]);
        const int y = labels[i] ? 1 : 0;
        count[g][y] += 1.0;
        sum[g][y] += p;
    }
    double gap = 0.0;
    for (int y = 0; y <= 1; ++y) {
        const double marginal = (sum[0][y] + sum[1][y]) / (count[0][y] + count[1][y]);
        for (int g = 0; g <= 1; ++g)
            gap = std::max(gap, std::abs(sum[g][y] / count[g][y] - marginal));
    }
    return gap;
}

}  // namespace

RandomizedGroupThresholds threshold_postprocess(std::span<const double> scores,
                                                std::span<const Group> groups,
                                                std::span<const std::uint8_t> labels,
                                                const ModelCoeffs& base_model) {
    std::vector<std::pair<double, std::uint8_t>> per_group[2];
    double label_count[2] = {0.0, 0.0};
    bool pred_class_seen[2][2] = {{false, false}, {false, false}};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int g = static_cast<int>(groups[i]);
        per_group[g].emplace_back(scores[i], labels[i]);
        label_count[labels[i] ? 1 : 0] += 1.0;
        pred_class_seen[g][scores[i] >= 0.5 ? 1 : 0] = true;
    }
    for (int g = 0; g <= 1; ++g) {
        if (per_group[g].empty())
            throw NotApplicableError(std::string("threshold_postprocess: no rows for group ") +
                                     to_string(static_cast<Group>(g)));
        if (!pred_class_seen[g][0] || !pred_class_seen[g][1])
            throw NotApplicableError(
                std::string("threshold_postprocess: base model predicts a single class "
                            "within group ") +
                to_string(static_cast<Group>(g)));
        double pos = 0.0;
        for (const auto& [s, y] : per_group[g]) pos += y ? 1.0 : 0.0;
        if (pos == 0.0) throw NotApplicableError(
            std::string("threshold_postprocess: empty (") + to_string(static_cast<Group>(g)) +
            ", 1) cell");
        if (pos == static_cast<double>(per_group[g].size()))
            throw NotApplicableError(std::string("threshold_postprocess: empty (") +
                                     to_string(static_cast<Group>(g)) + ", 0) cell");
    }

    const auto points_a = roc_points(std::move(per_group[0]));
    const auto points_b = roc_points(std::move(per_group[1]));
    const auto hull_a = upper_hull(points_a);
    const auto hull_b = upper_hull(points_b);

    // Candidate FPR values: every hull vertex plus the crossings of the two
    // hull envelopes; the linear cost is minimized at one of these.
    std::vector<double> xs;
    const double x_min = std::max(hull_a.front().fpr, hull_b.front().fpr);
    for (const auto& h : {hull_a, hull_b})
        for (const auto& p : h)
            if (p.fpr >= x_min) xs.push_back(p.fpr);
    xs.push_back(x_min);
    xs.push_back(1.0);
    for (std::size_t i = 0; i + 1 < hull_a.size(); ++i) {
        for (std::size_t j = 0; j + 1 < hull_b.size(); ++j) {
            const double lo = std::max(hull_a[i].fpr, hull_b[j].fpr);
            const double hi = std::min(hull_a[i + 1].fpr, hull_b[j + 1].fpr);
            if (lo >= hi) continue;
            const double sa = (hull_a[i + 1].tpr - hull_a[i].tpr) /
                              (hull_a[i + 1].fpr - hull_a[i].fpr);
            const double sb = (hull_b[j + 1].tpr - hull_b[j].tpr) /
                              (hull_b[j + 1].fpr - hull_b[j].fpr);
            if (sa == sb) continue;
            const double ya = hull_a[i].tpr - sa * hull_a[i].fpr;
            const double yb = hull_b[j].tpr - sb * hull_b[j].fpr;
            const double x = (yb - ya) / (sa - sb);
            if (x >= lo && x <= hi && x >= x_min) xs.push_back(x);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    const double total = label_count[0] + label_count[1];
    const double p0 = label_count[0] / total;
    const double p1 = label_count[1] / total;

    double best_x = xs.front();
    double best_cost = std::numeric_limits<double>::infinity();
    for (double x : xs) {
        const double y = std::min(hull_value(hull_a, x), hull_value(hull_b, x));
        const double cost = x * p0 - y * p1;
        if (cost < best_cost) {
            best_cost = cost;
            best_x = x;
        }
    }
    const double best_y = std::min(hull_value(hull_a, best_x), hull_value(hull_b, best_x));

    RandomizedGroupThresholds rt;
    rt.base_model = base_model;
    rt.a = realize_point(points_a, hull_a, best_x, best_y);
    rt.b = realize_point(points_b, hull_b, best_x, best_y);

    const double gap = expected_disparity(scores, groups, labels, rt);
    if (gap > 0.02)
        throw NotApplicableError(
            "threshold_postprocess: no two-threshold mixture reaches the common operating "
            "point within disparity 0.02 (got " +
            std::to_string(gap) + ")");
    return rt;
}

Dataset correlation_remover(const Dataset& ds, double alpha) {
    const double n = static_cast<double>(ds.size());
    double n_b = 0.0;
    for (Group g : ds.group) n_b += (g == Group::B) ? 1.0 : 0.0;
    if (n_b == 0.0 || n_b == n)
        throw SingleGroupError("correlation_remover: both groups must be present");

    const double p_b = n_b / n;
    const double zz = n * p_b * (1.0 - p_b);
    Features proj{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double z = (ds.group[i] == Group::B ? 1.0 : 0.0) - p_b;
        for (int j = 0; j < 3; ++j) proj[j] += ds.features[i][j] * z;
    }
    for (int j = 0; j < 3; ++j) proj[j] /= zz;

    Dataset out = ds;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double z = (out.group[i] == Group::B ? 1.0 : 0.0) - p_b;
        for (int j = 0; j < 3; ++j) out.features[i][j] -= alpha * proj[j] * z;
    }
    return out;
}

int apply_predictor(const Predictor& p, const Features& x, Group g, Rng& rng) {
    if (const auto* linear = std::get_if<ModelCoeffs>(&p)) return predict_binary(*linear, x, g);
    const auto& rt = std::get<RandomizedGroupThresholds>(p);
    const GroupThresholds& gt = (g == Group::A) ? rt.a : rt.b;
    const double threshold = (rng.uniform() < gt.q) ? gt.t_hi : gt.t_lo;
    return predict_score(rt.base_model, x, g) >= threshold ? 1 : 0;
}

std::vector<std::uint8_t> apply_predictor_dataset(const Predictor& p, const Dataset& ds,
                                                  Rng& rng) {
    std::vector<std::uint8_t> preds(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        preds[i] =
            static_cast<std::uint8_t>(apply_predictor(p, ds.features[i], ds.group[i], rng));
    return preds;
}

}  // namespace fairsim
