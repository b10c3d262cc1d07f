#include "fairsim/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairsim {

namespace {

constexpr int kDim = 7;  // intercept + 6 expanded slopes

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

double dot_aug(const double* theta, const WeightedSample& s) {
    double z = theta[0];
    for (int j = 0; j < 6; ++j) z += theta[j + 1] * s.expanded_features[j];
    return z;
}

double weighted_loglik(const double* theta, std::span<const WeightedSample> samples,
                       double weight_scale) {
    double ll = 0.0;
    for (const auto& s : samples) {
        if (s.weight == 0.0) continue;
        const double z = dot_aug(theta, s);
        const double sign = s.target ? -1.0 : 1.0;
        ll -= s.weight * weight_scale * softplus(sign * z);
    }
    return ll;
}

// Gaussian elimination with partial pivoting; returns false when the system
// is numerically singular.
bool solve_linear(double a[kDim][kDim], double b[kDim], double x[kDim]) {
    int perm[kDim];
    for (int i = 0; i < kDim; ++i) perm[i] = i;
    double scale = 0.0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) scale = std::max(scale, std::abs(a[i][j]));
    if (scale == 0.0) return false;
    const double tiny = 1e-12 * scale;

    for (int col = 0; col < kDim; ++col) {
        int pivot = col;
        for (int r = col + 1; r < kDim; ++r)
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[pivot]][col])) pivot = r;
        std::swap(perm[col], perm[pivot]);
        const double piv = a[perm[col]][col];
        if (std::abs(piv) < tiny) return false;
        for (int r = col + 1; r < kDim; ++r) {
            const double f = a[perm[r]][col] / piv;
            if (f == 0.0) continue;
            for (int c = col; c < kDim; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
            b[perm[r]] -= f * b[perm[col]];
        }
    }
    for (int row = kDim - 1; row >= 0; --row) {
        double v = b[perm[row]];
        for (int c = row + 1; c < kDim; ++c) v -= a[perm[row]][c] * x[c];
        x[row] = v / a[perm[row]][row];
    }
    for (int i = 0; i < kDim; ++i)
        if (!std::isfinite(x[i])) return false;
    return true;
}

ModelCoeffs to_model(const double* theta) {
    ModelCoeffs m;
    m.intercept = theta[0];
    for (int j = 0; j < 3; ++j) {
        m.coeffs_a[j] = theta[j + 1];
        m.coeffs_b[j] = theta[j + 4];
    }
    return m;
}

void to_theta(const ModelCoeffs& m, double* theta) {
    theta[0] = m.intercept;
    for (int j = 0; j < 3; ++j) {
        theta[j + 1] = m.coeffs_a[j];
        theta[j + 4] = m.coeffs_b[j];
    }
}

}  // namespace

ExpandedFeatures expand_features(const Features& x, Group g) {
    ExpandedFeatures e{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const int offset = (g == Group::A) ? 0 : 3;
    for (int j = 0; j < 3; ++j) e[offset + j] = x[j];
    return e;
}

FitResult fit_weighted_logreg(std::span<const WeightedSample> samples,
                              const FitSettings& settings) {
    double class_weight[2] = {0.0, 0.0};
    double total_weight = 0.0;
    for (const auto& s : samples) {
        class_weight[s.target ? 1 : 0] += s.weight;
        total_weight += s.weight;
    }
    if (class_weight[0] <= 0.0 || class_weight[1] <= 0.0)
        throw DegenerateDataError("fit_weighted_logreg: a target class has zero total weight");

    // The MLE is invariant to the scale of the weights; normalizing to total
    // weight one makes the gradient tolerance scale-free.
    const double weight_scale = 1.0 / total_weight;

    double theta[kDim] = {0, 0, 0, 0, 0, 0, 0};
    FitResult result;
    double current_ll = weighted_loglik(theta, samples, weight_scale);
    result.loglik_trace.push_back(current_ll);

    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        double grad[kDim] = {0, 0, 0, 0, 0, 0, 0};
        double info[kDim][kDim] = {};
        for (const auto& s : samples) {
            if (s.weight == 0.0) continue;
            const double w = s.weight * weight_scale;
            const double z = dot_aug(theta, s);
            const double mu = sigmoid(z);
            const double resid = w * (static_cast<double>(s.target) - mu);
            const double curv = w * mu * (1.0 - mu);
            double aug[kDim];
            aug[0] = 1.0;
            for (int j = 0; j < 6; ++j) aug[j + 1] = s.expanded_features[j];
            for (int r = 0; r < kDim; ++r) {
                grad[r] += resid * aug[r];
                const double ca = curv * aug[r];
                for (int c = r; c < kDim; ++c) info[r][c] += ca * aug[c];
            }
        }
        for (int r = 0; r < kDim; ++r)
            for (int c = 0; c < r; ++c) info[r][c] = info[c][r];

        double grad_norm = 0.0;
        for (double g : grad) grad_norm = std::max(grad_norm, std::abs(g));
        if (grad_norm < settings.gradient_tolerance) {
            result.converged = true;
            break;
        }

        double direction[kDim];
        double a_copy[kDim][kDim];
        double b_copy[kDim];
        for (int r = 0; r < kDim; ++r) {
            b_copy[r] = grad[r];
            for (int c = 0; c < kDim; ++c) a_copy[r][c] = info[r][c];
        }
        if (!solve_linear(a_copy, b_copy, direction)) {
            // Singular information matrix (e.g. an emptied group block):
            // fall back to a gradient step scaled to unit max-norm.
            for (int r = 0; r < kDim; ++r) direction[r] = grad[r] / grad_norm;
        }

        // Step halving keeps the weighted log-likelihood non-decreasing.
        double step = 1.0;
        double candidate[kDim];
        double candidate_ll = -std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int h = 0; h < 40; ++h) {
            for (int r = 0; r < kDim; ++r) {
                candidate[r] = theta[r] + step * direction[r];
                candidate[r] = std::clamp(candidate[r], -settings.coeff_clamp,
                                          settings.coeff_clamp);
            }
            candidate_ll = weighted_loglik(candidate, samples, weight_scale);
            if (candidate_ll >= current_ll) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        result.iterations = iter + 1;
        if (!accepted) break;  // no ascent direction left at this scale
        std::copy(candidate, candidate + kDim, theta);
        current_ll = candidate_ll;
        result.loglik_trace.push_back(current_ll);
    }

    result.model = to_model(theta);
    return result;
}

double weighted_loglik(const ModelCoeffs& model, std::span<const WeightedSample> samples) {
    double theta[kDim];
    to_theta(model, theta);
    return weighted_loglik(theta, samples, 1.0);
}

std::array<double, 7> weighted_loglik_gradient(const ModelCoeffs& model,
                                               std::span<const WeightedSample> samples) {
    double theta[kDim];
    to_theta(model, theta);
    std::array<double, 7> grad{};
    for (const auto& s : samples) {
        if (s.weight == 0.0) continue;
        const double resid = s.weight * (static_cast<double>(s.target) - sigmoid(dot_aug(theta, s)));
        grad[0] += resid;
        for (int j = 0; j < 6; ++j) grad[j + 1] += resid * s.expanded_features[j];
    }
    return grad;
}

double linear_score(const ModelCoeffs& model, const Features& x, Group g) {
    const Features& b = (g == Group::A) ? model.coeffs_a : model.coeffs_b;
    return model.intercept + b[0] * x[0] + b[1] * x[1] + b[2] * x[2];
}

int predict_binary(const ModelCoeffs& model, const Features& x, Group g) {
    return linear_score(model, x, g) >= 0.0 ? 1 : 0;
}

double predict_score(const ModelCoeffs& model, const Features& x, Group g) {
    return sigmoid(linear_score(model, x, g));
}

std::vector<std::uint8_t> predict_dataset(const ModelCoeffs& model, const Dataset& ds) {
    std::vector<std::uint8_t> preds(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        preds[i] = static_cast<std::uint8_t>(predict_binary(model, ds.features[i], ds.group[i]));
    return preds;
}

std::vector<double> score_dataset(const ModelCoeffs& model, const Dataset& ds) {
    std::vector<double> scores(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        scores[i] = predict_score(model, ds.features[i], ds.group[i]);
    return scores;
}

}  // namespace fairsim
