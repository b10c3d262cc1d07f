#include "fairsim/synthgen.hpp"

#include <cmath>
#include <limits>

namespace fairsim {

namespace {

bool all_finite(const Features& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

bool all_zero(const Features& v) { return v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0; }

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

}  // namespace

void BayesParams::validate() const {
    if (!(noise_majority >= 0.0 && noise_majority < 0.5))
        throw ConfigError("bayes.noise_majority: noise must be in [0, 0.5), got " +
                          std::to_string(noise_majority));
    if (!(noise_minority >= 0.0 && noise_minority < 0.5))
        throw ConfigError("bayes.noise_minority: noise must be in [0, 0.5), got " +
                          std::to_string(noise_minority));
    if (!all_finite(coeffs_a) || all_zero(coeffs_a))
        throw ConfigError("bayes.coeffs_a: coefficients must be finite and not all zero");
    if (!all_finite(coeffs_b) || all_zero(coeffs_b))
        throw ConfigError("bayes.coeffs_b: coefficients must be finite and not all zero");
}

void GenConfig::validate() const {
    if (n < 1) throw ConfigError("generation.n: sample count must be >= 1");
    if (!(minority_fraction > 0.0 && minority_fraction <= 0.5))
        throw ConfigError("generation.minority_fraction: r must be in (0, 0.5], got " +
                          std::to_string(minority_fraction));
    if (!std::isfinite(feature_shift))
        throw ConfigError("generation.feature_shift: shift must be finite");
    bayes.validate();
}

int bayes_label(const Features& x, Group g, const BayesParams& params) {
    const Features& b = (g == Group::A) ? params.coeffs_a : params.coeffs_b;
    const double score = b[0] * x[0] + b[1] * x[1] + b[2] * x[2];
    return score >= 0.0 ? 1 : 0;
}

Dataset sample_ground_truth(const GenConfig& cfg, Rng& rng) {
    Dataset ds;
    ds.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const Group g = rng.bernoulli(cfg.minority_fraction) ? Group::B : Group::A;
        const double mean = (g == Group::A) ? cfg.feature_shift : 0.0;
        Features x{rng.normal(mean, 1.0), rng.normal(mean, 1.0), rng.normal(mean, 1.0)};
        const auto ystar = static_cast<std::uint8_t>(bayes_label(x, g, cfg.bayes));
        const double eta =
            (g == Group::A) ? cfg.bayes.noise_majority : cfg.bayes.noise_minority;
        const auto y = static_cast<std::uint8_t>(rng.bernoulli(eta) ? 1 - ystar : ystar);
        ds.push_row(x, g, y, ystar);
    }
    return ds;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
    if (p == 0.5) return 0.0;
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (standard_normal_cdf(mid) < p ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    // One Newton step against the exact density tightens the bisection result
    // to machine precision.
    const double pdf = std::exp(-0.5 * x * x) * 0.3989422804014326779;
    if (pdf > std::numeric_limits<double>::min())
        x -= (standard_normal_cdf(x) - p) / pdf;
    return x;
}

double calibrate_feature_shift(double target_rate, const Features& coeffs) {
    if (!(target_rate > 0.0 && target_rate < 1.0))
        throw std::invalid_argument(
            "calibrate_feature_shift: target_rate must be strictly inside (0, 1)");
    const double sum = coeffs[0] + coeffs[1] + coeffs[2];
    if (sum == 0.0)
        throw std::invalid_argument(
            "calibrate_feature_shift: coefficient sum is zero, a mean shift cannot move the rate");
    const double norm =
        std::sqrt(coeffs[0] * coeffs[0] + coeffs[1] * coeffs[1] + coeffs[2] * coeffs[2]);
    return norm * normal_quantile(target_rate) / sum;
}

double bayes_tpr(double noise, double base_rate) {
    const double hit = (1.0 - noise) * base_rate;
    return hit / (hit + (1.0 - base_rate) * noise);
}

bool theorem_condition(double r, double eta, double beta) {
    return (1.0 - r) * (1.0 - 2.0 * eta) + r * (1.0 - eta) * beta > 0.0;
}

}  // namespace fairsim
