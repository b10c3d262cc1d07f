#include <cmath>

#include "doctest.h"
#include "fairsim/glm.hpp"
#include "fairsim/rng.hpp"
#include "fairsim/synthgen.hpp"

using namespace fairsim;

namespace {

std::vector<WeightedSample> random_samples(std::size_t n, Rng& rng) {
    std::vector<WeightedSample> samples(n);
    for (auto& s : samples) {
        const Group g = rng.bernoulli(0.4) ? Group::B : Group::A;
        s.expanded_features =
            expand_features({rng.normal(), rng.normal(), rng.normal()}, g);
        s.target = rng.bernoulli(0.5) ? 1 : 0;
        s.weight = rng.bernoulli(0.1) ? 0.0 : rng.uniform() + 0.1;
    }
    return samples;
}

ModelCoeffs random_model(Rng& rng) {
    ModelCoeffs m;
    m.intercept = rng.normal();
    for (int j = 0; j < 3; ++j) {
        m.coeffs_a[j] = rng.normal();
        m.coeffs_b[j] = rng.normal();
    }
    return m;
}

}  // namespace

TEST_CASE("expand_features places the block by group") {
    CHECK(expand_features({1, 2, 3}, Group::A) == ExpandedFeatures{1, 2, 3, 0, 0, 0});
    CHECK(expand_features({1, 2, 3}, Group::B) == ExpandedFeatures{0, 0, 0, 1, 2, 3});
    CHECK(expand_features({0, 0, 0}, Group::A) == ExpandedFeatures{0, 0, 0, 0, 0, 0});
}

TEST_CASE("exactly one block of an expanded vector is populated") {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const Features x{rng.normal() + 1.0, rng.normal() + 1.0, rng.normal() + 1.0};
        const Group g = rng.bernoulli(0.5) ? Group::A : Group::B;
        const auto e = expand_features(x, g);
        const bool a_zero = e[0] == 0 && e[1] == 0 && e[2] == 0;
        const bool b_zero = e[3] == 0 && e[4] == 0 && e[5] == 0;
        CHECK(a_zero != b_zero);
    }
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(42);
    for (int trial = 0; trial < 8; ++trial) {
        const auto samples = random_samples(40, rng);
        const ModelCoeffs at = random_model(rng);
        const auto grad = weighted_loglik_gradient(at, samples);
        const double h = 1e-5;
        for (int j = 0; j < 7; ++j) {
            ModelCoeffs lo = at, hi = at;
            double* lo_j = j == 0 ? &lo.intercept
                                  : (j <= 3 ? &lo.coeffs_a[j - 1] : &lo.coeffs_b[j - 4]);
            double* hi_j = j == 0 ? &hi.intercept
                                  : (j <= 3 ? &hi.coeffs_a[j - 1] : &hi.coeffs_b[j - 4]);
            *lo_j -= h;
            *hi_j += h;
            const double fd =
                (weighted_loglik(hi, samples) - weighted_loglik(lo, samples)) / (2 * h);
            const double scale = std::max({1.0, std::abs(fd), std::abs(grad[j])});
            REQUIRE(std::abs(grad[j] - fd) / scale <= 1e-6);
        }
    }
}

TEST_CASE("intercept-only maximum likelihood is the log odds") {
    // all-zero features reduce the model to its intercept; 75% positives
    std::vector<WeightedSample> samples(8);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].expanded_features = {0, 0, 0, 0, 0, 0};
        samples[i].target = i < 6 ? 1 : 0;
        samples[i].weight = 1.0;
    }
    const FitResult fit = fit_weighted_logreg(samples);
    CHECK(fit.converged);
    CHECK(fit.model.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-6));
    for (int j = 0; j < 3; ++j) {
        CHECK(fit.model.coeffs_a[j] == 0.0);
        CHECK(fit.model.coeffs_b[j] == 0.0);
    }
}

TEST_CASE("symmetric data fits a zero intercept") {
    Rng rng(3);
    std::vector<WeightedSample> samples;
    for (int i = 0; i < 50; ++i) {
        const Features x{rng.normal(), rng.normal(), rng.normal()};
        const Features nx{-x[0], -x[1], -x[2]};
        samples.push_back({expand_features(x, Group::A), 1, 1.0});
        samples.push_back({expand_features(nx, Group::A), 0, 1.0});
    }
    const FitResult fit = fit_weighted_logreg(samples);
    CHECK(std::abs(fit.model.intercept) <= 1e-6);
}

TEST_CASE("doubling every weight leaves the fit bit-identical") {
    Rng rng(4);
    auto samples = random_samples(200, rng);
    auto doubled = samples;
    for (auto& s : doubled) s.weight *= 2.0;
    const FitResult a = fit_weighted_logreg(samples);
    const FitResult b = fit_weighted_logreg(doubled);
    CHECK(a.model == b.model);
}

TEST_CASE("accepted iterations never decrease the objective") {
    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        auto samples = random_samples(120, rng);
        const FitResult fit = fit_weighted_logreg(samples);
        REQUIRE(fit.loglik_trace.size() >= 1);
        for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
            REQUIRE(fit.loglik_trace[i] >= fit.loglik_trace[i - 1]);
    }
}

TEST_CASE("single-class data is rejected") {
    std::vector<WeightedSample> samples(10);
    for (auto& s : samples) {
        s.expanded_features = {1, 0, 0, 0, 0, 0};
        s.target = 1;
        s.weight = 1.0;
    }
    CHECK_THROWS_AS(fit_weighted_logreg(samples), DegenerateDataError);
    samples[0].target = 0;
    samples[0].weight = 0.0;  // the only negative carries no weight
    CHECK_THROWS_AS(fit_weighted_logreg(samples), DegenerateDataError);
}

TEST_CASE("separable data saturates at the clamp but classifies correctly") {
    std::vector<WeightedSample> samples;
    for (int i = 0; i < 20; ++i) {
        const double x = (i % 2 == 0) ? 1.0 : -1.0;
        samples.push_back({expand_features({x, 0, 0}, Group::A),
                           static_cast<std::uint8_t>(x > 0 ? 1 : 0), 1.0});
    }
    const FitResult fit = fit_weighted_logreg(samples);
    CHECK(std::abs(fit.model.coeffs_a[0]) <= 30.0);
    CHECK(predict_binary(fit.model, {1, 0, 0}, Group::A) == 1);
    CHECK(predict_binary(fit.model, {-1, 0, 0}, Group::A) == 0);
}

TEST_CASE("prediction thresholds and scores") {
    const ModelCoeffs zero;
    CHECK(predict_binary(zero, {3, 1, -2}, Group::A) == 1);  // tie at score zero
    CHECK(predict_score(zero, {3, 1, -2}, Group::B) == doctest::Approx(0.5));

    ModelCoeffs hand;
    hand.intercept = 1.0;
    hand.coeffs_a = {-2.0, 0.0, 0.0};
    CHECK(predict_binary(hand, {1, 0, 0}, Group::A) == 0);  // score -1

    ModelCoeffs logit3;
    logit3.intercept = std::log(3.0);
    CHECK(predict_score(logit3, {0, 0, 0}, Group::A) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("the analytic parameters reproduce the generating labeler") {
    BayesParams params;
    const ModelCoeffs analytic{0.0, params.coeffs_a, params.coeffs_b};
    GenConfig cfg;
    cfg.n = 2000;
    Rng rng(6);
    const Dataset ds = sample_ground_truth(cfg, rng);
    for (std::size_t i = 0; i < ds.size(); ++i)
        REQUIRE(predict_binary(analytic, ds.features[i], ds.group[i]) == ds.bayes_label[i]);
}

TEST_CASE("binary prediction agrees with the half-probability rule") {
    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        const ModelCoeffs m = random_model(rng);
        const Features x{rng.normal(), rng.normal(), rng.normal()};
        const Group g = rng.bernoulli(0.5) ? Group::A : Group::B;
        CHECK(predict_binary(m, x, g) == (predict_score(m, x, g) >= 0.5 ? 1 : 0));
    }
}
