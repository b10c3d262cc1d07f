#include <cmath>

#include "doctest.h"
#include "fairsim/bias.hpp"
#include "fairsim/synthgen.hpp"
#include "oracles.hpp"

using namespace fairsim;

namespace {

Dataset make_data(std::size_t n, double noise = 0.4, std::uint64_t seed = 11) {
    GenConfig cfg;
    cfg.n = n;
    cfg.bayes.noise_majority = noise;
    cfg.bayes.noise_minority = noise;
    Rng rng(seed);
    return sample_ground_truth(cfg, rng);
}

std::size_t count_cell(const Dataset& ds, Group g, int label) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        n += (ds.group[i] == g && ds.label[i] == label) ? 1 : 0;
    return n;
}

std::size_t count_group(const Dataset& ds, Group g) {
    std::size_t n = 0;
    for (Group gi : ds.group) n += gi == g ? 1 : 0;
    return n;
}

}  // namespace

TEST_CASE("deletion and missingness injectors are bit-exact identities at level 0") {
    const Dataset ds = make_data(4000);
    Rng r1(1), r2(2), r3(3);
    CHECK(inject_underrepresentation(ds, 0.0, r1) == ds);
    CHECK(inject_sampling_bias(ds, 0.0, r2) == ds);
    CHECK(inject_feature_missingness(ds, 0.0, 0, BiasScope::WholeMinority, r3) == ds);
}

TEST_CASE("label bias at rate zero restores the noiseless labels") {
    const Dataset ds = make_data(4000);
    Rng rng(4);
    const Dataset out = inject_label_bias(ds, 0.0, BiasScope::WholeMinority, rng);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.group[i] == Group::B)
            REQUIRE(out.label[i] == out.bayes_label[i]);
        else
            REQUIRE(out.label[i] == ds.label[i]);
    }
    // on noiseless data the replacement is a bit-exact identity
    const Dataset clean = make_data(2000, 0.0);
    Rng rng2(5);
    CHECK(inject_label_bias(clean, 0.0, BiasScope::WholeMinority, rng2) == clean);
}

TEST_CASE("full under-representation empties exactly the positive minority cell") {
    const Dataset ds = make_data(4000);
    Rng rng(6);
    const Dataset out = inject_underrepresentation(ds, 1.0, rng);
    CHECK(count_cell(out, Group::B, 1) == 0);
    CHECK(count_cell(out, Group::B, 0) == count_cell(ds, Group::B, 0));
    CHECK(count_group(out, Group::A) == count_group(ds, Group::A));
}

TEST_CASE("under-representation retains the expected fraction") {
    const Dataset ds = make_data(30000);
    const std::size_t before = count_cell(ds, Group::B, 1);
    Rng rng(7);
    const Dataset out = inject_underrepresentation(ds, 0.4, rng);
    const std::size_t after = count_cell(out, Group::B, 1);
    const double tol = oracles::binomial_tolerance(static_cast<double>(before), 0.4, 4.0);
    CHECK(std::abs(static_cast<double>(after) - 0.6 * static_cast<double>(before)) <= tol);
}

TEST_CASE("sampling bias leaves the majority untouched and decimates the minority") {
    const Dataset ds = make_data(30000);
    Rng rng(8);
    const Dataset out = inject_sampling_bias(ds, 0.99, rng);
    CHECK(count_group(out, Group::A) == count_group(ds, Group::A));
    const double before = static_cast<double>(count_group(ds, Group::B));
    const double after = static_cast<double>(count_group(out, Group::B));
    CHECK(std::abs(after - 0.01 * before) <= oracles::binomial_tolerance(before, 0.01, 4.0));

    Rng rng2(9);
    const Dataset half = inject_sampling_bias(ds, 0.5, rng2);
    CHECK(count_group(half, Group::A) == count_group(ds, Group::A));
}

TEST_CASE("deletion preserves surviving rows verbatim and in order") {
    const Dataset ds = make_data(3000);
    Rng rng(10);
    const Dataset out = inject_underrepresentation(ds, 0.5, rng);
    std::size_t src = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        while (src < ds.size() &&
               !(ds.features[src] == out.features[i] && ds.group[src] == out.group[i] &&
                 ds.label[src] == out.label[i] && ds.bayes_label[src] == out.bayes_label[i]))
            ++src;
        REQUIRE(src < ds.size());
        ++src;
    }
}

TEST_CASE("label bias hits the requested minority flip rate") {
    const Dataset ds = make_data(30000);
    Rng rng(12);
    const Dataset out = inject_label_bias(ds, 0.45, BiasScope::WholeMinority, rng);
    double n_b = 0, flips = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.group[i] != Group::B) {
            REQUIRE(out.label[i] == ds.label[i]);
            continue;
        }
        n_b += 1;
        flips += out.label[i] != out.bayes_label[i] ? 1 : 0;
    }
    CHECK(std::abs(flips - 0.45 * n_b) <= oracles::binomial_tolerance(n_b, 0.45, 4.0));
}

TEST_CASE("scoped label bias only rewrites the noiseless-positive minority") {
    const Dataset ds = make_data(20000);
    Rng rng(13);
    const Dataset out = inject_label_bias(ds, 0.1, BiasScope::PositiveMinority, rng);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.group[i] == Group::B && out.bayes_label[i] == 1) continue;
        REQUIRE(out.label[i] == ds.label[i]);
    }
}

TEST_CASE("feature missingness zeroes only the scoped coordinate") {
    const Dataset ds = make_data(30000);
    Rng rng(14);
    const Dataset all = inject_feature_missingness(ds, 1.0, 0, BiasScope::WholeMinority, rng);
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all.group[i] == Group::B) {
            REQUIRE(all.features[i][0] == 0.0);
            REQUIRE(all.features[i][1] == ds.features[i][1]);
        } else {
            REQUIRE(all.features[i] == ds.features[i]);
        }
        REQUIRE(all.label[i] == ds.label[i]);
    }

    Rng rng2(15);
    const Dataset part =
        inject_feature_missingness(ds, 0.7, 0, BiasScope::PositiveMinority, rng2);
    double scoped = 0, zeroed = 0;
    for (std::size_t i = 0; i < part.size(); ++i) {
        const bool in_cell = part.group[i] == Group::B && part.label[i] == 1;
        if (!in_cell) {
            REQUIRE(part.features[i] == ds.features[i]);
            continue;
        }
        scoped += 1;
        zeroed += part.features[i][0] == 0.0 ? 1 : 0;
    }
    CHECK(std::abs(zeroed - 0.7 * scoped) <= oracles::binomial_tolerance(scoped, 0.7, 4.0));
}

TEST_CASE("negative-minority complement scope selects the positive minority rows") {
    const Dataset ds = make_data(5000);
    Rng r1(16), r2(16);
    const Dataset a = inject_feature_missingness(ds, 1.0, 1, BiasScope::PositiveMinority, r1);
    const Dataset b =
        inject_feature_missingness(ds, 1.0, 1, BiasScope::NegativeMinorityComplement, r2);
    CHECK(a == b);
}

TEST_CASE("injection is deterministic in the seed") {
    const Dataset ds = make_data(5000);
    Rng r1(17), r2(17), r3(18);
    CHECK(inject_underrepresentation(ds, 0.3, r1) == inject_underrepresentation(ds, 0.3, r2));
    CHECK_FALSE(inject_underrepresentation(ds, 0.3, r1) ==
                inject_underrepresentation(ds, 0.3, r3));
}

TEST_CASE("injectors with disjoint row effects commute in distribution") {
    const Dataset ds = make_data(30000);
    // deletion over the positive minority, then missingness over the whole
    // minority, and the other way around: summary statistics must agree
    // within Monte-Carlo tolerance
    auto stats = [](const Dataset& d) {
        double n_b1 = 0, zeros = 0, n_b = 0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d.group[i] != Group::B) continue;
            n_b += 1;
            n_b1 += d.label[i] == 1 ? 1 : 0;
            zeros += d.features[i][1] == 0.0 ? 1 : 0;
        }
        return std::array<double, 3>{n_b, n_b1, zeros / n_b};
    };
    Rng r1(19), r2(20), r3(21), r4(22);
    Dataset first = inject_underrepresentation(ds, 0.3, r1);
    first = inject_feature_missingness(first, 0.5, 1, BiasScope::WholeMinority, r2);
    Dataset second = inject_feature_missingness(ds, 0.5, 1, BiasScope::WholeMinority, r3);
    second = inject_underrepresentation(second, 0.3, r4);
    const auto s1 = stats(first);
    const auto s2 = stats(second);
    CHECK(std::abs(s1[0] - s2[0]) <= oracles::binomial_tolerance(6000, 0.15, 6.0));
    CHECK(std::abs(s1[1] - s2[1]) <= oracles::binomial_tolerance(3000, 0.3, 6.0));
    CHECK(std::abs(s1[2] - s2[2]) <= 0.03);
}

TEST_CASE("bias spec validation") {
    BiasSpec spec;
    spec.kind = BiasKind::LabelNoise;
    spec.scope = BiasScope::WholeMinority;
    spec.level = 0.6;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.level = 0.45;
    CHECK_NOTHROW(spec.validate());
    spec.kind = BiasKind::FeatureMissing;
    spec.feature_index = 5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.feature_index = 2;
    CHECK_NOTHROW(spec.validate());
    spec.kind = BiasKind::UnderRepresentation;
    spec.scope = BiasScope::WholeMinority;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}
