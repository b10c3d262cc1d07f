#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "fairsim/config.hpp"
#include "fairsim/csv.hpp"
#include "fairsim/svg.hpp"

using namespace fairsim;

namespace {

const char* kMinimalConfig = R"(
[generation]
n = 600

[bias]
kind = "UnderRepresentation"
levels = [0.0, 0.2, 0.4]

[harness]
repetitions = 4
master_seed = 17
)";

std::string substitute(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("a minimal config gets the documented defaults") {
    const ExperimentConfig cfg = parse_config(kMinimalConfig);
    CHECK(cfg.gen.n == 300);  // 600 rows per run, half per split
    CHECK(cfg.gen.minority_fraction == 0.2);
    CHECK(cfg.gen.bayes.noise_majority == 0.4);
    CHECK(cfg.gen.bayes.coeffs_a == Features{-0.7, 0.5, 1.5});
    CHECK(cfg.gen.bayes.coeffs_b == Features{0.5, -0.2, 0.1});
    CHECK(cfg.bias.kind == BiasKind::UnderRepresentation);
    CHECK(cfg.bias.scope == BiasScope::PositiveMinority);
    CHECK(cfg.levels == std::vector<double>{0.0, 0.2, 0.4});
    CHECK(cfg.intervention == InterventionKind::None);
    CHECK(cfg.grid.lambda_limit == 2.0);
    CHECK(cfg.grid.grid_size == 10);
    CHECK(cfg.grid.tradeoff_weight == 0.5);
    CHECK(cfg.repetitions == 4);
    CHECK(cfg.master_seed == 17);
    CHECK(cfg.axis == SweepAxis::BiasLevel);
}

TEST_CASE("config rejections carry the key path") {
    SUBCASE("noise at the open bound") {
        const std::string bad = substitute(kMinimalConfig, "n = 600", "n = 600\nnoise = 0.5");
        try {
            (void)parse_config(bad);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            const std::string what = e.what();
            CHECK(what.find("noise") != std::string::npos);
            CHECK(what.find("< 0.5") != std::string::npos);
        }
    }

    SUBCASE("label bias beyond its cap") {
        std::string bad = substitute(kMinimalConfig, "\"UnderRepresentation\"", "\"LabelNoise\"");
        bad = substitute(bad, "levels = [0.0, 0.2, 0.4]", "levels = [0.0, 0.6]");
        try {
            (void)parse_config(bad);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("label bias") != std::string::npos);
        }
    }

    SUBCASE("unknown keys fail closed") {
        const std::string bad =
            substitute(kMinimalConfig, "n = 600", "n = 600\nbogus_option = 3");
        CHECK_THROWS_AS((void)parse_config(bad), ConfigError);
    }

    SUBCASE("unknown sections fail closed") {
        const std::string bad = std::string(kMinimalConfig) + "\n[plotting]\ncolor = \"red\"\n";
        CHECK_THROWS_AS((void)parse_config(bad), ConfigError);
    }

    SUBCASE("odd totals cannot split") {
        const std::string bad = substitute(kMinimalConfig, "n = 600", "n = 601");
        CHECK_THROWS_AS((void)parse_config(bad), ConfigError);
    }

    SUBCASE("descending level grids are rejected") {
        const std::string bad =
            substitute(kMinimalConfig, "levels = [0.0, 0.2, 0.4]", "levels = [0.4, 0.2]");
        CHECK_THROWS_AS((void)parse_config(bad), ConfigError);
    }

    SUBCASE("feature_index needs FeatureMissing") {
        const std::string bad =
            substitute(kMinimalConfig, "levels = [0.0, 0.2, 0.4]",
                       "levels = [0.0, 0.2, 0.4]\nfeature_index = 1");
        CHECK_THROWS_AS((void)parse_config(bad), ConfigError);
    }

    SUBCASE("malformed syntax reports the line") {
        const std::string bad = substitute(kMinimalConfig, "n = 600", "n 600");
        try {
            (void)parse_config(bad);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("line") != std::string::npos);
        }
    }

    SUBCASE("duplicate keys are rejected") {
        const std::string bad = substitute(kMinimalConfig, "n = 600", "n = 600\nn = 800");
        CHECK_THROWS_AS((void)parse_config(bad), ConfigError);
    }
}

TEST_CASE("base-rate sweep configs") {
    const char* text = R"(
[generation]
n = 600

[bias]
kind = "UnderRepresentation"

[intervention]
method = "GridSearchEO"

[harness]
repetitions = 2
master_seed = 5
sweep = "base_rate"
base_rate_levels = [-0.2, 0.0, 0.2]
fixed_bias_level = 0.4
)";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.axis == SweepAxis::BaseRateDifference);
    CHECK(cfg.levels == std::vector<double>{-0.2, 0.0, 0.2});
    CHECK(cfg.bias.level == 0.4);
    CHECK(cfg.intervention == InterventionKind::GridSearchEO);
}

TEST_CASE("full option surface parses") {
    const char* text = R"(
# full configuration
[generation]
n = 2000
minority_fraction = 0.3
noise = 0.25
coeffs_a = [1.0, 0.5, -0.5]
coeffs_b = [0.2, 0.2, 0.2]
base_rate_difference = -0.1

[bias]
kind = "FeatureMissing"
levels = [0.0, 0.5, 1.0]
scope = "PositiveMinority"
feature_index = 2

[intervention]
method = "CorrelationRemover"
alpha = 0.75

[harness]
name = "custom_run"
repetitions = 3
master_seed = 101
sweep = "bias"
)";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.name == "custom_run");
    CHECK(cfg.gen.n == 1000);
    CHECK(cfg.gen.minority_fraction == 0.3);
    CHECK(cfg.gen.bayes.noise_minority == 0.25);
    CHECK(cfg.base_rate_difference == -0.1);
    CHECK(cfg.bias.kind == BiasKind::FeatureMissing);
    CHECK(cfg.bias.feature_index == 2);
    CHECK(cfg.intervention == InterventionKind::CorrelationRemover);
    CHECK(cfg.correlation_alpha == 0.75);
}

namespace {

std::vector<RunRecord> sample_records() {
    std::vector<RunRecord> records;
    records.push_back({1, 0.4, ModelVariant::Biased, Split::Test, GroupScope::All,
                       MetricName::Accuracy, 0.625, RecordStatus::Ok});
    records.push_back({0, 0.4, ModelVariant::Intervened, Split::Train, GroupScope::B,
                       MetricName::EoDisparity, 1.0 / 3.0, RecordStatus::Ok});
    records.push_back({0, 0.0, ModelVariant::BayesAnalytic, Split::Test, GroupScope::A,
                       MetricName::Fidelity, 1.0, RecordStatus::Ok});
    records.push_back({1, 0.0, ModelVariant::Intervened, Split::Test, GroupScope::All,
                       MetricName::Accuracy, std::nan(""), RecordStatus::ExcludedNotApplicable});
    return records;
}

}  // namespace

TEST_CASE("results csv round trips at full precision") {
    const auto records = sample_records();
    const std::string text = results_csv_text("exp", records);
    const ParsedResults parsed = parse_results_csv_text(text);
    CHECK(parsed.experiment == "exp");
    REQUIRE(parsed.records.size() == records.size());
    // rows come back sorted by (level, run, variant, split, group, metric)
    CHECK(parsed.records[0].bias_level == 0.0);
    CHECK(parsed.records[0].variant == ModelVariant::BayesAnalytic);
    for (const auto& r : parsed.records) {
        if (r.status == RecordStatus::ExcludedNotApplicable)
            CHECK(std::isnan(r.value));
        else
            CHECK(std::isfinite(r.value));
    }
    // exact value survival
    bool found = false;
    for (const auto& r : parsed.records)
        if (r.metric == MetricName::EoDisparity) {
            CHECK(r.value == 1.0 / 3.0);
            found = true;
        }
    CHECK(found);
    // emitting the parsed records reproduces the bytes
    CHECK(results_csv_text(parsed.experiment, parsed.records) == text);
}

TEST_CASE("csv layout") {
    CHECK(results_csv_text("e", {}) == std::string(kResultsCsvHeader) + "\n");
    const std::vector<RunRecord> one = {sample_records()[0]};
    const std::string text = results_csv_text("e", one);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("e,1,0.40000000000000002,biased,test,all,accuracy,0.625,ok\n") !=
          std::string::npos);
    CHECK(results_csv_text("e", one) == results_csv_text("e", one));
}

TEST_CASE("csv parser rejects malformed input") {
    CHECK_THROWS_AS((void)parse_results_csv_text(""), ConfigError);
    CHECK_THROWS_AS((void)parse_results_csv_text("wrong,header\n"), ConfigError);
    const std::string good = results_csv_text("exp", sample_records());
    CHECK_THROWS_AS((void)parse_results_csv_text(good + "exp,1,0.4,biased\n"), ConfigError);
    CHECK_THROWS_AS(
        (void)parse_results_csv_text(good + "exp,1,0.4,nosuch,test,all,accuracy,0.5,ok\n"),
        ConfigError);
}

namespace {

std::vector<AggregateRecord> figure_aggregates() {
    std::vector<AggregateRecord> aggs;
    for (ModelVariant v : {ModelVariant::BayesAnalytic, ModelVariant::BayesDataDriven,
                           ModelVariant::Biased, ModelVariant::Intervened})
        for (GroupScope g : {GroupScope::All, GroupScope::A, GroupScope::B})
            for (double level : {0.0, 0.5, 0.9}) {
                AggregateRecord a;
                a.bias_level = level;
                a.variant = v;
                a.split = Split::Test;
                a.group = g;
                a.metric = MetricName::Fidelity;
                a.mean = 0.9 - 0.2 * level;
                a.stddev = 0.02;
                a.count = 10;
                aggs.push_back(a);
            }
    return aggs;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

}  // namespace

TEST_CASE("fidelity figures contain exactly the biased and intervened series") {
    const std::string svg =
        figure_svg_text("fig3_large", figure_aggregates(), MetricName::Fidelity);
    CHECK(count_occurrences(svg, "<polyline") == 6);  // 2 variants x 3 groups
    CHECK(count_occurrences(svg, "bayes_analytic") == 0);
    CHECK(count_occurrences(svg, "bayes_datadriven") == 0);
    CHECK(count_occurrences(svg, "biased (all)") == 1);
    CHECK(count_occurrences(svg, "intervened (B)") == 1);
}

TEST_CASE("accuracy figures add the data-driven reference series") {
    auto aggs = figure_aggregates();
    for (auto& a : aggs) a.metric = MetricName::Accuracy;
    const std::string svg = figure_svg_text("x", aggs, MetricName::Accuracy);
    CHECK(count_occurrences(svg, "<polyline") == 9);
    CHECK(count_occurrences(svg, "bayes_datadriven (all)") == 1);
}

TEST_CASE("a single aggregate point draws one marker with an error bar") {
    std::vector<AggregateRecord> one;
    AggregateRecord a;
    a.bias_level = 0.3;
    a.variant = ModelVariant::Biased;
    a.split = Split::Test;
    a.group = GroupScope::All;
    a.metric = MetricName::Accuracy;
    a.mean = 0.57;
    a.stddev = 0.04;
    a.count = 5;
    one.push_back(a);
    const std::string svg = figure_svg_text("solo", one, MetricName::Accuracy);
    CHECK(count_occurrences(svg, "<circle") == 1);
    CHECK(count_occurrences(svg, "opacity=\"0.6\"") == 3);  // stem and two caps
}

TEST_CASE("figure bytes are deterministic") {
    const auto aggs = figure_aggregates();
    CHECK(figure_svg_text("same", aggs, MetricName::Fidelity) ==
          figure_svg_text("same", aggs, MetricName::Fidelity));
}

TEST_CASE("figures skip aggregate keys with no surviving runs") {
    auto aggs = figure_aggregates();
    for (auto& a : aggs)
        if (a.variant == ModelVariant::Intervened && a.bias_level == 0.9) {
            a.count = 0;
            a.mean = std::nan("");
        }
    const std::string svg = figure_svg_text("gap", aggs, MetricName::Fidelity);
    CHECK(count_occurrences(svg, "<polyline") == 6);
    CHECK(count_occurrences(svg, "nan") == 0);
}
