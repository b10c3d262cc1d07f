// Command line front end: run configured experiments, replicate the built-in
// presets, and render figures from result files.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fairsim/config.hpp"
#include "fairsim/csv.hpp"
#include "fairsim/harness.hpp"
#include "fairsim/svg.hpp"

namespace fs = std::filesystem;
using namespace fairsim;

namespace {

struct CommonOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    unsigned workers = 0;  // 0 = hardware concurrency
};

void apply_overrides(ExperimentConfig& cfg, const CommonOverrides& o) {
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.reps) {
        if (*o.reps < 1) throw ConfigError("--reps: must be >= 1");
        cfg.repetitions = *o.reps;
    }
}

void report_exclusions(const ExperimentResult& result, int repetitions) {
    std::map<double, int> excluded_runs;
    for (const auto& r : result.records)
        if (r.status == RecordStatus::ExcludedNotApplicable &&
            r.variant == ModelVariant::Intervened && r.metric == MetricName::Accuracy &&
            r.split == Split::Test && r.group == GroupScope::All)
            excluded_runs[r.bias_level] += 1;
    for (const auto& [level, count] : excluded_runs)
        std::cout << "level " << level << ": " << count << " of " << repetitions
                  << " runs excluded (intervention not applicable)\n";
}

int execute(const ExperimentConfig& cfg, const CommonOverrides& overrides,
            const std::string& out_dir) {
    cfg.validate();  // fail before any filesystem effect
    fs::create_directories(out_dir);

    const ExperimentResult result = run_experiment(cfg, overrides.workers);
    emit_csv(cfg.name, result.records, (fs::path(out_dir) / "results.csv").string());
    emit_aggregates_csv(cfg.name, result.aggregates,
                        (fs::path(out_dir) / "aggregates.csv").string());
    const std::string x_label =
        cfg.axis == SweepAxis::BaseRateDifference ? "base rate difference" : "bias level";
    for (MetricName metric :
         {MetricName::Fidelity, MetricName::Accuracy, MetricName::EoDisparity}) {
        const std::string file = std::string(to_string(metric)) + ".svg";
        emit_figure(cfg.name, result.aggregates, metric,
                    (fs::path(out_dir) / file).string(), x_label);
    }
    report_exclusions(result, cfg.repetitions);
    std::cout << "wrote " << out_dir << "/results.csv, aggregates.csv and 3 figures\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bias stress-testing simulator for Equalized Odds interventions"};
    app.require_subcommand(1);

    CommonOverrides overrides;
    std::string config_path, out_dir, preset_name, in_csv, metric_name, out_svg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", overrides.seed, "master seed override");
        cmd->add_option("--reps", overrides.reps, "repetition count override");
        cmd->add_option("--workers", overrides.workers,
                        "parallel worker count (default: hardware)");
    };

    CLI::App* run = app.add_subcommand("run", "run an experiment described by a config file");
    run->add_option("--config", config_path, "TOML experiment description")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    add_common(run);

    CLI::App* replicate =
        app.add_subcommand("replicate", "run one of the built-in experiment presets");
    replicate->add_option("preset", preset_name, "preset name (see `presets`)")->required();
    replicate->add_option("--out", out_dir, "output directory")->required();
    add_common(replicate);

    CLI::App* plot = app.add_subcommand("plot", "render one metric of a results file as SVG");
    plot->add_option("--in", in_csv, "results.csv produced by run/replicate")->required();
    plot->add_option("--metric", metric_name,
                     "accuracy | eo_disparity | fidelity_agreement")
        ->required();
    plot->add_option("--out", out_svg, "output SVG path")->required();
    std::string x_label = "bias level";
    plot->add_option("--x-label", x_label, "x axis label (default: bias level)");

    CLI::App* presets = app.add_subcommand("presets", "list the built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(presets)) {
            for (const auto& name : preset_names()) std::cout << name << "\n";
            return 0;
        }
        if (app.got_subcommand(run)) {
            ExperimentConfig cfg = parse_config_file(config_path);
            apply_overrides(cfg, overrides);
            return execute(cfg, overrides, out_dir);
        }
        if (app.got_subcommand(replicate)) {
            ExperimentConfig cfg = preset(preset_name);
            apply_overrides(cfg, overrides);
            return execute(cfg, overrides, out_dir);
        }
        if (app.got_subcommand(plot)) {
            MetricName metric;
            if (metric_name == "accuracy")
                metric = MetricName::Accuracy;
            else if (metric_name == "eo_disparity")
                metric = MetricName::EoDisparity;
            else if (metric_name == "fidelity_agreement")
                metric = MetricName::Fidelity;
            else
                throw ConfigError("--metric: expected accuracy, eo_disparity or "
                                  "fidelity_agreement, got '" +
                                  metric_name + "'");
            const ParsedResults parsed = parse_results_csv(in_csv);
            const auto aggregates = aggregate_records(parsed.records);
            emit_figure(parsed.experiment, aggregates, metric, out_svg, x_label);
            std::cout << "wrote " << out_svg << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
