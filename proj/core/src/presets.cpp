#include <cmath>

#include "fairsim/harness.hpp"

namespace fairsim {

namespace {

std::vector<double> level_grid(double from, double to, double step) {
    std::vector<double> levels;
    for (int i = 0;; ++i) {
        const double v = from + step * i;
        if (v > to + 1e-9) break;
        // snap to the grid's own resolution so levels print cleanly
        levels.push_back(std::round(v * 1e9) / 1e9);
    }
    return levels;
}

ExperimentConfig base_config(const std::string& name, std::size_t n_per_split) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.gen.n = n_per_split;
    cfg.gen.minority_fraction = 0.2;
    cfg.gen.bayes.noise_majority = 0.4;
    cfg.gen.bayes.noise_minority = 0.4;
    cfg.intervention = InterventionKind::GridSearchEO;
    cfg.repetitions = 50;
    return cfg;
}

ExperimentConfig underrepresentation_sweep(const std::string& name, std::size_t n_per_split) {
    ExperimentConfig cfg = base_config(name, n_per_split);
    cfg.bias.kind = BiasKind::UnderRepresentation;
    cfg.bias.scope = BiasScope::PositiveMinority;
    cfg.levels = level_grid(0.0, 0.95, 0.05);
    return cfg;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "fig3_small",   "fig3_mid",    "fig3_large", "fig4_baserates",
        "fig5_sampling", "fig6_label", "fig7_feature", "appendix_post",
    };
    return names;
}

ExperimentConfig preset(const std::string& name) {
    if (name == "fig3_small") return underrepresentation_sweep(name, 300);
    if (name == "fig3_mid") return underrepresentation_sweep(name, 3000);
    if (name == "fig3_large") return underrepresentation_sweep(name, 30000);
    if (name == "appendix_post") {
        ExperimentConfig cfg = underrepresentation_sweep(name, 30000);
        cfg.intervention = InterventionKind::PostProcessEO;
        return cfg;
    }
    if (name == "fig4_baserates") {
        ExperimentConfig cfg = base_config(name, 30000);
        cfg.bias.kind = BiasKind::UnderRepresentation;
        cfg.bias.scope = BiasScope::PositiveMinority;
        cfg.bias.level = 0.4;
        cfg.axis = SweepAxis::BaseRateDifference;
        // evenly spaced differences; the +-0.5 endpoints would need an
        // infinite feature shift, so the grid stops at +-0.4
        cfg.levels = level_grid(-0.4, 0.4, 0.1);
        return cfg;
    }
    if (name == "fig5_sampling") {
        ExperimentConfig cfg = base_config(name, 30000);
        cfg.bias.kind = BiasKind::Sampling;
        cfg.bias.scope = BiasScope::WholeMinority;
        cfg.levels = level_grid(0.0, 0.95, 0.05);
        cfg.levels.push_back(0.99);  // the paper's maximal deletion point
        return cfg;
    }
    if (name == "fig6_label") {
        ExperimentConfig cfg = base_config(name, 30000);
        cfg.bias.kind = BiasKind::LabelNoise;
        cfg.bias.scope = BiasScope::WholeMinority;
        cfg.levels = level_grid(0.0, 0.45, 0.05);
        return cfg;
    }
    if (name == "fig7_feature") {
        ExperimentConfig cfg = base_config(name, 30000);
        cfg.bias.kind = BiasKind::FeatureMissing;
        cfg.bias.scope = BiasScope::WholeMinority;
        cfg.bias.feature_index = 0;
        cfg.levels = level_grid(0.0, 1.0, 0.05);
        return cfg;
    }
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "'; valid presets: " + known);
}

}  // namespace fairsim
