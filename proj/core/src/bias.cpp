#include "fairsim/bias.hpp"

#include <cmath>

namespace fairsim {

const char* to_string(BiasKind k) {
    switch (k) {
        case BiasKind::UnderRepresentation: return "UnderRepresentation";
        case BiasKind::Sampling: return "Sampling";
        case BiasKind::LabelNoise: return "LabelNoise";
        case BiasKind::FeatureMissing: return "FeatureMissing";
    }
    return "?";
}

const char* to_string(BiasScope s) {
    switch (s) {
        case BiasScope::WholeMinority: return "WholeMinority";
        case BiasScope::PositiveMinority: return "PositiveMinority";
        case BiasScope::NegativeMinorityComplement: return "NegativeMinorityComplement";
    }
    return "?";
}

void BiasSpec::validate() const {
    if (!(level >= 0.0 && level <= 1.0))
        throw ConfigError(std::string("bias.level: must be in [0, 1] for ") + to_string(kind) +
                          ", got " + std::to_string(level));
    if (kind == BiasKind::LabelNoise && level >= 0.5)
        throw ConfigError("bias.level: label bias cannot reach 50%, got " +
                          std::to_string(level));
    if (kind == BiasKind::FeatureMissing) {
        if (feature_index < 0 || feature_index > 2)
            throw ConfigError("bias.feature_index: must be 0, 1 or 2, got " +
                              std::to_string(feature_index));
    }
    if (kind == BiasKind::UnderRepresentation && scope != BiasScope::PositiveMinority)
        throw ConfigError(
            "bias.scope: UnderRepresentation is defined on the positive minority cell; "
            "use kind = \"Sampling\" for other scopes");
}

namespace {

// Rows an injector may touch. Group A is never selected; the complement of
// the negative minority cell therefore reduces to the positive minority.
bool in_scope(BiasScope scope, Group g, std::uint8_t scoping_label) {
    if (g != Group::B) return false;
    switch (scope) {
        case BiasScope::WholeMinority: return true;
        case BiasScope::PositiveMinority:
        case BiasScope::NegativeMinorityComplement: return scoping_label == 1;
    }
    return false;
}

Dataset delete_scoped(const Dataset& ds, double level, BiasScope scope, Rng& rng) {
    Dataset out;
    out.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const bool scoped = in_scope(scope, ds.group[i], ds.label[i]);
        if (scoped && rng.bernoulli(level)) continue;
        out.push_row(ds.features[i], ds.group[i], ds.label[i], ds.bayes_label[i]);
    }
    return out;
}

}  // namespace

Dataset inject_underrepresentation(const Dataset& ds, double level, Rng& rng) {
    return delete_scoped(ds, level, BiasScope::PositiveMinority, rng);
}

Dataset inject_sampling_bias(const Dataset& ds, double level, Rng& rng) {
    return delete_scoped(ds, level, BiasScope::WholeMinority, rng);
}

Dataset inject_label_bias(const Dataset& ds, double minority_noise, BiasScope scope, Rng& rng) {
    Dataset out = ds;
    for (std::size_t i = 0; i < out.size(); ++i) {
        // Scoping by the noiseless label: selecting on a label that is about
        // to be rewritten would be circular.
        if (!in_scope(scope, out.group[i], out.bayes_label[i])) continue;
        const std::uint8_t ystar = out.bayes_label[i];
        out.label[i] = rng.bernoulli(minority_noise) ? static_cast<std::uint8_t>(1 - ystar)
                                                     : ystar;
    }
    return out;
}

Dataset inject_feature_missingness(const Dataset& ds, double level, int feature_index,
                                   BiasScope scope, Rng& rng) {
    Dataset out = ds;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!in_scope(scope, out.group[i], out.label[i])) continue;
        if (rng.bernoulli(level)) out.features[i][static_cast<std::size_t>(feature_index)] = 0.0;
    }
    return out;
}

Dataset apply_bias(const Dataset& ds, const BiasSpec& spec, Rng& rng) {
    spec.validate();
    switch (spec.kind) {
        case BiasKind::UnderRepresentation:
            return inject_underrepresentation(ds, spec.level, rng);
        case BiasKind::Sampling:
            return delete_scoped(ds, spec.level, spec.scope, rng);
        case BiasKind::LabelNoise:
            return inject_label_bias(ds, spec.level, spec.scope, rng);
        case BiasKind::FeatureMissing:
            return inject_feature_missingness(ds, spec.level, spec.feature_index, spec.scope,
                                              rng);
    }
    return ds;
}

}  // namespace fairsim
