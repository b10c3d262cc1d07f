#pragma once

#include "fairsim/rng.hpp"
#include "fairsim/synthgen.hpp"
#include "fairsim/types.hpp"

namespace fairsim {

enum class BiasKind { UnderRepresentation, Sampling, LabelNoise, FeatureMissing };
enum class BiasScope { WholeMinority, PositiveMinority, NegativeMinorityComplement };

const char* to_string(BiasKind k);
const char* to_string(BiasScope s);

/// One injectable corruption. `level` is the deletion probability (1 - beta),
/// the sampling probability, the minority noise rate, or the missingness
/// probability depending on `kind`.
struct BiasSpec {
    BiasKind kind = BiasKind::UnderRepresentation;
    double level = 0.0;
    BiasScope scope = BiasScope::PositiveMinority;
    int feature_index = 0;  // FeatureMissing only

    void validate() const;
};

/// Drops every (minority, observed label 1) row independently with the given
/// probability; everything else is retained in order.
Dataset inject_underrepresentation(const Dataset& ds, double level, Rng& rng);

/// Drops every minority row independently with the given probability.
Dataset inject_sampling_bias(const Dataset& ds, double level, Rng& rng);

/// Regenerates the observed labels of the scoped minority rows from the
/// noiseless labels with the given flip probability, replacing (not
/// compounding) the generation-time noise. Scoping uses the noiseless label;
/// majority rows are never touched here.
Dataset inject_label_bias(const Dataset& ds, double minority_noise, BiasScope scope, Rng& rng);

/// Zeroes the designated feature coordinate of scoped minority rows with the
/// given probability; labels are untouched. Scoping uses the observed label.
Dataset inject_feature_missingness(const Dataset& ds, double level, int feature_index,
                                   BiasScope scope, Rng& rng);

/// Dispatches on spec.kind. Deletion kinds honor the scope as a row mask;
/// UnderRepresentation is Sampling restricted to the positive minority cell.
Dataset apply_bias(const Dataset& ds, const BiasSpec& spec, Rng& rng);

}  // namespace fairsim
