#pragma once

#include <string>

#include "fairsim/harness.hpp"

namespace fairsim {

/// Parses a TOML-syntax experiment description with sections [generation],
/// [bias], [intervention] and [harness]. Validation is fail-closed: unknown
/// sections or keys, type mismatches and domain violations all raise
/// ConfigError with the offending key path.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig parse_config_file(const std::string& path);

}  // namespace fairsim
