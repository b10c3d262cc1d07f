#pragma once

#include <string>
#include <vector>

#include "fairsim/harness.hpp"

namespace fairsim {

/// Fixed results schema. Rows are sorted by (bias_level, run_index,
/// model_variant, split, group, metric); reals are written with full
/// round-trip precision, UTF-8, LF line endings.
inline constexpr const char* kResultsCsvHeader =
    "experiment,run_index,bias_level,model_variant,split,group,metric,value,status";

std::string results_csv_text(const std::string& experiment,
                             const std::vector<RunRecord>& records);

void emit_csv(const std::string& experiment, const std::vector<RunRecord>& records,
              const std::string& path);

struct ParsedResults {
    std::string experiment;
    std::vector<RunRecord> records;
};

/// Strict inverse of emit_csv; rejects unknown headers or malformed fields.
ParsedResults parse_results_csv_text(const std::string& text);
ParsedResults parse_results_csv(const std::string& path);

std::string aggregates_csv_text(const std::string& experiment,
                                const std::vector<AggregateRecord>& aggregates);

void emit_aggregates_csv(const std::string& experiment,
                         const std::vector<AggregateRecord>& aggregates,
                         const std::string& path);

}  // namespace fairsim
