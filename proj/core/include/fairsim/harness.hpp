#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairsim/bias.hpp"
#include "fairsim/interventions.hpp"
#include "fairsim/synthgen.hpp"
#include "fairsim/types.hpp"

namespace fairsim {

enum class InterventionKind { None, GridSearchEO, PostProcessEO, CorrelationRemover };
enum class SweepAxis { BiasLevel, BaseRateDifference };
enum class ModelVariant { BayesAnalytic, BayesDataDriven, Biased, Intervened };
enum class Split { Train, Test };
enum class GroupScope { All, A, B };
enum class MetricName { Accuracy, EoDisparity, Fidelity };
enum class RecordStatus { Ok, ExcludedNotApplicable };

const char* to_string(InterventionKind k);
const char* to_string(ModelVariant v);
const char* to_string(Split s);
const char* to_string(GroupScope g);
/// CSV name; fidelity is emitted as "fidelity_agreement" to make the
/// agreement-fraction convention explicit.
const char* to_string(MetricName m);
const char* to_string(RecordStatus s);

/// One sweep: generate, split, inject, fit the reference and intervened
/// models, evaluate over R repetitions of every grid level.
struct ExperimentConfig {
    std::string name = "experiment";
    GenConfig gen;  // gen.n rows per split; a run draws train and test independently
    BiasSpec bias;  // the level field is the fixed level for base-rate sweeps
    std::vector<double> levels;
    SweepAxis axis = SweepAxis::BiasLevel;
    std::optional<double> base_rate_difference;  // fixed majority shift for bias sweeps
    InterventionKind intervention = InterventionKind::GridSearchEO;
    GridSpec grid;
    double correlation_alpha = 1.0;
    int repetitions = 50;
    std::uint64_t master_seed = 424242;

    void validate() const;
};

struct RunRecord {
    int run_index = 0;
    double bias_level = 0.0;  // sweep value; the base-rate difference on that axis
    ModelVariant variant = ModelVariant::Biased;
    Split split = Split::Test;
    GroupScope group = GroupScope::All;
    MetricName metric = MetricName::Accuracy;
    double value = 0.0;
    RecordStatus status = RecordStatus::Ok;
};

struct AggregateRecord {
    double bias_level = 0.0;
    ModelVariant variant = ModelVariant::Biased;
    Split split = Split::Test;
    GroupScope group = GroupScope::All;
    MetricName metric = MetricName::Accuracy;
    double mean = 0.0;
    double stddev = 0.0;  // across ok runs, population convention
    int count = 0;        // ok runs entering the statistics
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::vector<AggregateRecord> aggregates;
};

/// Seed for one (level, run) task; depends only on the master seed and the
/// two indices so any subset of runs reproduces its records exactly.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::size_t level_index,
                              int run_index);

/// Executes one run at cfg.levels[level_index]: fresh train/test draws, bias
/// injected into the training split only, per-variant metrics on both splits.
/// Intervention preconditions that fail for the draw mark the intervened
/// records excluded instead of aborting.
std::vector<RunRecord> run_single(const ExperimentConfig& cfg, std::size_t level_index,
                                  int run_index);

/// Runs repetitions x levels independent tasks (in `workers` threads when
/// > 1) and aggregates per key. Output is byte-identical for any worker
/// count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers = 0);

std::vector<AggregateRecord> aggregate_records(const std::vector<RunRecord>& records);

/// Paper-figure configurations; repetitions default to the published 50.
ExperimentConfig preset(const std::string& name);
const std::vector<std::string>& preset_names();

}  // namespace fairsim
