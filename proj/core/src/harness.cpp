#include "fairsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "fairsim/glm.hpp"
#include "fairsim/metrics.hpp"

namespace fairsim {

const char* to_string(InterventionKind k) {
    switch (k) {
        case InterventionKind::None: return "None";
        case InterventionKind::GridSearchEO: return "GridSearchEO";
        case InterventionKind::PostProcessEO: return "PostProcessEO";
        case InterventionKind::CorrelationRemover: return "CorrelationRemover";
    }
    return "?";
}

const char* to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::BayesAnalytic: return "bayes_analytic";
        case ModelVariant::BayesDataDriven: return "bayes_datadriven";
        case ModelVariant::Biased: return "biased";
        case ModelVariant::Intervened: return "intervened";
    }
    return "?";
}

const char* to_string(Split s) { return s == Split::Train ? "train" : "test"; }

const char* to_string(GroupScope g) {
    switch (g) {
        case GroupScope::All: return "all";
        case GroupScope::A: return "A";
        case GroupScope::B: return "B";
    }
    return "?";
}

const char* to_string(MetricName m) {
    switch (m) {
        case MetricName::Accuracy: return "accuracy";
        case MetricName::EoDisparity: return "eo_disparity";
        case MetricName::Fidelity: return "fidelity_agreement";
    }
    return "?";
}

const char* to_string(RecordStatus s) {
    return s == RecordStatus::Ok ? "ok" : "excluded_not_applicable";
}

void ExperimentConfig::validate() const {
    gen.validate();
    grid.validate();
    if (repetitions < 1) throw ConfigError("harness.repetitions: must be >= 1");
    if (levels.empty()) throw ConfigError("harness: sweep level grid must be nonempty");
    if (!std::is_sorted(levels.begin(), levels.end()))
        throw ConfigError("harness: sweep levels must be sorted ascending");
    if (axis == SweepAxis::BiasLevel) {
        BiasSpec probe = bias;
        for (double level : levels) {
            probe.level = level;
            probe.validate();
        }
        if (base_rate_difference &&
            !(std::abs(*base_rate_difference) < 0.5))
            throw ConfigError(
                "generation.base_rate_difference: must lie strictly inside (-0.5, 0.5); "
                "the endpoint base rates 0 and 1 require an infinite feature shift");
    } else {
        bias.validate();
        for (double level : levels)
            if (!(std::abs(level) < 0.5))
                throw ConfigError(
                    "harness.base_rate_levels: each difference must lie strictly inside "
                    "(-0.5, 0.5)");
        if (base_rate_difference)
            throw ConfigError(
                "generation.base_rate_difference: not allowed when sweeping base rates");
    }
    if (!(correlation_alpha >= 0.0 && correlation_alpha <= 1.0))
        throw ConfigError("intervention.alpha: must be in [0, 1]");
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::size_t level_index,
                              int run_index) {
    return mix_seed(mix_seed(master_seed, 0x6c76 + level_index),
                    0x72756e + static_cast<std::uint64_t>(run_index));
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct RecordSink {
    std::vector<RunRecord>& out;
    int run_index;
    double level;

    void emit(ModelVariant v, Split s, GroupScope g, MetricName m, double value,
              RecordStatus status = RecordStatus::Ok) {
        out.push_back({run_index, level, v, s, g, m, value, status});
    }

    void emit_excluded_all(ModelVariant v) {
        for (Split s : {Split::Train, Split::Test}) {
            for (GroupScope g : {GroupScope::All, GroupScope::A, GroupScope::B}) {
                emit(v, s, g, MetricName::Accuracy, kNan, RecordStatus::ExcludedNotApplicable);
                emit(v, s, g, MetricName::EoDisparity, kNan,
                     RecordStatus::ExcludedNotApplicable);
                if (s == Split::Test)
                    emit(v, s, g, MetricName::Fidelity, kNan,
                         RecordStatus::ExcludedNotApplicable);
            }
        }
    }
};

struct GroupCounts {
    std::size_t a = 0;
    std::size_t b = 0;
};

GroupCounts count_groups(const Dataset& ds) {
    GroupCounts c;
    for (Group g : ds.group) (g == Group::A ? c.a : c.b) += 1;
    return c;
}

double group_agreement(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y,
                       std::span<const Group> groups, GroupScope scope) {
    std::size_t n = 0, agree = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (scope == GroupScope::A && groups[i] != Group::A) continue;
        if (scope == GroupScope::B && groups[i] != Group::B) continue;
        ++n;
        agree += ((x[i] != 0) == (y[i] != 0)) ? 1 : 0;
    }
    return n == 0 ? kNan : static_cast<double>(agree) / static_cast<double>(n);
}

// Emits accuracy/disparity records for one (variant, split); fidelity only on
// the test split, against the analytic labeler's output there. Metric values
// whose conditioning cells are empty become excluded records.
void evaluate_variant(RecordSink& sink, ModelVariant variant, Split split,
                      const Dataset& data, std::span<const std::uint8_t> preds) {
    const GroupCounts counts = count_groups(data);
    const bool have[3] = {data.size() > 0, counts.a > 0, counts.b > 0};
    const GroupScope scopes[3] = {GroupScope::All, GroupScope::A, GroupScope::B};

    for (int k = 0; k < 3; ++k) {
        if (!have[k]) {
            sink.emit(variant, split, scopes[k], MetricName::Accuracy, kNan,
                      RecordStatus::ExcludedNotApplicable);
            continue;
        }
        sink.emit(variant, split, scopes[k], MetricName::Accuracy,
                  group_agreement(preds, data.label, data.group, scopes[k]));
    }
    for (int k = 0; k < 3; ++k) {
        double value = kNan;
        RecordStatus status = RecordStatus::ExcludedNotApplicable;
        try {
            switch (scopes[k]) {
                case GroupScope::All:
                    value = eo_disparity(preds, data.group, data.label);
                    break;
                case GroupScope::A:
                    value = eo_disparity_group(preds, data.group, data.label, Group::A);
                    break;
                case GroupScope::B:
                    value = eo_disparity_group(preds, data.group, data.label, Group::B);
                    break;
            }
            status = RecordStatus::Ok;
        } catch (const EmptyCellError&) {
        }
        sink.emit(variant, split, scopes[k], MetricName::EoDisparity, value, status);
    }
    if (split == Split::Test) {
        for (int k = 0; k < 3; ++k) {
            if (!have[k]) {
                sink.emit(variant, split, scopes[k], MetricName::Fidelity, kNan,
                          RecordStatus::ExcludedNotApplicable);
                continue;
            }
            sink.emit(variant, split, scopes[k], MetricName::Fidelity,
                      group_agreement(preds, data.bayes_label, data.group, scopes[k]));
        }
    }
}

}  // namespace

std::vector<RunRecord> run_single(const ExperimentConfig& cfg, std::size_t level_index,
                                  int run_index) {
    cfg.validate();
    const double level = cfg.levels.at(level_index);
    const std::uint64_t seed = derive_run_seed(cfg.master_seed, level_index, run_index);
    const Rng base(seed);

    const double difference = (cfg.axis == SweepAxis::BaseRateDifference)
                                  ? level
                                  : cfg.base_rate_difference.value_or(0.0);
    GenConfig gen = cfg.gen;
    gen.feature_shift = (difference == 0.0)
                            ? 0.0
                            : calibrate_feature_shift(0.5 + difference, gen.bayes.coeffs_a);

    Rng train_rng = base.child(1);
    Rng test_rng = base.child(2);
    Rng bias_rng = base.child(3);
    const Dataset train_clean = sample_ground_truth(gen, train_rng);
    const Dataset test = sample_ground_truth(gen, test_rng);

    BiasSpec spec = cfg.bias;
    if (cfg.axis == SweepAxis::BiasLevel) spec.level = level;
    const Dataset train = apply_bias(train_clean, spec, bias_rng);

    std::vector<RunRecord> records;
    RecordSink sink{records, run_index, level};

    const ModelCoeffs analytic{0.0, gen.bayes.coeffs_a, gen.bayes.coeffs_b};
    evaluate_variant(sink, ModelVariant::BayesAnalytic, Split::Train, train,
                     predict_dataset(analytic, train));
    evaluate_variant(sink, ModelVariant::BayesAnalytic, Split::Test, test,
                     predict_dataset(analytic, test));

    auto fit_plain = [](const Dataset& ds) {
        std::vector<WeightedSample> samples(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) {
            samples[i].expanded_features = expand_features(ds.features[i], ds.group[i]);
            samples[i].target = ds.label[i];
            samples[i].weight = 1.0;
        }
        return fit_weighted_logreg(samples).model;
    };

    try {
        const ModelCoeffs datadriven = fit_plain(train_clean);
        evaluate_variant(sink, ModelVariant::BayesDataDriven, Split::Train, train,
                         predict_dataset(datadriven, train));
        evaluate_variant(sink, ModelVariant::BayesDataDriven, Split::Test, test,
                         predict_dataset(datadriven, test));
    } catch (const DegenerateDataError&) {
        sink.emit_excluded_all(ModelVariant::BayesDataDriven);
    }

    ModelCoeffs biased_model;
    bool have_biased = false;
    try {
        biased_model = fit_plain(train);
        have_biased = true;
        evaluate_variant(sink, ModelVariant::Biased, Split::Train, train,
                         predict_dataset(biased_model, train));
        evaluate_variant(sink, ModelVariant::Biased, Split::Test, test,
                         predict_dataset(biased_model, test));
    } catch (const DegenerateDataError&) {
        sink.emit_excluded_all(ModelVariant::Biased);
    }

    if (cfg.intervention != InterventionKind::None) {
        try {
            Rng train_pred_rng = base.child(100);
            Rng test_pred_rng = base.child(101);
            if (cfg.intervention == InterventionKind::CorrelationRemover) {
                // The remover is a data transform: fit on the transformed
                // training split and evaluate against transformed features;
                // labels and the fidelity reference stay untouched.
                const Dataset train_removed = correlation_remover(train, cfg.correlation_alpha);
                const Dataset test_removed = correlation_remover(test, cfg.correlation_alpha);
                const ModelCoeffs model = fit_plain(train_removed);
                evaluate_variant(sink, ModelVariant::Intervened, Split::Train, train,
                                 predict_dataset(model, train_removed));
                evaluate_variant(sink, ModelVariant::Intervened, Split::Test, test,
                                 predict_dataset(model, test_removed));
            } else {
                Predictor predictor;
                if (cfg.intervention == InterventionKind::GridSearchEO) {
                    predictor = grid_search_eo(train, cfg.grid);
                } else {
                    if (!have_biased)
                        throw NotApplicableError("post-processing without a base model");
                    const auto scores = score_dataset(biased_model, train);
                    predictor = threshold_postprocess(scores, train.group, train.label,
                                                      biased_model);
                }
                evaluate_variant(sink, ModelVariant::Intervened, Split::Train, train,
                                 apply_predictor_dataset(predictor, train, train_pred_rng));
                evaluate_variant(sink, ModelVariant::Intervened, Split::Test, test,
                                 apply_predictor_dataset(predictor, test, test_pred_rng));
            }
        } catch (const NotApplicableError&) {
            sink.emit_excluded_all(ModelVariant::Intervened);
        } catch (const EmptyCellError&) {
            sink.emit_excluded_all(ModelVariant::Intervened);
        } catch (const DegenerateDataError&) {
            sink.emit_excluded_all(ModelVariant::Intervened);
        } catch (const SingleGroupError&) {
            sink.emit_excluded_all(ModelVariant::Intervened);
        }
    }
    return records;
}

std::vector<AggregateRecord> aggregate_records(const std::vector<RunRecord>& records) {
    using Key = std::tuple<double, int, int, int, int>;
    struct Acc {
        double sum = 0.0;
        double sumsq = 0.0;
        int count = 0;
    };
    std::map<Key, Acc> acc;
    for (const RunRecord& r : records) {
        const Key key{r.bias_level, static_cast<int>(r.variant), static_cast<int>(r.split),
                      static_cast<int>(r.group), static_cast<int>(r.metric)};
        Acc& a = acc[key];  // excluded-only keys still appear with count 0
        if (r.status == RecordStatus::Ok) {
            a.sum += r.value;
            a.sumsq += r.value * r.value;
            a.count += 1;
        }
    }
    std::vector<AggregateRecord> out;
    out.reserve(acc.size());
    for (const auto& [key, a] : acc) {
        AggregateRecord rec;
        rec.bias_level = std::get<0>(key);
        rec.variant = static_cast<ModelVariant>(std::get<1>(key));
        rec.split = static_cast<Split>(std::get<2>(key));
        rec.group = static_cast<GroupScope>(std::get<3>(key));
        rec.metric = static_cast<MetricName>(std::get<4>(key));
        rec.count = a.count;
        if (a.count > 0) {
            rec.mean = a.sum / a.count;
            const double var = std::max(0.0, a.sumsq / a.count - rec.mean * rec.mean);
            rec.stddev = std::sqrt(var);
        } else {
            rec.mean = kNan;
            rec.stddev = kNan;
        }
        out.push_back(rec);
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers) {
    cfg.validate();
    const std::size_t n_levels = cfg.levels.size();
    const std::size_t n_tasks = n_levels * static_cast<std::size_t>(cfg.repetitions);
    std::vector<std::vector<RunRecord>> slots(n_tasks);

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n_tasks));

    auto run_task = [&](std::size_t task) {
        const std::size_t level_index = task / static_cast<std::size_t>(cfg.repetitions);
        const int run_index = static_cast<int>(task % static_cast<std::size_t>(cfg.repetitions));
        slots[task] = run_single(cfg, level_index, run_index);
    };

    if (workers <= 1) {
        for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t task = next.fetch_add(1);
                    if (task >= n_tasks) return;
                    try {
                        run_task(task);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error) error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

    ExperimentResult result;
    std::size_t total = 0;
    for (const auto& s : slots) total += s.size();
    result.records.reserve(total);
    for (const auto& s : slots)
        result.records.insert(result.records.end(), s.begin(), s.end());
    result.aggregates = aggregate_records(result.records);
    return result;
}

}  // namespace fairsim
