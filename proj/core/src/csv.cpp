#include "fairsim/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fairsim {

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool record_less(const RunRecord& a, const RunRecord& b) {
    if (a.bias_level != b.bias_level) return a.bias_level < b.bias_level;
    if (a.run_index != b.run_index) return a.run_index < b.run_index;
    int c = std::strcmp(to_string(a.variant), to_string(b.variant));
    if (c != 0) return c < 0;
    c = std::strcmp(to_string(a.split), to_string(b.split));
    if (c != 0) return c < 0;
    c = std::strcmp(to_string(a.group), to_string(b.group));
    if (c != 0) return c < 0;
    return std::strcmp(to_string(a.metric), to_string(b.metric)) < 0;
}

template <typename T>
T parse_enum(const std::string& s, std::initializer_list<T> values, const char* what,
             std::size_t line) {
    for (T v : values)
        if (s == to_string(v)) return v;
    throw ConfigError("results csv line " + std::to_string(line) + ": unknown " + what + " '" +
                      s + "'");
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::string results_csv_text(const std::string& experiment,
                             const std::vector<RunRecord>& records) {
    std::vector<RunRecord> sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(), record_less);

    std::string out = kResultsCsvHeader;
    out += '\n';
    for (const RunRecord& r : sorted) {
        out += experiment;
        out += ',';
        out += std::to_string(r.run_index);
        out += ',';
        out += format_real(r.bias_level);
        out += ',';
        out += to_string(r.variant);
        out += ',';
        out += to_string(r.split);
        out += ',';
        out += to_string(r.group);
        out += ',';
        out += to_string(r.metric);
        out += ',';
        out += format_real(r.value);
        out += ',';
        out += to_string(r.status);
        out += '\n';
    }
    return out;
}

void emit_csv(const std::string& experiment, const std::vector<RunRecord>& records,
              const std::string& path) {
    write_file(path, results_csv_text(experiment, records));
}

ParsedResults parse_results_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("results csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kResultsCsvHeader)
        throw ConfigError("results csv: unexpected header '" + line + "'");

    ParsedResults out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 9)
            throw ConfigError("results csv line " + std::to_string(line_no) +
                              ": expected 9 fields, got " + std::to_string(fields.size()));
        if (out.records.empty())
            out.experiment = fields[0];
        else if (fields[0] != out.experiment)
            throw ConfigError("results csv line " + std::to_string(line_no) +
                              ": mixed experiment names");
        RunRecord r;
        try {
            r.run_index = std::stoi(fields[1]);
            r.bias_level = std::stod(fields[2]);
            r.value = std::stod(fields[7]);
        } catch (const std::exception&) {
            throw ConfigError("results csv line " + std::to_string(line_no) +
                              ": malformed numeric field");
        }
        r.variant = parse_enum(fields[3],
                               {ModelVariant::BayesAnalytic, ModelVariant::BayesDataDriven,
                                ModelVariant::Biased, ModelVariant::Intervened},
                               "model_variant", line_no);
        r.split = parse_enum(fields[4], {Split::Train, Split::Test}, "split", line_no);
        r.group = parse_enum(fields[5], {GroupScope::All, GroupScope::A, GroupScope::B},
                             "group", line_no);
        r.metric = parse_enum(fields[6],
                              {MetricName::Accuracy, MetricName::EoDisparity,
                               MetricName::Fidelity},
                              "metric", line_no);
        r.status = parse_enum(fields[8], {RecordStatus::Ok, RecordStatus::ExcludedNotApplicable},
                              "status", line_no);
        out.records.push_back(r);
    }
    return out;
}

ParsedResults parse_results_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open results csv: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_results_csv_text(buffer.str());
}

std::string aggregates_csv_text(const std::string& experiment,
                                const std::vector<AggregateRecord>& aggregates) {
    std::string out = "experiment,bias_level,model_variant,split,group,metric,mean,std,count\n";
    for (const AggregateRecord& a : aggregates) {
        out += experiment;
        out += ',';
        out += format_real(a.bias_level);
        out += ',';
        out += to_string(a.variant);
        out += ',';
        out += to_string(a.split);
        out += ',';
        out += to_string(a.group);
        out += ',';
        out += to_string(a.metric);
        out += ',';
        out += format_real(a.mean);
        out += ',';
        out += format_real(a.stddev);
        out += ',';
        out += std::to_string(a.count);
        out += '\n';
    }
    return out;
}

void emit_aggregates_csv(const std::string& experiment,
                         const std::vector<AggregateRecord>& aggregates,
                         const std::string& path) {
    write_file(path, aggregates_csv_text(experiment, aggregates));
}

}  // namespace fairsim
