#include "fairsim/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <variant>
#include <vector>

namespace fairsim {

namespace {

// Minimal TOML subset: [section] headers, key = value lines, values are
// strings, numbers, booleans or flat arrays of numbers, # comments. That is
// the whole configuration surface; nested tables are rejected up front.
struct TomlValue {
    std::variant<std::string, double, bool, std::vector<double>> data;
    int line = 0;
};

using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

[[noreturn]] void fail(int line, const std::string& message) {
    throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

double parse_number(const std::string& text, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + text + "'");
    }
    if (pos != text.size()) fail(line, "trailing characters after number: '" + text + "'");
    return v;
}

TomlValue parse_value(const std::string& raw, int line) {
    TomlValue v;
    v.line = line;
    const std::string text = trim(raw);
    if (text.empty()) fail(line, "missing value");
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            fail(line, "unterminated string " + text);
        v.data = text.substr(1, text.size() - 2);
    } else if (text == "true" || text == "false") {
        v.data = (text == "true");
    } else if (text.front() == '[') {
        if (text.back() != ']') fail(line, "unterminated array " + text);
        std::vector<double> items;
        std::string body = text.substr(1, text.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(line, "empty array element");
            items.push_back(parse_number(item, line));
        }
        v.data = std::move(items);
    } else {
        v.data = parse_number(text, line);
    }
    return v;
}

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header " + line);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty() || section.find('.') != std::string::npos)
                fail(line_no, "malformed section header " + line);
            table[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(line_no, "empty key");
        if (section.empty()) fail(line_no, "key '" + key + "' outside any [section]");
        if (table[section].count(key)) fail(line_no, "duplicate key '" + section + "." + key + "'");
        table[section][key] = parse_value(line.substr(eq + 1), line_no);
    }
    return table;
}

// Typed accessors over one section with consumed-key tracking.
class Section {
public:
    Section(const TomlTable& table, std::string name) : name_(std::move(name)) {
        auto it = table.find(name_);
        if (it != table.end()) entries_ = &it->second;
    }

    bool present() const { return entries_ != nullptr; }

    std::optional<double> number(const std::string& key) {
        const TomlValue* v = fetch(key);
        if (!v) return std::nullopt;
        if (const double* d = std::get_if<double>(&v->data)) return *d;
        fail(v->line, path(key) + ": expected a number");
    }

    std::optional<std::string> string(const std::string& key) {
        const TomlValue* v = fetch(key);
        if (!v) return std::nullopt;
        if (const std::string* s = std::get_if<std::string>(&v->data)) return *s;
        fail(v->line, path(key) + ": expected a quoted string");
    }

    std::optional<std::vector<double>> array(const std::string& key) {
        const TomlValue* v = fetch(key);
        if (!v) return std::nullopt;
        if (const auto* a = std::get_if<std::vector<double>>(&v->data)) return *a;
        fail(v->line, path(key) + ": expected an array of numbers");
    }

    double require_number(const std::string& key) {
        auto v = number(key);
        if (!v) throw ConfigError(path(key) + ": required key missing");
        return *v;
    }

    std::string require_string(const std::string& key) {
        auto v = string(key);
        if (!v) throw ConfigError(path(key) + ": required key missing");
        return *v;
    }

    std::vector<double> require_array(const std::string& key) {
        auto v = array(key);
        if (!v) throw ConfigError(path(key) + ": required key missing");
        return *v;
    }

    bool consumed(const std::string& key) const { return used_.count(key) > 0; }

    void reject_unknown() const {
        if (!entries_) return;
        for (const auto& [key, value] : *entries_)
            if (!used_.count(key))
                fail(value.line, "unknown key '" + name_ + "." + key + "'");
    }

    std::string path(const std::string& key) const { return name_ + "." + key; }

private:
    const TomlValue* fetch(const std::string& key) {
        if (!entries_) return nullptr;
        auto it = entries_->find(key);
        if (it == entries_->end()) return nullptr;
        used_.insert(key);
        return &it->second;
    }

    std::string name_;
    const std::map<std::string, TomlValue>* entries_ = nullptr;
    std::set<std::string> used_;
};

long checked_integer(double v, const std::string& path) {
    if (std::floor(v) != v)
        throw ConfigError(path + ": expected an integer, got " + std::to_string(v));
    return static_cast<long>(v);
}

Features checked_coeffs(const std::vector<double>& v, const std::string& path) {
    if (v.size() != 3) throw ConfigError(path + ": expected exactly 3 coefficients");
    return Features{v[0], v[1], v[2]};
}

BiasKind parse_kind(const std::string& s, const std::string& path) {
    if (s == "UnderRepresentation") return BiasKind::UnderRepresentation;
    if (s == "Sampling") return BiasKind::Sampling;
    if (s == "LabelNoise") return BiasKind::LabelNoise;
    if (s == "FeatureMissing") return BiasKind::FeatureMissing;
    throw ConfigError(path + ": unknown bias kind '" + s +
                      "'; expected UnderRepresentation, Sampling, LabelNoise or "
                      "FeatureMissing");
}

BiasScope parse_scope(const std::string& s, const std::string& path) {
    if (s == "WholeMinority") return BiasScope::WholeMinority;
    if (s == "PositiveMinority") return BiasScope::PositiveMinority;
    if (s == "NegativeMinorityComplement") return BiasScope::NegativeMinorityComplement;
    throw ConfigError(path + ": unknown scope '" + s +
                      "'; expected WholeMinority, PositiveMinority or "
                      "NegativeMinorityComplement");
}

InterventionKind parse_intervention(const std::string& s, const std::string& path) {
    if (s == "None") return InterventionKind::None;
    if (s == "GridSearchEO") return InterventionKind::GridSearchEO;
    if (s == "PostProcessEO") return InterventionKind::PostProcessEO;
    if (s == "CorrelationRemover") return InterventionKind::CorrelationRemover;
    throw ConfigError(path + ": unknown intervention '" + s +
                      "'; expected None, GridSearchEO, PostProcessEO or CorrelationRemover");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    const TomlTable table = parse_toml(text);
    static const std::set<std::string> known_sections = {"generation", "bias", "intervention",
                                                         "harness"};
    for (const auto& [section, entries] : table) {
        if (!known_sections.count(section)) {
            const int line = entries.empty() ? 0 : entries.begin()->second.line;
            throw ConfigError("config line " + std::to_string(line) + ": unknown section [" +
                              section + "]");
        }
    }

    ExperimentConfig cfg;
    Section gen(table, "generation");
    Section bias(table, "bias");
    Section intervention(table, "intervention");
    Section harness(table, "harness");

    // [generation]
    const long n_total = checked_integer(gen.require_number("n"), gen.path("n"));
    if (n_total < 2 || n_total % 2 != 0)
        throw ConfigError(gen.path("n") +
                          ": total sample count per run must be even and >= 2 (half for "
                          "training, half for testing)");
    cfg.gen.n = static_cast<std::size_t>(n_total / 2);
    if (auto r = gen.number("minority_fraction")) cfg.gen.minority_fraction = *r;
    if (auto eta = gen.number("noise")) {
        if (!(*eta >= 0.0 && *eta < 0.5))
            throw ConfigError(gen.path("noise") + ": noise must be < 0.5 and >= 0, got " +
                              std::to_string(*eta));
        cfg.gen.bayes.noise_majority = *eta;
        cfg.gen.bayes.noise_minority = *eta;
    }
    if (auto a = gen.array("coeffs_a"))
        cfg.gen.bayes.coeffs_a = checked_coeffs(*a, gen.path("coeffs_a"));
    if (auto b = gen.array("coeffs_b"))
        cfg.gen.bayes.coeffs_b = checked_coeffs(*b, gen.path("coeffs_b"));
    if (auto d = gen.number("base_rate_difference")) cfg.base_rate_difference = *d;

    // [bias]
    cfg.bias.kind = parse_kind(bias.require_string("kind"), bias.path("kind"));
    switch (cfg.bias.kind) {
        case BiasKind::UnderRepresentation: cfg.bias.scope = BiasScope::PositiveMinority; break;
        default: cfg.bias.scope = BiasScope::WholeMinority; break;
    }
    if (auto scope = bias.string("scope"))
        cfg.bias.scope = parse_scope(*scope, bias.path("scope"));
    if (auto index = bias.number("feature_index")) {
        if (cfg.bias.kind != BiasKind::FeatureMissing)
            throw ConfigError(bias.path("feature_index") +
                              ": only valid for kind = \"FeatureMissing\"");
        cfg.bias.feature_index =
            static_cast<int>(checked_integer(*index, bias.path("feature_index")));
    }

    // [harness]
    if (auto name = harness.string("name")) cfg.name = *name;
    cfg.repetitions = static_cast<int>(
        checked_integer(harness.require_number("repetitions"), harness.path("repetitions")));
    cfg.master_seed = static_cast<std::uint64_t>(
        checked_integer(harness.require_number("master_seed"), harness.path("master_seed")));
    std::string sweep = "bias";
    if (auto s = harness.string("sweep")) sweep = *s;
    if (sweep == "bias") {
        cfg.axis = SweepAxis::BiasLevel;
        cfg.levels = bias.require_array("levels");
        if (harness.number("fixed_bias_level") || harness.array("base_rate_levels"))
            throw ConfigError(
                "harness: fixed_bias_level/base_rate_levels are only valid with sweep = "
                "\"base_rate\"");
    } else if (sweep == "base_rate") {
        cfg.axis = SweepAxis::BaseRateDifference;
        cfg.levels = harness.require_array("base_rate_levels");
        cfg.bias.level = harness.require_number("fixed_bias_level");
        if (bias.array("levels"))
            throw ConfigError("bias.levels: not allowed with sweep = \"base_rate\"; use "
                              "harness.base_rate_levels");
    } else {
        throw ConfigError(harness.path("sweep") + ": expected \"bias\" or \"base_rate\", got '" +
                          sweep + "'");
    }

    // [intervention]
    if (auto method = intervention.string("method"))
        cfg.intervention = parse_intervention(*method, intervention.path("method"));
    else
        cfg.intervention = InterventionKind::None;
    if (auto limit = intervention.number("lambda_limit")) cfg.grid.lambda_limit = *limit;
    if (auto size = intervention.number("grid_size"))
        cfg.grid.grid_size = static_cast<int>(checked_integer(*size, intervention.path("grid_size")));
    if (auto w = intervention.number("tradeoff_weight")) cfg.grid.tradeoff_weight = *w;
    if (auto s = intervention.number("disparity_slack")) cfg.grid.disparity_slack = *s;
    if (auto alpha = intervention.number("alpha")) {
        if (cfg.intervention != InterventionKind::CorrelationRemover)
            throw ConfigError(intervention.path("alpha") +
                              ": only valid for method = \"CorrelationRemover\"");
        cfg.correlation_alpha = *alpha;
    }

    gen.reject_unknown();
    bias.reject_unknown();
    intervention.reject_unknown();
    harness.reject_unknown();

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace fairsim
