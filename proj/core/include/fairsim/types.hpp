#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairsim {

/// Demographic group label. A is the majority group, B the minority.
enum class Group : std::uint8_t { A = 0, B = 1 };

inline const char* to_string(Group g) { return g == Group::A ? "A" : "B"; }

using Features = std::array<double, 3>;

/// Column-aligned sample table. `label` is the observed (noisy) label,
/// `bayes_label` the retained noiseless output of the generating labeler.
struct Dataset {
    std::vector<Features> features;
    std::vector<Group> group;
    std::vector<std::uint8_t> label;
    std::vector<std::uint8_t> bayes_label;

    std::size_t size() const { return features.size(); }

    void reserve(std::size_t n) {
        features.reserve(n);
        group.reserve(n);
        label.reserve(n);
        bayes_label.reserve(n);
    }

    void push_row(const Features& x, Group g, std::uint8_t y, std::uint8_t ystar) {
        features.push_back(x);
        group.push_back(g);
        label.push_back(y);
        bayes_label.push_back(ystar);
    }
};

inline bool operator==(const Dataset& a, const Dataset& b) {
    return a.features == b.features && a.group == b.group && a.label == b.label &&
           a.bayes_label == b.bayes_label;
}

/// A (group, label) conditioning cell required by a computation is empty.
class EmptyCellError : public std::runtime_error {
public:
    EmptyCellError(Group g, int label)
        : std::runtime_error(std::string("empty (group, label) cell: (") + to_string(g) + ", " +
                             std::to_string(label) + ")"),
          group(g),
          label_value(label) {}

    Group group;
    int label_value;
};

/// Training data cannot identify a maximum-likelihood model (a target class
/// carries zero total weight).
class DegenerateDataError : public std::runtime_error {
public:
    explicit DegenerateDataError(const std::string& what) : std::runtime_error(what) {}
};

/// An intervention's applicability precondition failed for this draw; the
/// run is reported and excluded rather than aborted.
class NotApplicableError : public std::runtime_error {
public:
    explicit NotApplicableError(const std::string& what) : std::runtime_error(what) {}
};

/// Both groups are required but only one is present.
class SingleGroupError : public std::runtime_error {
public:
    explicit SingleGroupError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration text failed validation; message carries the key path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairsim
