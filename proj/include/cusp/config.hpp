#pragma once

// Flat key = value experiment configuration checked against a per-experiment
// schema. Unknown keys and malformed values are rejected.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cusp::cli {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ValueType { integer, seed, real, text, integer_list, real_list };

std::string to_string(ValueType t);

struct KeySpec {
    std::string name;
    ValueType type = ValueType::integer;
    std::string fallback; // default, in the same text form a config file uses
    std::string help;
    bool positive = false; // numbers, and every list entry, must be > 0
};

using Schema = std::vector<KeySpec>;

/// Keys every experiment accepts: seed and trials.
Schema common_keys(std::uint64_t default_trials);

/// Key = value pairs in file order with their line numbers. '#' starts a
/// comment; blank lines are skipped. Throws ConfigError on syntax errors.
std::vector<std::pair<std::string, std::string>> read_pairs(std::istream& in);

class Config {
public:
    Config() = default;
    /// All keys at their defaults.
    Config(std::string experiment, Schema schema);

    const std::string& experiment() const { return experiment_; }
    const Schema& schema() const { return schema_; }

    /// Validates and stores a value; throws ConfigError for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);

    std::int64_t integer(const std::string& key) const;
    std::uint64_t seed(const std::string& key = "seed") const;
    double real(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    std::vector<std::int64_t> integers(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;

    /// "experiment = name" followed by every key in schema order. Reading it
    /// back yields an equal Config.
    std::string echo() const;

    bool operator==(const Config& o) const { return experiment_ == o.experiment_ && values_ == o.values_; }

private:
    const KeySpec& spec(const std::string& key) const;
    const std::string& raw(const std::string& key, ValueType expected) const;

    std::string experiment_;
    Schema schema_;
    std::map<std::string, std::string> values_; // canonical text
};

/// Canonical text of a value of the given type; throws ConfigError if malformed.
std::string canonical_value(const KeySpec& spec, const std::string& value);

} // namespace cusp::cli
