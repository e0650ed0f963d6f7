#include "cusp/config.hpp"

#include "cusp/csv.hpp"

#include <cmath>
#include <istream>
#include <sstream>

namespace cusp::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_real(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v)) throw ConfigError(key + ": not a finite number: '" + s + "'");
    return v;
}

// Integers may be written as 1e6; the value must be integral and exact.
long double parse_integral(const std::string& key, const std::string& s) {
    const bool plain = s.find_first_not_of("+-0123456789") == std::string::npos;
    if (plain) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(s, &used);
            if (used == s.size()) return static_cast<long double>(v);
        } catch (const std::out_of_range&) {
            if (s.front() != '-') {
                std::size_t used = 0;
                const unsigned long long u = std::stoull(s, &used);
                if (used == s.size()) return static_cast<long double>(u);
            }
        } catch (const std::exception&) {
        }
        throw ConfigError(key + ": not an integer: '" + s + "'");
    }
    const double v = parse_real(key, s);
    if (v != std::floor(v) || std::abs(v) > 9007199254740992.0) throw ConfigError(key + ": not an integer: '" + s + "'");
    return v;
}

std::string canonical_scalar(const KeySpec& spec, ValueType type, const std::string& s) {
    switch (type) {
    case ValueType::integer: {
        const long double v = parse_integral(spec.name, s);
        if (v < -9.2e18L || v > 9.2e18L) throw ConfigError(spec.name + ": integer out of range");
        if (spec.positive && v <= 0) throw ConfigError(spec.name + ": must be positive");
        return std::to_string(static_cast<long long>(v));
    }
    case ValueType::seed: {
        if (!s.empty() && s.front() == '-') throw ConfigError(spec.name + ": seeds are unsigned");
        if (s.find_first_not_of("0123456789") == std::string::npos && !s.empty()) {
            try {
                return std::to_string(std::stoull(s));
            } catch (const std::exception&) {
                throw ConfigError(spec.name + ": seed out of range");
            }
        }
        const long double v = parse_integral(spec.name, s);
        return std::to_string(static_cast<unsigned long long>(v));
    }
    case ValueType::real: {
        const double v = parse_real(spec.name, s);
        if (spec.positive && !(v > 0.0)) throw ConfigError(spec.name + ": must be positive");
        return csv::format(v);
    }
    default:
        throw std::logic_error("canonical_scalar: list or text type");
    }
}

} // namespace

std::string to_string(ValueType t) {
    switch (t) {
    case ValueType::integer: return "integer";
    case ValueType::seed: return "seed (unsigned 64-bit)";
    case ValueType::real: return "real";
    case ValueType::text: return "text";
    case ValueType::integer_list: return "comma-separated integers";
    case ValueType::real_list: return "comma-separated reals";
    }
    return "?";
}

Schema common_keys(std::uint64_t default_trials) {
    return {
        {"seed", ValueType::seed, "1", "base seed; trial i uses derive_seed(seed, i)", false},
        {"trials", ValueType::integer, std::to_string(default_trials), "number of independent trials", true},
    };
}

std::string canonical_value(const KeySpec& spec, const std::string& value) {
    const std::string v = trim(value);
    switch (spec.type) {
    case ValueType::text:
        if (v.find_first_of("#\n") != std::string::npos) throw ConfigError(spec.name + ": text may not contain '#' or newlines");
        return v;
    case ValueType::integer_list:
    case ValueType::real_list: {
        const auto items = split_list(v);
        if (items.empty() || v.empty()) throw ConfigError(spec.name + ": empty list");
        const ValueType scalar = spec.type == ValueType::integer_list ? ValueType::integer : ValueType::real;
        std::string out;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out += ",";
            out += canonical_scalar(spec, scalar, items[i]);
        }
        return out;
    }
    default:
        return canonical_scalar(spec, spec.type, v);
    }
}

std::vector<std::pair<std::string, std::string>> read_pairs(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

Config::Config(std::string experiment, Schema schema) : experiment_(std::move(experiment)), schema_(std::move(schema)) {
    for (const KeySpec& k : schema_) {
        if (values_.count(k.name)) throw std::logic_error("duplicate schema key " + k.name);
        values_[k.name] = canonical_value(k, k.fallback);
    }
}

const KeySpec& Config::spec(const std::string& key) const {
    for (const KeySpec& k : schema_)
        if (k.name == key) return k;
    throw ConfigError("unknown key '" + key + "' for experiment '" + experiment_ + "'");
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = canonical_value(spec(key), value); }

const std::string& Config::raw(const std::string& key, ValueType expected) const {
    if (spec(key).type != expected) throw std::logic_error("config key " + key + " read with the wrong type");
    return values_.at(key);
}

std::int64_t Config::integer(const std::string& key) const { return std::stoll(raw(key, ValueType::integer)); }

std::uint64_t Config::seed(const std::string& key) const { return std::stoull(raw(key, ValueType::seed)); }

double Config::real(const std::string& key) const { return std::stod(raw(key, ValueType::real)); }

const std::string& Config::text(const std::string& key) const { return raw(key, ValueType::text); }

std::vector<std::int64_t> Config::integers(const std::string& key) const {
    std::vector<std::int64_t> out;
    for (const auto& s : split_list(raw(key, ValueType::integer_list))) out.push_back(std::stoll(s));
    return out;
}

std::vector<double> Config::reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : split_list(raw(key, ValueType::real_list))) out.push_back(std::stod(s));
    return out;
}

std::string Config::echo() const {
    std::string out = "experiment = " + experiment_ + "\n";
    for (const KeySpec& k : schema_) out += k.name + " = " + values_.at(k.name) + "\n";
    return out;
}

} // namespace cusp::cli
