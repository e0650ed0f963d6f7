#pragma once

// Minimal CSV writing and reading for experiment outputs. Fields never
// contain commas or quotes, so no quoting is done. Empty fields stand for
// missing values.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cusp::csv {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
std::string format(double x);

class Writer {
public:
    Writer(const std::filesystem::path& path, std::vector<std::string> header);

    Writer& field(double x);
    Writer& field(std::int64_t x);
    Writer& field(std::uint64_t x);
    Writer& field(int x) { return field(static_cast<std::int64_t>(x)); }
    Writer& field(const std::string& s);
    Writer& field(const char* s) { return field(std::string(s)); }
    template <class T>
    Writer& field(const std::optional<T>& x) {
        return x ? field(*x) : field(std::string());
    }
    /// Ends the row; throws CsvError if the field count does not match the header.
    void end_row();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::vector<std::string> row_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const; // throws CsvError if absent
    /// Numeric column; empty fields become nullopt. Throws CsvError on text that is not a number.
    std::vector<std::optional<double>> numbers(const std::string& name) const;
    std::vector<std::string> text(const std::string& name) const;
};

Table read(const std::filesystem::path& path);

} // namespace cusp::csv
