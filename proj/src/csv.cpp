#include "cusp/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace cusp::csv {

std::string format(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Writer::Writer(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw CsvError("cannot open " + path.string() + " for writing");
    row_ = std::move(header);
    end_row();
}

Writer& Writer::field(double x) {
    row_.push_back(format(x));
    return *this;
}

Writer& Writer::field(std::int64_t x) {
    row_.push_back(std::to_string(x));
    return *this;
}

Writer& Writer::field(std::uint64_t x) {
    row_.push_back(std::to_string(x));
    return *this;
}

Writer& Writer::field(const std::string& s) {
    if (s.find_first_of(",\"\n") != std::string::npos) throw CsvError("field needs quoting: " + s);
    row_.push_back(s);
    return *this;
}

void Writer::end_row() {
    if (row_.size() != columns_) throw CsvError("row has " + std::to_string(row_.size()) + " fields, expected " +
                                                std::to_string(columns_));
    for (std::size_t i = 0; i < row_.size(); ++i) {
        if (i) out_ << ',';
        out_ << row_[i];
    }
    out_ << '\n';
    row_.clear();
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw CsvError("missing column " + name);
}

std::vector<std::optional<double>> Table::numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<std::optional<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const std::string& s = row[c];
        if (s.empty()) {
            out.emplace_back();
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size()) throw CsvError("column " + name + ": not a number: " + s);
        out.emplace_back(v);
    }
    return out;
}

std::vector<std::string> Table::text(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<std::string> out;
    for (const auto& row : rows) out.push_back(row[c]);
    return out;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot read " + path.string());
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        if (!line.empty() && line.back() == ',') out.emplace_back();
        return out;
    };
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw CsvError(path.string() + ": empty file");
    t.header = split(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != t.header.size())
            throw CsvError(path.string() + ":" + std::to_string(lineno) + ": wrong field count");
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace cusp::csv
