#pragma once

// Column-labelled tabular output for sweeps, and its CSV form.
// Numbers are written in scientific notation with 12 significant digits.

#include "pomt/error.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace pomt {

struct SweepColumn {
    std::string name;
    std::vector<double> values;

    bool operator==(const SweepColumn&) const = default;
};

class SweepResult {
public:
    SweepResult() = default;

    SweepResult& add_column(std::string name, std::vector<double> values) {
        if (!columns_.empty() && values.size() != rows())
            throw ValidationError("column '" + name + "' length does not match the table");
        for (const auto& c : columns_)
            if (c.name == name) throw ValidationError("duplicate column '" + name + "'");
        columns_.push_back({std::move(name), std::move(values)});
        return *this;
    }

    std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().values.size(); }
    const std::vector<SweepColumn>& columns() const noexcept { return columns_; }

    const std::vector<double>& column(std::string_view name) const {
        for (const auto& c : columns_)
            if (c.name == name) return c.values;
        throw ValidationError("no column named '" + std::string(name) + "'");
    }

    bool operator==(const SweepResult&) const = default;

private:
    std::vector<SweepColumn> columns_;
};

/// 12-significant-digit scientific rendering used by every emitted file.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

inline void write_csv(std::ostream& os, const SweepResult& table) {
    const auto& cols = table.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c].name;
    os << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << format_number(cols[c].values[r]);
        os << '\n';
    }
}

inline std::string to_csv(const SweepResult& table) {
    std::ostringstream os;
    write_csv(os, table);
    return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_double(const std::string& text, std::size_t row, std::size_t col) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size() || errno == ERANGE)
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": not a number: '" + text + "'");
    return v;
}

} // namespace detail

inline SweepResult read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty CSV input");
    const auto names = detail::split_csv_line(line);
    std::vector<std::vector<double>> data(names.size());
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != names.size())
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(names.size()) +
                             " cells, found " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) data[c].push_back(detail::parse_double(cells[c], row, c));
    }
    SweepResult table;
    for (std::size_t c = 0; c < names.size(); ++c) table.add_column(names[c], std::move(data[c]));
    return table;
}

inline SweepResult read_csv(std::string_view text) {
    std::istringstream is{std::string(text)};
    return read_csv(is);
}

/// Writes `contents` next to `path` and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io, "cannot open '" + tmp.string() + "' for writing");
        out << contents;
        if (!out) throw Error(ErrorCode::io, "failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::io, "cannot rename '" + tmp.string() + "': " + ec.message());
}

} // namespace pomt
