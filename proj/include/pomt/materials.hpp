#pragma once

// Materials dataset (33-components of the piezoelectric and photoelastic
// tensors), the electromechanical and optomechanical figures of merit, and
// ranking. Densities stay in g/cm^3 here, as tabulated.

#include "pomt/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace pomt::materials {

enum class H33Flag { value, zero_centrosymmetric, zero_piezo_class, unknown };
enum class IrFlag { value, unknown, opaque };
enum class Fab { yes, front_end_compatible, no };
enum class FomKind { em, om };

struct MaterialRecord {
    std::string name;
    std::optional<double> h33;  // V/m as tabulated
    H33Flag h33_flag = H33Flag::value;
    std::optional<double> eps33_rf;
    std::optional<double> eps33_ir;
    IrFlag eps33_ir_flag = IrFlag::value;
    std::optional<double> rho;  // g/cm^3
    std::optional<double> p33;
    Fab fab = Fab::no;
    std::string notes;

    bool operator==(const MaterialRecord&) const = default;
};

inline constexpr std::string_view csv_header =
    "name,h33,h33_flag,eps33_rf,eps33_ir,eps33_ir_flag,rho_gcc,p33,p33_flag,fab,notes";

inline std::string_view to_string(H33Flag f) {
    switch (f) {
    case H33Flag::value: return "";
    case H33Flag::zero_centrosymmetric: return "c.s.";
    case H33Flag::zero_piezo_class: return "pz";
    case H33Flag::unknown: return "?";
    }
    return "";
}

inline std::string_view to_string(IrFlag f) {
    switch (f) {
    case IrFlag::value: return "";
    case IrFlag::unknown: return "?";
    case IrFlag::opaque: return "op";
    }
    return "";
}

inline std::string_view to_string(Fab f) {
    switch (f) {
    case Fab::yes: return "yes";
    case Fab::front_end_compatible: return "fc";
    case Fab::no: return "no";
    }
    return "";
}

inline Fab parse_fab(std::string_view s) {
    if (s == "yes") return Fab::yes;
    if (s == "fc") return Fab::front_end_compatible;
    if (s == "no") return Fab::no;
    throw ParseError("unknown fab marker '" + std::string(s) + "' (expected yes, fc or no)");
}

/// Figure-of-merit value, or the reason it cannot be computed.
struct FomValue {
    std::optional<double> value;
    std::string reason;

    bool defined() const noexcept { return value.has_value(); }
    static FomValue of(double v) { return {v, {}}; }
    static FomValue undefined(std::string why) { return {std::nullopt, std::move(why)}; }
};

struct FomResult {
    FomValue em;
    FomValue om;
};

inline void validate(const MaterialRecord& r) {
    if (r.name.empty()) throw ValidationError("material name is empty");
    const auto where = "material '" + r.name + "': ";
    if (r.h33.has_value() != (r.h33_flag == H33Flag::value))
        throw ValidationError(where + "h33 must carry either a value or a flag");
    if (r.eps33_ir.has_value() != (r.eps33_ir_flag == IrFlag::value))
        throw ValidationError(where + "eps33_ir must carry either a value or a flag");
    if (r.rho && !(*r.rho > 0.0)) throw ValidationError(where + "density must be positive");
    for (auto v : {r.h33, r.eps33_rf, r.eps33_ir, r.rho, r.p33})
        if (v && !std::isfinite(*v)) throw ValidationError(where + "non-finite value");
}

/// h33 sqrt(eps33_rf / rho).
inline FomValue em_fom(const MaterialRecord& r) {
    if (r.h33_flag == H33Flag::zero_centrosymmetric || r.h33_flag == H33Flag::zero_piezo_class)
        return FomValue::of(0.0);
    if (!r.h33) return FomValue::undefined("h33 unknown");
    if (*r.h33 == 0.0) return FomValue::of(0.0);
    if (!r.eps33_rf) return FomValue::undefined("eps33 (RF) unknown");
    if (!r.rho) return FomValue::undefined("density unknown");
    return FomValue::of(*r.h33 * std::sqrt(*r.eps33_rf / *r.rho));
}

/// eps33_ir p33 / sqrt(rho).
inline FomValue om_fom(const MaterialRecord& r) {
    if (r.eps33_ir_flag == IrFlag::opaque) return FomValue::undefined("opaque at IR");
    if (!r.eps33_ir) return FomValue::undefined("eps33 (IR) unknown");
    if (!r.p33) return FomValue::undefined("p33 unknown");
    if (!r.rho) return FomValue::undefined("density unknown");
    return FomValue::of(*r.eps33_ir * *r.p33 / std::sqrt(*r.rho));
}

inline FomResult figures_of_merit(const MaterialRecord& r) { return {em_fom(r), om_fom(r)}; }

inline FomValue fom(const MaterialRecord& r, FomKind which) { return which == FomKind::em ? em_fom(r) : om_fom(r); }

struct RankedEntry {
    std::string name;
    FomValue fom;
    Fab fab;
};

/// Descending |FOM|, ties broken by name; undefined entries last (by name).
/// `allowed_fab` empty means no filter.
inline std::vector<RankedEntry> rank(const std::vector<MaterialRecord>& records, FomKind which,
                                     const std::set<Fab>& allowed_fab = {}) {
    std::vector<RankedEntry> out;
    for (const auto& r : records)
        if (allowed_fab.empty() || allowed_fab.count(r.fab)) out.push_back({r.name, fom(r, which), r.fab});
    std::sort(out.begin(), out.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.fom.defined() != b.fom.defined()) return a.fom.defined();
        if (a.fom.defined()) {
            const double x = std::abs(*a.fom.value), y = std::abs(*b.fom.value);
            if (x != y) return x > y;
        }
        return a.name < b.name;
    });
    return out;
}

// ---------------------------------------------------------------- CSV

namespace detail {

/// One CSV record; double quotes protect commas and are escaped by doubling.
inline std::vector<std::string> split_record(const std::string& line, std::size_t row) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char ch = line[k];
        if (quoted) {
            if (ch == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    cell += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    if (quoted) throw ParseError("row " + std::to_string(row) + ": unterminated quote");
    out.push_back(std::move(cell));
    return out;
}

inline std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}

inline std::optional<double> parse_optional(const std::string& s, std::size_t row, std::string_view column) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("row " + std::to_string(row) + ", column " + std::string(column) + ": not a number: '" +
                         s + "'");
    return v;
}

inline std::string format_optional(const std::optional<double>& v) {
    if (!v) return {};
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *v);
    return std::string(buf, ptr);
}

} // namespace detail

inline std::vector<MaterialRecord> read_materials(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty materials file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header) throw ParseError("row 0: header must be '" + std::string(csv_header) + "'");
    static constexpr std::string_view columns[] = {"name", "h33", "h33_flag", "eps33_rf", "eps33_ir",
                                                    "eps33_ir_flag", "rho_gcc", "p33", "p33_flag", "fab", "notes"};
    std::vector<MaterialRecord> out;
    std::set<std::string> seen;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = detail::split_record(line, row);
        if (cells.size() != std::size(columns))
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(std::size(columns)) +
                             " columns, found " + std::to_string(cells.size()));
        auto bad_flag = [&](std::size_t col, const std::string& v) {
            return ParseError("row " + std::to_string(row) + ", column " + std::string(columns[col]) +
                              ": unknown flag '" + v + "'");
        };
        MaterialRecord r;
        r.name = cells[0];
        r.h33 = detail::parse_optional(cells[1], row, columns[1]);
        if (cells[2].empty()) r.h33_flag = H33Flag::value;
        else if (cells[2] == "c.s.") r.h33_flag = H33Flag::zero_centrosymmetric;
        else if (cells[2] == "pz") r.h33_flag = H33Flag::zero_piezo_class;
        else if (cells[2] == "?") r.h33_flag = H33Flag::unknown;
        else throw bad_flag(2, cells[2]);
        r.eps33_rf = detail::parse_optional(cells[3], row, columns[3]);
        r.eps33_ir = detail::parse_optional(cells[4], row, columns[4]);
        if (cells[5].empty()) r.eps33_ir_flag = IrFlag::value;
        else if (cells[5] == "?") r.eps33_ir_flag = IrFlag::unknown;
        else if (cells[5] == "op") r.eps33_ir_flag = IrFlag::opaque;
        else throw bad_flag(5, cells[5]);
        r.rho = detail::parse_optional(cells[6], row, columns[6]);
        r.p33 = detail::parse_optional(cells[7], row, columns[7]);
        if (cells[8] == "?") {
            if (r.p33) throw ParseError("row " + std::to_string(row) + ", column p33_flag: flag set but p33 has a value");
        } else if (!cells[8].empty()) {
            throw bad_flag(8, cells[8]);
        } else if (!r.p33) {
            throw ParseError("row " + std::to_string(row) + ", column p33: empty without a '?' flag");
        }
        try {
            r.fab = parse_fab(cells[9]);
        } catch (const ParseError& e) {
            throw ParseError("row " + std::to_string(row) + ", column fab: " + e.what());
        }
        r.notes = cells[10];
        try {
            validate(r);
        } catch (const ValidationError& e) {
            throw ParseError("row " + std::to_string(row) + ": " + e.what());
        }
        if (!seen.insert(r.name).second)
            throw ParseError("row " + std::to_string(row) + ": duplicate material name '" + r.name + "'");
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<MaterialRecord> load_materials(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
    try {
        return read_materials(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// Shortest round-trip number formatting, so load -> write -> load is exact.
inline void write_materials(std::ostream& os, const std::vector<MaterialRecord>& records) {
    os << csv_header << '\n';
    for (const auto& r : records) {
        os << detail::quote_if_needed(r.name) << ',' << detail::format_optional(r.h33) << ','
           << to_string(r.h33_flag) << ',' << detail::format_optional(r.eps33_rf) << ','
           << detail::format_optional(r.eps33_ir) << ',' << to_string(r.eps33_ir_flag) << ','
           << detail::format_optional(r.rho) << ',' << detail::format_optional(r.p33) << ','
           << (r.p33 ? "" : "?") << ',' << to_string(r.fab) << ',' << detail::quote_if_needed(r.notes) << '\n';
    }
}

inline std::string to_csv(const std::vector<MaterialRecord>& records) {
    std::ostringstream os;
    write_materials(os, records);
    return os.str();
}

} // namespace pomt::materials
