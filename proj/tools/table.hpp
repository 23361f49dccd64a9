#pragma once

// Column tables with CSV (RFC 4180 quoting) and JSON writers. Doubles are printed
// with 12 significant digits in both formats.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qes::cli {

using Cell = std::variant<double, long long, bool, std::string>;
using ordered_json = nlohmann::ordered_json;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw std::logic_error("Table: row width does not match header");
        rows.push_back(std::move(row));
    }
};

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_cell(const Cell& c) {
    struct {
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return csv_quote(v); }
    } visit;
    return std::visit(visit, c);
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_quote(t.columns[i]);
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << "\n";
    }
}

/// A double rounded to 12 significant digits; non-finite values become null.
inline ordered_json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(format_double(v).c_str(), nullptr);
}

inline ordered_json json_cell(const Cell& c) {
    struct {
        ordered_json operator()(double v) const { return json_number(v); }
        ordered_json operator()(long long v) const { return v; }
        ordered_json operator()(bool v) const { return v; }
        ordered_json operator()(const std::string& v) const { return v; }
    } visit;
    return std::visit(visit, c);
}

inline void write_json(std::ostream& os, const Table& t, const ordered_json& config) {
    ordered_json doc;
    doc["config"] = config;
    doc["rows"] = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json obj = ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
        doc["rows"].push_back(std::move(obj));
    }
    os << doc.dump(2) << "\n";
}

}  // namespace qes::cli
