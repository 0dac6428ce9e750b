#pragma once

// CSV and JSON forms of an iteration table. Numbers are written with 17
// significant digits so a parsed CSV reproduces the doubles exactly.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "balmetric/dynamics.hpp"
#include "balmetric/errors.hpp"

namespace balmetric {

struct TableRow {
    std::size_t r = 0;
    std::vector<double> coeffs;
    double err = 0.0;
    std::optional<double> sigma_tilde;
    std::optional<double> bnd;

    bool operator==(const TableRow&) const = default;
};

struct TableMeta {
    std::string op;
    int n = 1;
    int k = 0;
    std::string normalization = "none";
    double rel_tol = 0.0;
    double conv_tol = kDefaultConvTol;
};

/// Rows of a trajectory; `sigma` overrides the per-step ratio column when given.
template <Metric M>
std::vector<TableRow> table_rows(const Trajectory<M>& t,
                                 const std::vector<std::optional<double>>* sigma = nullptr) {
    std::vector<TableRow> rows;
    rows.reserve(t.iterates.size());
    for (std::size_t r = 0; r < t.iterates.size(); ++r) {
        TableRow row;
        row.r = r;
        row.coeffs.assign(t.iterates[r].coeffs().begin(), t.iterates[r].coeffs().end());
        row.err = t.err[r];
        row.sigma_tilde = sigma ? (*sigma)[r] : t.sigma_tilde[r];
        if (r < t.bound.size()) row.bnd = t.bound[r];
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ValidationError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

/// Comma-separated positive numbers, e.g. "1,17,36".
inline std::vector<double> parse_number_list(std::string_view s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = std::min(s.find(',', pos), s.size());
        std::string_view item = s.substr(pos, comma - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        out.push_back(parse_double(item));
        pos = comma + 1;
    }
    return out;
}

inline void write_csv(std::ostream& os, const std::vector<TableRow>& rows) {
    const std::size_t width = rows.empty() ? 0 : rows.front().coeffs.size();
    os << "r";
    for (std::size_t i = 0; i < width; ++i) os << ",a_" << i;
    os << ",err,sigma_tilde,bnd\n";
    for (const auto& row : rows) {
        if (row.coeffs.size() != width) throw ValidationError("write_csv: ragged rows");
        os << row.r;
        for (double c : row.coeffs) os << ',' << format_double(c);
        os << ',' << format_double(row.err) << ',';
        if (row.sigma_tilde) os << format_double(*row.sigma_tilde);
        os << ',';
        if (row.bnd) os << format_double(*row.bnd);
        os << '\n';
    }
}

inline std::vector<TableRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("read_csv: empty input");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 4 || header.front() != "r" || header[header.size() - 3] != "err") {
        throw ValidationError("read_csv: unexpected header");
    }
    const std::size_t width = header.size() - 4;
    std::vector<TableRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cells.size() != header.size()) throw ValidationError("read_csv: wrong cell count");
        TableRow row;
        row.r = static_cast<std::size_t>(parse_double(cells[0]));
        for (std::size_t i = 0; i < width; ++i) row.coeffs.push_back(parse_double(cells[1 + i]));
        row.err = parse_double(cells[1 + width]);
        if (!cells[2 + width].empty()) row.sigma_tilde = parse_double(cells[2 + width]);
        if (!cells[3 + width].empty()) row.bnd = parse_double(cells[3 + width]);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json to_json(const TableMeta& meta, const std::vector<TableRow>& rows) {
    using nlohmann::json;
    json out;
    out["meta"] = {{"operator", meta.op},
                   {"n", meta.n},
                   {"k", meta.k},
                   {"normalization", meta.normalization},
                   {"tolerances", {{"quadrature_rel_tol", meta.rel_tol}, {"conv_tol", meta.conv_tol}}}};
    json arr = json::array();
    for (const auto& row : rows) {
        json j{{"r", row.r}, {"coeffs", row.coeffs}, {"err", row.err}};
        j["sigma_tilde"] = row.sigma_tilde ? json(*row.sigma_tilde) : json(nullptr);
        j["bnd"] = row.bnd ? json(*row.bnd) : json(nullptr);
        arr.push_back(std::move(j));
    }
    out["rows"] = std::move(arr);
    return out;
}

inline void write_json(std::ostream& os, const TableMeta& meta, const std::vector<TableRow>& rows) {
    os << to_json(meta, rows).dump(2) << '\n';
}

inline std::vector<TableRow> rows_from_json(const nlohmann::json& j) {
    std::vector<TableRow> rows;
    for (const auto& item : j.at("rows")) {
        TableRow row;
        row.r = item.at("r").get<std::size_t>();
        row.coeffs = item.at("coeffs").get<std::vector<double>>();
        row.err = item.at("err").get<double>();
        if (!item.at("sigma_tilde").is_null()) row.sigma_tilde = item["sigma_tilde"].get<double>();
        if (!item.at("bnd").is_null()) row.bnd = item["bnd"].get<double>();
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Two-column (x, rho) CSV.
inline void write_profile_csv(std::ostream& os, const DensityProfile& profile) {
    os << "x,rho\n";
    for (const auto& s : profile.samples) os << format_double(s.x) << ',' << format_double(s.rho) << '\n';
}

} // namespace balmetric
