#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sslvar/core/dataset.hpp"
#include "sslvar/core/errors.hpp"

namespace sslvar::csv {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// from_chars is locale independent; a leading '+' is accepted for convenience.
inline double parse_number(std::string_view field, const std::string& source, std::size_t line, std::size_t column) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    if (field.empty()) throw ParseError(source, line, column, "empty field");
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(source, line, column, "not a number: '" + std::string(field) + "'");
    if (!std::isfinite(value)) throw ParseError(source, line, column, "non-finite value");
    return value;
}

} // namespace detail

/// Headerless numeric CSV; every non-blank line must have the same field count.
inline std::vector<std::vector<double>> read_rows(std::istream& in, const std::string& source = "<stream>") {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        std::string_view rest(line);
        std::size_t column = 1;
        while (true) {
            const auto comma = rest.find(',');
            row.push_back(detail::parse_number(rest.substr(0, comma), source, line_no, column));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
            ++column;
        }
        if (rows.empty()) {
            width = row.size();
        } else if (row.size() != width) {
            throw ParseError(source, line_no, 0,
                             "ragged row: expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source, line_no, 0, "no data rows");
    return rows;
}

inline Matrix read_matrix(std::istream& in, const std::string& source = "<stream>") {
    const auto rows = read_rows(in, source);
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return m;
}

inline Vector read_vector(std::istream& in, const std::string& source = "<stream>") {
    const auto rows = read_rows(in, source);
    if (rows.front().size() != 1) throw ParseError(source, 1, 0, "expected a single column");
    Vector v(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) v[static_cast<Index>(i)] = rows[i][0];
    return v;
}

inline Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_matrix(in, path);
}

inline Vector read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_vector(in, path);
}

/// Shortest round-trip decimal text for a double.
inline std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

} // namespace sslvar::csv
