#pragma once

// Tabular output (CSV and JSON) and scan-range parsing.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "thermoq/errors.hpp"

namespace thermoq::io {

using Json = nlohmann::ordered_json;
using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    detail::require(row.size() == columns.size(),
                    "Table: row width does not match the column count");
    rows.push_back(std::move(row));
  }
};

/// 17 significant digits, '.' separator, "inf"/"-inf"/"nan" for
/// non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view s) {
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  if (s == "nan") return std::nan("");
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  detail::require(end != tmp.c_str() && *end == '\0',
                  "parse_double: not a number: '" + tmp + "'");
  return v;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

}  // namespace detail

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    os << (i ? "," : "") << detail::csv_field(t.columns[i]);
  }
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << detail::csv_field(detail::cell_text(row[i]));
    }
    os << '\n';
  }
}

/// RFC-4180 reader: returns header plus raw text fields.
inline std::vector<std::vector<std::string>> read_csv(std::istream& is) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      out.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (any) {
    row.push_back(std::move(field));
    out.push_back(std::move(row));
  }
  return out;
}

inline Json cell_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  if (const long long* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

inline Json to_json(const Table& t, const Json& meta) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r = Json::array();
    for (const Cell& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  Json out;
  out["meta"] = meta;
  out["columns"] = t.columns;
  out["rows"] = std::move(rows);
  return out;
}

inline void write_json(std::ostream& os, const Table& t, const Json& meta) {
  os << to_json(t, meta).dump(2) << '\n';
}

/// "start:stop:lin|log:count"; a bare number is a one-point range.
inline std::vector<double> parse_range(std::string_view spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() == 1) return {parse_double(parts[0])};
  ::thermoq::detail::require(parts.size() == 4,
                             "range must be start:stop:lin|log:count, got '" +
                                 std::string(spec) + "'");
  const double a = parse_double(parts[0]);
  const double b = parse_double(parts[1]);
  long count = 0;
  const auto res = std::from_chars(parts[3].data(),
                                   parts[3].data() + parts[3].size(), count);
  ::thermoq::detail::require(
      res.ec == std::errc() && res.ptr == parts[3].data() + parts[3].size() &&
          count >= 1,
      "range count must be a positive integer");
  ::thermoq::detail::require(std::isfinite(a) && std::isfinite(b),
                             "range bounds must be finite");
  std::vector<double> out;
  if (count == 1) return {a};
  if (parts[2] == "lin") {
    for (long i = 0; i < count; ++i) {
      out.push_back(i == count - 1 ? b
                                   : a + (b - a) * static_cast<double>(i) /
                                             static_cast<double>(count - 1));
    }
  } else if (parts[2] == "log") {
    ::thermoq::detail::require(a > 0.0 && b > 0.0,
                               "log range bounds must be > 0");
    const double la = std::log(a);
    const double lb = std::log(b);
    for (long i = 0; i < count; ++i) {
      out.push_back(i == 0           ? a
                    : i == count - 1 ? b
                                     : std::exp(la + (lb - la) *
                                                         static_cast<double>(i) /
                                                         static_cast<double>(count - 1)));
    }
  } else {
    throw DomainError("range spacing must be lin or log, got '" + parts[2] +
                      "'");
  }
  return out;
}

/// Comma-separated list of non-negative integers, e.g. "1,5,10,20".
inline std::vector<long> parse_int_list(std::string_view spec) {
  std::vector<long> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = std::min(spec.find(',', start), spec.size());
    const std::string_view tok = spec.substr(start, end - start);
    long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    ::thermoq::detail::require(
        !tok.empty() && res.ec == std::errc() &&
            res.ptr == tok.data() + tok.size(),
        "not an integer list: '" + std::string(spec) + "'");
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

}  // namespace thermoq::io
