#ifndef TANGENTSTAT_IO_HPP
#define TANGENTSTAT_IO_HPP

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tangentstat/config.hpp"

namespace tangentstat::io {

using Json = nlohmann::ordered_json;

/// A CSV cell: a number (empty when undefined or non-finite) or text.
using Cell = std::variant<std::optional<double>, std::string>;

inline std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return quote_csv(*s);
  const auto& v = std::get<std::optional<double>>(c);
  if (!v || !std::isfinite(*v)) return "";
  return config::format_number(*v);
}

/// Rows of cells under a fixed header; serializes as RFC 4180 CSV (CRLF line ends)
/// or as an array of JSON records keyed by column.
struct Records {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }

  [[nodiscard]] std::string csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + quote_csv(columns[i]);
    out += "\r\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
      out += "\r\n";
    }
    return out;
  }

  [[nodiscard]] Json json() const {
    Json arr = Json::array();
    for (const auto& row : rows) {
      Json rec = Json::object();
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (const auto* s = std::get_if<std::string>(&row[i])) {
          rec[columns[i]] = *s;
        } else {
          const auto& v = std::get<std::optional<double>>(row[i]);
          rec[columns[i]] = v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
        }
      }
      arr.push_back(std::move(rec));
    }
    return arr;
  }
};

inline Json config_json(const config::RunConfig& cfg) {
  Json j = Json::object();
  for (const auto& [k, v] : cfg.entries()) {
    std::visit([&](const auto& x) { j[k] = x; }, v);
  }
  return j;
}

}  // namespace tangentstat::io

#endif  // TANGENTSTAT_IO_HPP
