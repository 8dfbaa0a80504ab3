#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cardio {

// A cell is missing, a number, or text.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool cell_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }
inline bool cell_numeric(const Cell& c) { return std::holds_alternative<double>(c); }
inline bool cell_text(const Cell& c) { return std::holds_alternative<std::string>(c); }

struct Column {
  std::string name;
  std::vector<Cell> cells;
};

// Column-oriented table of parsed CSV data. Columns share one length and
// carry unique names. `non_numeric_flags` counts cells kept as text inside
// a numeric-majority column (aligned with `columns`).
struct RawTable {
  std::vector<Column> columns;
  std::vector<std::size_t> non_numeric_flags;

  std::size_t n_rows() const { return columns.empty() ? 0 : columns.front().cells.size(); }
  std::size_t n_cols() const { return columns.size(); }

  // Index of a column by name, if present.
  std::optional<std::size_t> find_column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].name == name) return i;
    }
    return std::nullopt;
  }

  const Column& column(const std::string& name) const;
  Column& column(const std::string& name);
};

// Parses text as a number if the whole trimmed string is a valid decimal
// or scientific literal.
std::optional<double> parse_numeric(const std::string& text);

}  // namespace cardio
