#include "cardioforest/table.hpp"

#include <cstdlib>

#include "cardioforest/errors.hpp"

namespace cardio {

const Column& RawTable::column(const std::string& name) const {
  const auto idx = find_column(name);
  if (!idx) throw SchemaError("column not found: " + name);
  return columns[*idx];
}

Column& RawTable::column(const std::string& name) {
  const auto idx = find_column(name);
  if (!idx) throw SchemaError("column not found: " + name);
  return columns[*idx];
}

std::optional<double> parse_numeric(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return std::nullopt;
  std::size_t end = text.find_last_not_of(" \t") + 1;
  const std::string trimmed = text.substr(begin, end - begin);
  if (trimmed.empty()) return std::nullopt;
  const char* start = trimmed.c_str();
  char* consumed = nullptr;
  const double value = std::strtod(start, &consumed);
  if (consumed == start || *consumed != '\0') return std::nullopt;
  return value;
}

}  // namespace cardio
