#include "cardioforest/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "cardioforest/errors.hpp"

namespace cardio {
namespace {

// Splits one CSV record starting at the current stream position. Handles
// quoted fields with doubled quotes and embedded newlines; accepts LF and
// CRLF line endings. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;

  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  while (true) {
    if (c == EOF) {
      fields.push_back(field);
      return true;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        const int next = in.peek();
        if (next == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !saw_any) {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
      saw_any = false;
      c = in.get();
      continue;
    } else if (ch == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(field);
      return true;
    } else {
      field.push_back(ch);
      saw_any = true;
    }
    c = in.get();
  }
}

}  // namespace

RawTable parse_measurements_csv(std::istream& in) {
  std::vector<std::string> header;
  if (!read_record(in, header) || header.empty()) {
    throw ParseError("empty input: missing header row");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : header) {
    if (!seen.insert(name).second) {
      throw SchemaError("duplicate header name: " + name);
    }
  }

  const std::size_t d = header.size();
  std::vector<std::vector<std::string>> raw(d);
  std::vector<std::vector<bool>> missing(d);
  std::vector<std::string> fields;
  std::size_t row_index = 0;
  while (read_record(in, fields)) {
    // A trailing newline produces one empty single-field record; skip it.
    if (fields.size() == 1 && fields[0].empty() && in.peek() == EOF) break;
    if (fields.size() != d) {
      throw ParseError("ragged row " + std::to_string(row_index + 1) + ": expected " +
                       std::to_string(d) + " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < d; ++j) {
      missing[j].push_back(fields[j].empty());
      raw[j].push_back(std::move(fields[j]));
    }
    ++row_index;
  }

  RawTable table;
  table.columns.resize(d);
  table.non_numeric_flags.assign(d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    table.columns[j].name = header[j];
    auto& cells = table.columns[j].cells;
    cells.resize(row_index);

    std::size_t present = 0;
    std::size_t numeric = 0;
    std::vector<std::optional<double>> parsed(row_index);
    for (std::size_t i = 0; i < row_index; ++i) {
      if (missing[j][i]) continue;
      ++present;
      parsed[i] = parse_numeric(raw[j][i]);
      if (parsed[i]) ++numeric;
    }
    const bool numeric_majority =
        present > 0 && static_cast<double>(numeric) >= 0.9 * static_cast<double>(present);
    for (std::size_t i = 0; i < row_index; ++i) {
      if (missing[j][i]) {
        cells[i] = std::monostate{};
      } else if (numeric_majority && parsed[i]) {
        cells[i] = *parsed[i];
      } else {
        if (numeric_majority) ++table.non_numeric_flags[j];
        cells[i] = std::move(raw[j][i]);
      }
    }
  }
  return table;
}

RawTable parse_measurements_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  return parse_measurements_csv(in);
}

std::string format_double(double value) {
  // Integers render without an exponent; everything else uses the shortest
  // decimal that round-trips to the same double.
  if (value == std::floor(value) && std::abs(value) < 9.007199254740992e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

void write_table_csv(const RawTable& table, std::ostream& out) {
  for (std::size_t j = 0; j < table.n_cols(); ++j) {
    if (j) out << ',';
    out << csv_escape(table.columns[j].name);
  }
  out << '\n';
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
      if (j) out << ',';
      const Cell& cell = table.columns[j].cells[i];
      if (cell_numeric(cell)) {
        out << format_double(std::get<double>(cell));
      } else if (cell_text(cell)) {
        out << csv_escape(std::get<std::string>(cell));
      }
    }
    out << '\n';
  }
}

void write_table_csv_file(const RawTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  write_table_csv(table, out);
}

}  // namespace cardio
