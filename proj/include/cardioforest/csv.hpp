#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cardioforest/table.hpp"

namespace cardio {

// Reads an RFC-4180 CSV with a mandatory header row. Empty fields become
// missing cells. A column where at least 90% of the non-missing cells parse
// as numbers is treated as numeric; its remaining cells stay text and are
// counted in RawTable::non_numeric_flags. Other columns keep every cell as
// text. Ragged rows raise ParseError, duplicate headers SchemaError.
RawTable parse_measurements_csv(std::istream& in);
RawTable parse_measurements_csv_file(const std::string& path);

// RFC-4180 writer; missing cells become empty fields, numbers use the
// shortest round-trip decimal form.
void write_table_csv(const RawTable& table, std::ostream& out);
void write_table_csv_file(const RawTable& table, const std::string& path);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// Quotes a field per RFC 4180 when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

}  // namespace cardio
