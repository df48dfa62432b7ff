#pragma once

// Tabular output shared by every subcommand. A Table is written as CSV
// (header plus rows) or JSON (an object for single records, otherwise an
// array of objects). Numbers use the shortest representation that parses
// back to the same double, so reading a file and writing it again
// reproduces it byte for byte.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace snstf::cli {

using Value = std::variant<bool, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  bool single = false;  // a single record rather than a list

  static Table record(std::vector<std::pair<std::string, Value>> fields);
  void add_row(std::vector<Value> row);
  /// Value of `column` in row `row`; throws std::out_of_range if absent.
  const Value& get(const std::string& column, std::size_t row = 0) const;
  double number(const std::string& column, std::size_t row = 0) const;
};

enum class Format { csv, json };

Format parse_format(const std::string& s);
const char* format_extension(Format f);

std::string format_number(double v);

void write_table(std::ostream& os, const Table& t, Format f);
std::string to_string(const Table& t, Format f);

/// Inverse of write_table. Throws std::runtime_error on malformed input.
Table read_table(std::istream& is, Format f);
Table parse_table(const std::string& text, Format f);

}  // namespace snstf::cli
