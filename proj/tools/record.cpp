#include "record.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace snstf::cli {

using ordered_json = nlohmann::ordered_json;

Table Table::record(std::vector<std::pair<std::string, Value>> fields) {
  Table t;
  t.single = true;
  std::vector<Value> row;
  for (auto& [name, value] : fields) {
    t.columns.push_back(std::move(name));
    row.push_back(std::move(value));
  }
  t.rows.push_back(std::move(row));
  return t;
}

void Table::add_row(std::vector<Value> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match columns");
  rows.push_back(std::move(row));
}

const Value& Table::get(const std::string& column, std::size_t row) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == column) return rows.at(row).at(c);
  throw std::out_of_range("no column '" + column + "'");
}

double Table::number(const std::string& column, std::size_t row) const {
  const Value& v = get(column, row);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw std::runtime_error("column '" + column + "' is not numeric");
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + s + "' (expected csv or json)");
}

const char* format_extension(Format f) { return f == Format::csv ? "csv" : "json"; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell(const Value& v) {
  struct Visit {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n\r") != std::string::npos)
        throw std::invalid_argument("CSV cell may not contain separators: " + s);
      return s;
    }
  };
  return std::visit(Visit{}, v);
}

Value parse_cell(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  std::int64_t i = 0;
  if (auto r = std::from_chars(first, last, i); r.ec == std::errc() && r.ptr == last) return i;
  double d = 0.0;
  if (auto r = std::from_chars(first, last, d); r.ec == std::errc() && r.ptr == last) return d;
  return s;
}

ordered_json to_json(const Value& v) {
  struct Visit {
    ordered_json operator()(bool b) const { return b; }
    ordered_json operator()(std::int64_t i) const { return i; }
    ordered_json operator()(double d) const {
      if (!std::isfinite(d)) return format_number(d);
      return d;
    }
    ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visit{}, v);
}

Value from_json(const ordered_json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw std::runtime_error("unsupported JSON value: " + j.dump());
}

ordered_json row_object(const Table& t, std::size_t r) {
  ordered_json o = ordered_json::object();
  for (std::size_t c = 0; c < t.columns.size(); ++c) o[t.columns[c]] = to_json(t.rows[r][c]);
  return o;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void add_object(Table& t, const ordered_json& o) {
  if (!o.is_object()) throw std::runtime_error("expected a JSON object");
  if (t.columns.empty() && t.rows.empty())
    for (const auto& item : o.items()) t.columns.push_back(item.key());
  std::vector<Value> row;
  std::size_t c = 0;
  for (const auto& item : o.items()) {
    if (c >= t.columns.size() || item.key() != t.columns[c])
      throw std::runtime_error("JSON records have inconsistent fields");
    row.push_back(from_json(item.value()));
    ++c;
  }
  if (c != t.columns.size()) throw std::runtime_error("JSON records have inconsistent fields");
  t.rows.push_back(std::move(row));
}

}  // namespace

void write_table(std::ostream& os, const Table& t, Format f) {
  if (f == Format::csv) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell(row[c]);
      os << '\n';
    }
    return;
  }
  ordered_json j;
  if (t.single && t.rows.size() == 1) {
    j = row_object(t, 0);
  } else {
    j = ordered_json::array();
    for (std::size_t r = 0; r < t.rows.size(); ++r) j.push_back(row_object(t, r));
  }
  os << j.dump(2) << '\n';
}

std::string to_string(const Table& t, Format f) {
  std::ostringstream os;
  write_table(os, t, f);
  return os.str();
}

Table read_table(std::istream& is, Format f) {
  Table t;
  if (f == Format::csv) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("CSV input is empty");
    t.columns = split_csv(line);
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      if (cells.size() != t.columns.size())
        throw std::runtime_error("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(t.columns.size()));
      std::vector<Value> row;
      for (const auto& c : cells) row.push_back(parse_cell(c));
      t.rows.push_back(std::move(row));
    }
    t.single = t.rows.size() == 1;
    return t;
  }
  ordered_json j;
  try {
    j = ordered_json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("malformed JSON: ") + e.what());
  }
  if (j.is_object()) {
    t.single = true;
    add_object(t, j);
  } else if (j.is_array()) {
    for (const auto& o : j) add_object(t, o);
  } else {
    throw std::runtime_error("JSON report must be an object or an array");
  }
  return t;
}

Table parse_table(const std::string& text, Format f) {
  std::istringstream is(text);
  return read_table(is, f);
}

}  // namespace snstf::cli
