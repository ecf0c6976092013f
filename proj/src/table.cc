// Copyright 2026 The ctxclean Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ctxclean/table.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace ctxclean {

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

std::string cell_error(std::size_t row, const Column& column, const std::string& value) {
  return "row " + std::to_string(row) + ", column '" + column.name + "': '" + value + "' is not a valid " +
         std::string(to_string(column.type));
}

bool cell_valid(ColumnType type, const std::string& value) {
  switch (type) {
    case ColumnType::kNumber: return parse_number(value).has_value();
    case ColumnType::kTimestamp: return is_timestamp(value);
    case ColumnType::kText: return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::kText: return "text";
    case ColumnType::kNumber: return "number";
    case ColumnType::kTimestamp: return "timestamp";
  }
  return "text";
}

std::optional<ColumnType> parse_column_type(std::string_view name) {
  if (name == "text") return ColumnType::kText;
  if (name == "number") return ColumnType::kNumber;
  if (name == "timestamp") return ColumnType::kTimestamp;
  return std::nullopt;
}

std::string to_string(const CellRef& ref) { return "(" + std::to_string(ref.row) + ", " + ref.column + ")"; }

std::optional<double> parse_number(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

bool is_timestamp(std::string_view text) {
  if (text.size() != 19) return false;
  static constexpr std::string_view kShape = "dddd-dd-ddTdd:dd:dd";
  for (std::size_t i = 0; i < kShape.size(); ++i) {
    const bool ok = kShape[i] == 'd' ? std::isdigit(static_cast<unsigned char>(text[i])) != 0 : text[i] == kShape[i];
    if (!ok) return false;
  }
  const auto field = [&](std::size_t pos) { return (text[pos] - '0') * 10 + (text[pos + 1] - '0'); };
  const int month = field(5), day = field(8), hour = field(11), minute = field(14), second = field(17);
  return month >= 1 && month <= 12 && day >= 1 && day <= 31 && hour < 24 && minute < 60 && second < 60;
}

bool values_equal(ColumnType type, std::string_view a, std::string_view b) {
  if (type == ColumnType::kNumber) {
    const auto x = parse_number(a);
    const auto y = parse_number(b);
    if (x && y) return std::abs(*x - *y) <= kNumericTolerance;
  }
  return a == b;
}

std::string canonical_value(ColumnType type, const std::string& value) {
  if (type == ColumnType::kNumber) {
    if (const auto number = parse_number(value)) return fmt::format("{}", *number);
  }
  return value;
}

Table::Table(std::vector<Column> schema, std::vector<std::vector<Cell>> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  std::set<std::string_view> names;
  for (const auto& column : schema_) {
    if (!names.insert(column.name).second) throw DataError("duplicate column '" + column.name + "'");
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != schema_.size()) {
      throw DataError("row " + std::to_string(r) + " has " + std::to_string(rows_[r].size()) + " fields, expected " +
                      std::to_string(schema_.size()));
    }
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      auto& cell = rows_[r][c];
      if (cell && is_blank(*cell)) cell.reset();
      if (cell && !cell_valid(schema_[c].type, *cell)) throw DataError(cell_error(r, schema_[c], *cell));
    }
  }
}

std::optional<std::size_t> Table::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
  if (auto index = column_index(name)) return *index;
  throw ConfigError("table has no column '" + std::string(name) + "'");
}

const Cell& Table::at(const CellRef& ref) const { return at(ref.row, require_column(ref.column)); }

std::optional<double> Table::number(std::size_t row, std::size_t column) const {
  const auto& cell = at(row, column);
  if (!cell) return std::nullopt;
  return parse_number(*cell);
}

bool Table::contains(const CellRef& ref) const { return ref.row < rows_.size() && column_index(ref.column).has_value(); }

void Table::set(std::size_t row, std::size_t column, Cell value) {
  if (value && is_blank(*value)) value.reset();
  if (value && !cell_valid(schema_.at(column).type, *value)) throw DataError(cell_error(row, schema_[column], *value));
  rows_.at(row).at(column) = std::move(value);
}

void Table::set(const CellRef& ref, Cell value) { set(ref.row, require_column(ref.column), std::move(value)); }

ColumnType DatasetConfig::type_of(std::string_view column) const {
  const auto it = column_types.find(std::string(column));
  return it == column_types.end() ? ColumnType::kText : it->second;
}

void DatasetConfig::validate(const Table& table) const {
  const auto check = [&](const std::string& column, const std::string& what) {
    if (!table.column_index(column)) throw ConfigError(what + " references missing column '" + column + "'");
  };
  for (const auto& [iri, column] : column_bindings) check(column, "binding for <" + iri + ">");
  for (const auto& [iri, column] : timestamp_bindings) check(column, "timestamp binding for <" + iri + ">");
  if (key_column) check(*key_column, "key column");
  if (sensor_id_column) check(*sensor_id_column, "sensor id column");
  if (device_id_column) check(*device_id_column, "device id column");
  if (sensor_id_column.has_value() != device_id_column.has_value()) {
    throw ConfigError("sensor id column and device id column must be configured together");
  }
  if (colocation_tolerance < 0 || !std::isfinite(colocation_tolerance)) {
    throw ConfigError("co-location tolerance must be a finite non-negative number");
  }
}

std::vector<std::vector<Cell>> parse_csv_records(std::string_view text) {
  std::vector<std::vector<Cell>> records;
  std::vector<Cell> record;
  std::string field;
  bool quoted_field = false;
  bool in_quotes = false;
  bool record_has_content = false;

  const auto end_field = [&] {
    if (field.empty() || (!quoted_field && is_blank(field))) {
      record.emplace_back(std::nullopt);
    } else {
      record.emplace_back(field);
    }
    field.clear();
    quoted_field = false;
  };
  const auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw DataError("CSV record " + std::to_string(records.size()) + ": stray quote");
        in_quotes = true;
        quoted_field = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (record_has_content || !field.empty() || !record.empty()) end_record();
        break;
      default:
        field.push_back(c);
        record_has_content = true;
    }
  }
  if (in_quotes) throw DataError("CSV: unterminated quoted field");
  if (record_has_content || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Table load_csv(std::string_view text, const DatasetConfig& config) {
  auto records = parse_csv_records(text);
  if (records.empty()) throw DataError("CSV has no header row");
  std::vector<Column> schema;
  for (const auto& name : records.front()) {
    if (!name) throw DataError("CSV header contains an empty column name");
    schema.push_back({*name, config.type_of(*name)});
  }
  records.erase(records.begin());
  return Table(std::move(schema), std::move(records));
}

std::string write_csv(const Table& table) {
  std::string out;
  const auto write_row = [&](auto&& field_at) {
    for (std::size_t c = 0; c < table.num_columns(); ++c) {
      if (c > 0) out.push_back(',');
      out += field_at(c);
    }
    out.push_back('\n');
  };
  write_row([&](std::size_t c) { return csv_field(table.column(c).name); });
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    write_row([&](std::size_t c) {
      const auto& cell = table.at(r, c);
      if (cell) return csv_field(*cell);
      // A lone empty field would read back as a blank line.
      return std::string(table.num_columns() == 1 ? "\"\"" : "");
    });
  }
  return out;
}

std::optional<ColumnStats> column_stats(const Table& table, std::string_view column) {
  return column_stats(table, column, [](std::size_t) { return true; });
}

std::optional<ColumnStats> column_stats(const Table& table, std::string_view column,
                                        const std::function<bool(std::size_t row)>& include_row) {
  const std::size_t index = table.require_column(column);
  std::map<std::string, std::size_t> counts;
  std::vector<std::pair<double, std::string>> numbers;
  const bool numeric = table.column(index).type == ColumnType::kNumber;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    const auto& cell = table.at(r, index);
    if (!cell || !include_row(r)) continue;
    ++counts[*cell];
    if (numeric) numbers.emplace_back(*parse_number(*cell), *cell);
  }
  if (counts.empty()) return std::nullopt;

  ColumnStats stats;
  std::size_t best = 0;
  // std::map iterates in lexicographic order, so strict '>' keeps the smallest value on ties.
  for (const auto& [value, count] : counts) {
    if (count > best) {
      best = count;
      stats.most_frequent = value;
    }
  }
  if (numeric) {
    std::sort(numbers.begin(), numbers.end());
    const auto& middle = numbers[(numbers.size() - 1) / 2];
    stats.median = middle.first;
    stats.median_text = middle.second;
    stats.min = numbers.front().first;
    stats.max = numbers.back().first;
  }
  return stats;
}

}  // namespace ctxclean
