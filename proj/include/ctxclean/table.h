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

#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctxclean/error.h"

namespace ctxclean {

enum class ColumnType { kText, kNumber, kTimestamp };

std::string_view to_string(ColumnType type);
std::optional<ColumnType> parse_column_type(std::string_view name);

struct Column {
  std::string name;
  ColumnType type = ColumnType::kText;

  friend bool operator==(const Column&, const Column&) = default;
};

// A cell is either null or a non-empty text payload; numeric and timestamp
// views are derived from the text according to the column type.
using Cell = std::optional<std::string>;

struct CellRef {
  std::size_t row = 0;
  std::string column;

  friend auto operator<=>(const CellRef&, const CellRef&) = default;
  friend bool operator==(const CellRef&, const CellRef&) = default;
};

std::string to_string(const CellRef& ref);

// Absolute tolerance used wherever two numbers must compare equal.
inline constexpr double kNumericTolerance = 1e-9;

// Full-string decimal parse (optional sign, fraction, exponent). Rejects
// inf/nan and trailing garbage.
std::optional<double> parse_number(std::string_view text);

// YYYY-MM-DDThh:mm:ss with in-range fields. Such timestamps order correctly
// under plain string comparison.
bool is_timestamp(std::string_view text);

// Equality under the column type: numbers within kNumericTolerance, all
// other values by text.
bool values_equal(ColumnType type, std::string_view a, std::string_view b);

// Key under which two values count as the same value of a column: numbers
// by their parsed value, everything else by text.
std::string canonical_value(ColumnType type, const std::string& value);

class Table {
 public:
  Table() = default;
  // Throws DataError if the rows are ragged or a cell does not parse under
  // its column type.
  Table(std::vector<Column> schema, std::vector<std::vector<Cell>> rows);

  const std::vector<Column>& schema() const { return schema_; }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_columns() const { return schema_.size(); }

  std::optional<std::size_t> column_index(std::string_view name) const;
  // Like column_index but throws ConfigError for unknown names.
  std::size_t require_column(std::string_view name) const;
  const Column& column(std::size_t index) const { return schema_.at(index); }

  const Cell& at(std::size_t row, std::size_t column) const { return rows_.at(row).at(column); }
  const Cell& at(const CellRef& ref) const;
  std::optional<double> number(std::size_t row, std::size_t column) const;

  bool contains(const CellRef& ref) const;

  // Replaces one cell; the new value must parse under the column type.
  void set(std::size_t row, std::size_t column, Cell value);
  void set(const CellRef& ref, Cell value);

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::vector<Column> schema_;
  std::vector<std::vector<Cell>> rows_;
};

struct HealthRange {
  std::string device;  // expanded IRI
  std::string start;   // inclusive
  std::string end;     // exclusive
};

// Binds the context model to a concrete table layout (wide format: one value
// column per sensor, one timestamp column per device).
struct DatasetConfig {
  std::map<std::string, std::string> column_bindings;     // sensor/device IRI -> value column
  std::map<std::string, std::string> timestamp_bindings;  // device IRI -> timestamp column
  std::map<std::string, ColumnType> column_types;         // undeclared columns are text
  double colocation_tolerance = 5.0;
  std::optional<std::string> key_column;
  // Long-format id columns for device-link checks; both or neither.
  std::optional<std::string> sensor_id_column;
  std::optional<std::string> device_id_column;
  std::vector<HealthRange> health_ranges;

  ColumnType type_of(std::string_view column) const;
  // Throws ConfigError when a binding names a column the table lacks.
  void validate(const Table& table) const;
};

Table load_csv(std::string_view text, const DatasetConfig& config);
std::string write_csv(const Table& table);

// Shared CSV tokenizer, also used for findings, repair and ground-truth files.
// Fields that are empty (or only whitespace) come back as nullopt.
std::vector<std::vector<Cell>> parse_csv_records(std::string_view text);
std::string csv_field(std::string_view value);

struct ColumnStats {
  std::string most_frequent;  // ties go to the lexicographically smallest value
  // Numeric columns only. The median of an even count is the lower middle
  // value; median_text keeps that cell's original spelling.
  std::optional<double> median;
  std::optional<std::string> median_text;
  std::optional<double> min;
  std::optional<double> max;
};

// nullopt when the column has no non-null cell among the considered rows.
std::optional<ColumnStats> column_stats(const Table& table, std::string_view column);
std::optional<ColumnStats> column_stats(const Table& table, std::string_view column,
                                        const std::function<bool(std::size_t row)>& include_row);

}  // namespace ctxclean
