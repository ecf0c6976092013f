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

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ctxclean/table.h"

namespace ctxclean {

enum class ErrorCategory { kTypo, kValueError, kNull, kOutlier };
enum class OutlierMode { kOriginalRange, kDoubledRange };

std::string_view to_string(ErrorCategory category);
std::optional<ErrorCategory> parse_error_category(std::string_view name);
std::string_view to_string(OutlierMode mode);
std::optional<OutlierMode> parse_outlier_mode(std::string_view name);

struct InjectionSpec {
  std::map<ErrorCategory, double> rates;  // fraction of rows per category
  OutlierMode outlier_mode = OutlierMode::kOriginalRange;
  std::vector<std::string> target_columns;  // empty means every column
  std::uint64_t seed = 0;

  // Throws ConfigError for rates outside [0, 1], unknown columns, or a
  // category with a positive rate but no eligible target column.
  void validate(const Table& table) const;
};

// Original value of every injected cell.
struct GroundTruth {
  std::map<CellRef, Cell> original;

  std::size_t size() const { return original.size(); }
  bool contains(const CellRef& cell) const { return original.contains(cell); }

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// Ground-truth file: row,column,original_value
std::string write_ground_truth_csv(const GroundTruth& truth);
GroundTruth read_ground_truth_csv(std::string_view text);

// Generator contract, version 1: std::mt19937_64 seeded with the spec seed;
// bounded integers by rejection sampling on the raw 64-bit output; unit
// doubles from the top 53 bits. Same seed gives the same draws everywhere.
class SeededRng {
 public:
  static constexpr int kVersion = 1;

  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [0, 1).
  double unit();
  // Uniform in [low, high].
  double between(double low, double high);

 private:
  std::mt19937_64 engine_;
};

struct InjectionResult {
  Table dirty;
  GroundTruth truth;
  std::map<ErrorCategory, std::size_t> injected;  // cells per category
};

// For each category (typo, value_error, null, outlier in that order) picks
// ceil(rate * rows) distinct rows and corrupts one uniformly chosen eligible
// target cell per row. Cells that are already corrupted, or that the
// operation cannot change, are skipped.
InjectionResult inject(const Table& clean, const InjectionSpec& spec);

}  // namespace ctxclean
