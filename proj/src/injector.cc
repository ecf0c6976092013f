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

#include "ctxclean/injector.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace ctxclean {

namespace {

constexpr std::string_view kTypoAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";

bool eligible(ErrorCategory category, ColumnType type) {
  switch (category) {
    case ErrorCategory::kTypo: return type == ColumnType::kText;
    case ErrorCategory::kOutlier: return type == ColumnType::kNumber;
    case ErrorCategory::kValueError:
    case ErrorCategory::kNull: return true;
  }
  return false;
}

int decimals_of(const std::string& text) {
  if (text.find_first_of("eE") != std::string::npos) return 6;
  const auto dot = text.find('.');
  return dot == std::string::npos ? 0 : static_cast<int>(text.size() - dot - 1);
}

char other_char(char current, SeededRng& rng) {
  std::string pool;
  for (const char c : kTypoAlphabet) {
    if (c != current) pool.push_back(c);
  }
  return pool[rng.below(pool.size())];
}

// One random character operation: swap adjacent, insert, delete or replace.
std::optional<std::string> make_typo(const std::string& text, SeededRng& rng) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::string out = text;
    switch (rng.below(4)) {
      case 0: {
        if (out.size() < 2) continue;
        const auto i = rng.below(out.size() - 1);
        if (out[i] == out[i + 1]) continue;
        std::swap(out[i], out[i + 1]);
        break;
      }
      case 1:
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(rng.below(out.size() + 1)),
                   kTypoAlphabet[rng.below(kTypoAlphabet.size())]);
        break;
      case 2:
        if (out.size() < 2) continue;
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(rng.below(out.size())));
        break;
      default: {
        const auto i = rng.below(out.size());
        out[i] = other_char(out[i], rng);
        break;
      }
    }
    if (out != text && out.find_first_not_of(" \t\r\n") != std::string::npos) return out;
  }
  return std::nullopt;
}

struct NumericRange {
  double low;
  double high;
  int decimals;
};

class Injector {
 public:
  Injector(const Table& clean, const InjectionSpec& spec) : clean_(clean), spec_(spec), dirty_(clean), rng_(spec.seed) {
    if (spec.target_columns.empty()) {
      for (std::size_t c = 0; c < clean.num_columns(); ++c) targets_.push_back(c);
    } else {
      for (const auto& name : spec.target_columns) targets_.push_back(clean.require_column(name));
    }
  }

  InjectionResult run() {
    for (const auto& [category, rate] : spec_.rates) {
      if (rate <= 0.0 || clean_.num_rows() == 0) continue;
      std::vector<std::size_t> columns;
      for (const auto c : targets_) {
        if (eligible(category, clean_.column(c).type)) columns.push_back(c);
      }
      for (const auto row : pick_rows(rate)) {
        const std::size_t column = columns[rng_.below(columns.size())];
        CellRef cell{row, clean_.column(column).name};
        if (truth_.contains(cell)) continue;
        const auto& original = clean_.at(row, column);
        auto corrupted = corrupt(category, row, column);
        if (!corrupted) continue;
        dirty_.set(row, column, *corrupted);
        truth_.original.emplace(std::move(cell), original);
        ++injected_[category];
      }
    }
    return {std::move(dirty_), std::move(truth_), std::move(injected_)};
  }

 private:
  std::vector<std::size_t> pick_rows(double rate) {
    const std::size_t n = clean_.num_rows();
    const auto wanted = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n) - 1e-9));
    const std::size_t count = std::min(n, wanted);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < count; ++i) std::swap(order[i], order[i + rng_.below(n - i)]);
    order.resize(count);
    return order;
  }

  // The replacement value, or nullopt when the operation cannot change the cell.
  std::optional<Cell> corrupt(ErrorCategory category, std::size_t row, std::size_t column) {
    const auto& current = clean_.at(row, column);
    const ColumnType type = clean_.column(column).type;
    switch (category) {
      case ErrorCategory::kNull:
        if (!current) return std::nullopt;
        return Cell{};
      case ErrorCategory::kTypo: {
        if (!current) return std::nullopt;
        auto typo = make_typo(*current, rng_);
        if (!typo) return std::nullopt;
        return Cell{std::move(*typo)};
      }
      case ErrorCategory::kValueError: {
        std::vector<const std::string*> candidates;
        for (const auto& value : domain(column)) {
          if (!current || !values_equal(type, value, *current)) candidates.push_back(&value);
        }
        if (candidates.empty()) return std::nullopt;
        return Cell{*candidates[rng_.below(candidates.size())]};
      }
      case ErrorCategory::kOutlier: {
        if (!current) return std::nullopt;
        const auto range = numeric_range(column);
        if (!range) return std::nullopt;
        for (int attempt = 0; attempt < 16; ++attempt) {
          const std::string drawn = format_within(rng_.between(range->low, range->high), *range);
          if (!values_equal(type, drawn, *current)) return Cell{drawn};
        }
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  const std::set<std::string>& domain(std::size_t column) {
    auto [it, inserted] = domains_.try_emplace(column);
    if (inserted) {
      for (std::size_t r = 0; r < clean_.num_rows(); ++r) {
        if (const auto& cell = clean_.at(r, column)) it->second.insert(*cell);
      }
    }
    return it->second;
  }

  std::optional<NumericRange> numeric_range(std::size_t column) {
    if (auto it = ranges_.find(column); it != ranges_.end()) return it->second;
    std::optional<NumericRange> range;
    double low = std::numeric_limits<double>::infinity();
    double high = -low;
    int decimals = 0;
    for (std::size_t r = 0; r < clean_.num_rows(); ++r) {
      const auto& cell = clean_.at(r, column);
      if (!cell) continue;
      const double v = *parse_number(*cell);
      low = std::min(low, v);
      high = std::max(high, v);
      decimals = std::max(decimals, decimals_of(*cell));
    }
    if (low <= high) {
      if (spec_.outlier_mode == OutlierMode::kDoubledRange) {
        const double half_span = (high - low) / 2.0;
        low -= half_span;
        high += half_span;
      }
      range = NumericRange{low, high, decimals};
    }
    ranges_.emplace(column, range);
    return range;
  }

  // Rounds to the column's precision without leaving the draw interval.
  static std::string format_within(double value, const NumericRange& range) {
    const double step = std::pow(10.0, -range.decimals);
    double rounded = std::round(value / step) * step;
    if (rounded < range.low) rounded = std::ceil(range.low / step - 1e-9) * step;
    if (rounded > range.high) rounded = std::floor(range.high / step + 1e-9) * step;
    std::string text = fmt::format("{:.{}f}", rounded, range.decimals);
    if (text.starts_with("-") && text.find_first_not_of("-0.") == std::string::npos) text.erase(0, 1);
    return text;
  }

  const Table& clean_;
  const InjectionSpec& spec_;
  Table dirty_;
  GroundTruth truth_;
  std::map<ErrorCategory, std::size_t> injected_;
  SeededRng rng_;
  std::vector<std::size_t> targets_;
  std::map<std::size_t, std::set<std::string>> domains_;
  std::map<std::size_t, std::optional<NumericRange>> ranges_;
};

}  // namespace

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kTypo: return "typo";
    case ErrorCategory::kValueError: return "value_error";
    case ErrorCategory::kNull: return "null";
    case ErrorCategory::kOutlier: return "outlier";
  }
  return "unknown";
}

std::optional<ErrorCategory> parse_error_category(std::string_view name) {
  if (name == "typo") return ErrorCategory::kTypo;
  if (name == "value_error") return ErrorCategory::kValueError;
  if (name == "null") return ErrorCategory::kNull;
  if (name == "outlier") return ErrorCategory::kOutlier;
  return std::nullopt;
}

std::string_view to_string(OutlierMode mode) {
  return mode == OutlierMode::kDoubledRange ? "doubled_range" : "original_range";
}

std::optional<OutlierMode> parse_outlier_mode(std::string_view name) {
  if (name == "original_range") return OutlierMode::kOriginalRange;
  if (name == "doubled_range") return OutlierMode::kDoubledRange;
  return std::nullopt;
}

void InjectionSpec::validate(const Table& table) const {
  std::vector<std::size_t> targets;
  if (target_columns.empty()) {
    for (std::size_t c = 0; c < table.num_columns(); ++c) targets.push_back(c);
  } else {
    for (const auto& name : target_columns) {
      const auto index = table.column_index(name);
      if (!index) throw ConfigError("injection target column '" + name + "' does not exist");
      targets.push_back(*index);
    }
  }
  for (const auto& [category, rate] : rates) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw ConfigError("injection rate for " + std::string(to_string(category)) + " must lie in [0, 1]");
    }
    if (rate == 0.0) continue;
    const bool any = std::any_of(targets.begin(), targets.end(),
                                 [&](std::size_t c) { return eligible(category, table.column(c).type); });
    if (!any) throw ConfigError("no eligible target cells for " + std::string(to_string(category)) + " errors");
  }
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
  // Reject the low (2^64 mod bound) outputs so that x % bound is unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % bound;
  }
}

double SeededRng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SeededRng::between(double low, double high) { return low + unit() * (high - low); }

InjectionResult inject(const Table& clean, const InjectionSpec& spec) {
  spec.validate(clean);
  return Injector(clean, spec).run();
}

std::string write_ground_truth_csv(const GroundTruth& truth) {
  std::string out = "row,column,original_value\n";
  for (const auto& [cell, value] : truth.original) {
    out += std::to_string(cell.row) + "," + csv_field(cell.column) + "," + (value ? csv_field(*value) : "") + "\n";
  }
  return out;
}

GroundTruth read_ground_truth_csv(std::string_view text) {
  auto records = parse_csv_records(text);
  if (records.empty()) throw DataError("ground truth file has no header");
  GroundTruth truth;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.size() != 3 || !rec[0] || !rec[1]) {
      throw DataError("ground truth line " + std::to_string(i + 1) + " is malformed");
    }
    const auto row = parse_number(*rec[0]);
    if (!row || *row < 0 || *row != std::floor(*row)) {
      throw DataError("ground truth line " + std::to_string(i + 1) + ": bad row index");
    }
    truth.original.emplace(CellRef{static_cast<std::size_t>(*row), *rec[1]}, rec[2]);
  }
  return truth;
}

}  // namespace ctxclean
