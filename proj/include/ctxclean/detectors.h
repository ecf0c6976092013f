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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ctxclean/ofd.h"
#include "ctxclean/table.h"

namespace ctxclean {

namespace detector {
inline constexpr std::string_view kNull = "null";
inline constexpr std::string_view kDenial = "denial";
inline constexpr std::string_view kMatching = "matching";
inline constexpr std::string_view kDeviceLink = "device_link";
inline constexpr std::string_view kTemporal = "temporal";
inline constexpr std::string_view kColocation = "colocation";
inline constexpr std::string_view kMonitoring = "monitoring";
inline constexpr std::string_view kCapability = "capability";
inline constexpr std::string_view kZscore = "zscore";
}  // namespace detector

// Levenshtein distance over Unicode code points (invalid UTF-8 bytes count
// as one unit each).
std::size_t edit_distance(std::string_view a, std::string_view b);

// 1 - distance / max(length); two empty strings are fully similar.
double edit_similarity(std::string_view a, std::string_view b);

struct Finding {
  CellRef cell;
  std::string detector;
  std::optional<std::string> dependency;
  std::string reason;
};

// Findings keyed by (cell, detector, dependency) and kept in
// (row, column, detector, dependency) order. The first reason recorded for a
// key wins.
class DetectionReport {
 public:
  void add(Finding finding);
  void merge(const DetectionReport& other);

  std::size_t size() const { return findings_.size(); }
  bool empty() const { return findings_.empty(); }
  auto begin() const { return findings_.begin(); }
  auto end() const { return findings_.end(); }

  std::set<CellRef> cells() const;
  bool flags(const CellRef& cell) const;

  friend bool operator==(const DetectionReport& a, const DetectionReport& b);

 private:
  struct KeyLess {
    bool operator()(const Finding& a, const Finding& b) const;
  };
  std::set<Finding, KeyLess> findings_;
};

DetectionReport detect_nulls(const Table& table);

// Rows are grouped by exact lhs value (null lhs rows are ignored). Within a
// group, every pair with unequal non-null rhs values flags both rhs cells.
DetectionReport eval_denial(const Table& table, const DenialPlan& plan, std::string_view dependency_id);

// As eval_denial, but a pair violates when the rhs similarity is below the
// plan's threshold.
DetectionReport eval_matching(const Table& table, const MatchingPlan& plan, std::string_view dependency_id);

DetectionReport eval_device_link(const Table& table, const DeviceLinkPlan& plan, std::string_view dependency_id);
DetectionReport eval_temporal(const Table& table, const TemporalPlan& plan, std::string_view dependency_id);
DetectionReport eval_colocation(const Table& table, const ColocationPlan& plan);
DetectionReport eval_monitoring(const Table& table, const MonitoringPlan& plan, std::string_view dependency_id);
DetectionReport eval_capability(const Table& table, const CapabilityPlan& plan, std::string_view dependency_id);

DetectionReport evaluate_plan(const Table& table, const CheckPlan& plan);

// Rows x dependencies; an entry is true when the row has no finding for
// that dependency.
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t rows, std::vector<std::string> dependency_ids);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return ids_.size(); }
  const std::vector<std::string>& dependency_ids() const { return ids_; }

  bool fulfilled(std::size_t row, std::size_t dependency) const { return cells_.at(row * ids_.size() + dependency) != 0; }
  void mark_violated(std::size_t row, std::size_t dependency) { cells_.at(row * ids_.size() + dependency) = 0; }

 private:
  std::size_t rows_;
  std::vector<std::string> ids_;
  std::vector<std::uint8_t> cells_;
};

FeatureMatrix build_feature_matrix(const Table& table, const DependencySet& depset, const DetectionReport& report);
FeatureMatrix build_feature_matrix(const Table& table, const DependencySet& depset, const DatasetConfig& config);

// Null detector plus every compiled plan. Skipped-dependency warnings are
// appended to `warnings` when given.
DetectionReport detect_all(const Table& table, const DependencySet& depset, const DatasetConfig& config,
                           std::vector<std::string>* warnings = nullptr);
DetectionReport detect_all(const Table& table, const std::vector<CheckPlan>& plans);

// Flags numeric cells with |x - mean| > k * stddev (population stddev per
// column). Columns with zero spread are never flagged.
DetectionReport baseline_zscore(const Table& table, double k);

// Findings file: row,column,detector,dependency_id,reason
std::string write_findings_csv(const DetectionReport& report);
DetectionReport read_findings_csv(std::string_view text);

}  // namespace ctxclean
