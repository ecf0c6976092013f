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

#include "ctxclean/detectors.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

namespace ctxclean {

namespace {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xE ? 3 : (lead >> 3) == 0x1E ? 4 : 0;
    bool valid = len > 0 && i + len <= s.size();
    char32_t cp = len == 1 ? lead : len == 2 ? (lead & 0x1F) : len == 3 ? (lead & 0x0F) : (lead & 0x07);
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto cont = static_cast<unsigned char>(s[i + k]);
      if ((cont >> 6) != 0x2) valid = false;
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (!valid) {
      // Map stray bytes outside the Unicode range so they never equal a real code point.
      out.push_back(0x110000 + lead);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

// Row indices per lhs value, skipping null lhs and null rhs cells.
std::map<std::string, std::vector<std::size_t>> block_by_lhs(const Table& table, std::size_t lhs, std::size_t rhs) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    const auto& key = table.at(r, lhs);
    if (!key || !table.at(r, rhs)) continue;
    groups[canonical_value(table.column(lhs).type, *key)].push_back(r);
  }
  return groups;
}

Finding make_finding(std::size_t row, const std::string& column, std::string_view detector, std::string_view dependency,
                     std::string reason) {
  return Finding{CellRef{row, column}, std::string(detector),
                 dependency.empty() ? std::nullopt : std::optional<std::string>(dependency), std::move(reason)};
}

std::string format_number(double value) { return fmt::format("{}", value); }

}  // namespace

std::size_t edit_distance(std::string_view a, std::string_view b) {
  const auto s = decode_utf8(a);
  const auto t = decode_utf8(b);
  if (s.empty()) return t.size();
  if (t.empty()) return s.size();
  std::vector<std::size_t> prev(t.size() + 1);
  std::vector<std::size_t> cur(t.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 0; i < s.size(); ++i) {
    cur[0] = i + 1;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const std::size_t substitute = prev[j] + (s[i] == t[j] ? 0 : 1);
      cur[j + 1] = std::min({prev[j + 1] + 1, cur[j] + 1, substitute});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(decode_utf8(a).size(), decode_utf8(b).size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

bool DetectionReport::KeyLess::operator()(const Finding& a, const Finding& b) const {
  return std::tie(a.cell.row, a.cell.column, a.detector, a.dependency) <
         std::tie(b.cell.row, b.cell.column, b.detector, b.dependency);
}

void DetectionReport::add(Finding finding) { findings_.insert(std::move(finding)); }

void DetectionReport::merge(const DetectionReport& other) { findings_.insert(other.begin(), other.end()); }

std::set<CellRef> DetectionReport::cells() const {
  std::set<CellRef> out;
  for (const auto& finding : findings_) out.insert(finding.cell);
  return out;
}

bool DetectionReport::flags(const CellRef& cell) const {
  const auto it = findings_.lower_bound(Finding{cell, "", std::nullopt, ""});
  return it != findings_.end() && it->cell == cell;
}

bool operator==(const DetectionReport& a, const DetectionReport& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const Finding& x, const Finding& y) {
    return x.cell == y.cell && x.detector == y.detector && x.dependency == y.dependency;
  });
}

DetectionReport detect_nulls(const Table& table) {
  DetectionReport report;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    for (std::size_t c = 0; c < table.num_columns(); ++c) {
      if (!table.at(r, c)) report.add(make_finding(r, table.column(c).name, detector::kNull, "", "null value"));
    }
  }
  return report;
}

DetectionReport eval_denial(const Table& table, const DenialPlan& plan, std::string_view dependency_id) {
  const std::size_t lhs = table.require_column(plan.lhs_column);
  const std::size_t rhs = table.require_column(plan.rhs_column);
  const bool numeric = table.column(rhs).type == ColumnType::kNumber;
  DetectionReport report;
  for (const auto& [key, rows] : block_by_lhs(table, lhs, rhs)) {
    if (rows.size() < 2) continue;
    const std::string reason = plan.lhs_column + "='" + key + "' has conflicting " + plan.rhs_column + " values";
    if (numeric) {
      // Some partner differs by more than the tolerance iff the group's min or max does.
      double low = *table.number(rows.front(), rhs);
      double high = low;
      for (const auto r : rows) {
        low = std::min(low, *table.number(r, rhs));
        high = std::max(high, *table.number(r, rhs));
      }
      for (const auto r : rows) {
        const double v = *table.number(r, rhs);
        if (v - low > kNumericTolerance || high - v > kNumericTolerance) {
          report.add(make_finding(r, plan.rhs_column, detector::kDenial, dependency_id, reason));
        }
      }
      continue;
    }
    const auto& first = *table.at(rows.front(), rhs);
    const bool conflicting = std::any_of(rows.begin(), rows.end(), [&](std::size_t r) { return *table.at(r, rhs) != first; });
    if (!conflicting) continue;
    for (const auto r : rows) report.add(make_finding(r, plan.rhs_column, detector::kDenial, dependency_id, reason));
  }
  return report;
}

DetectionReport eval_matching(const Table& table, const MatchingPlan& plan, std::string_view dependency_id) {
  const std::size_t lhs = table.require_column(plan.lhs_column);
  const std::size_t rhs = table.require_column(plan.rhs_column);
  DetectionReport report;
  for (const auto& [key, rows] : block_by_lhs(table, lhs, rhs)) {
    if (rows.size() < 2) continue;
    std::map<std::string, std::vector<std::size_t>> by_value;
    for (const auto r : rows) by_value[*table.at(r, rhs)].push_back(r);
    if (by_value.size() < 2) continue;

    std::vector<const std::string*> values;
    for (const auto& entry : by_value) values.push_back(&entry.first);
    std::vector<bool> violating(values.size(), false);
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (std::size_t j = i + 1; j < values.size(); ++j) {
        if (edit_similarity(*values[i], *values[j]) < plan.threshold) violating[i] = violating[j] = true;
      }
    }
    const std::string reason = plan.lhs_column + "='" + key + "' has " + plan.rhs_column + " values less than " +
                               format_number(plan.threshold) + " similar";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!violating[i]) continue;
      for (const auto r : by_value.at(*values[i])) {
        report.add(make_finding(r, plan.rhs_column, detector::kMatching, dependency_id, reason));
      }
    }
  }
  return report;
}

DetectionReport eval_device_link(const Table& table, const DeviceLinkPlan& plan, std::string_view dependency_id) {
  const std::size_t sensor = table.require_column(plan.sensor_column);
  const std::size_t device = table.require_column(plan.device_column);
  DetectionReport report;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    const auto& s = table.at(r, sensor);
    const auto& d = table.at(r, device);
    if (!s || !d || *s != plan.sensor_name || *d == plan.device_name) continue;
    const std::string reason = plan.sensor_name + " is attached to " + plan.device_name + ", not " + *d;
    report.add(make_finding(r, plan.sensor_column, detector::kDeviceLink, dependency_id, reason));
    report.add(make_finding(r, plan.device_column, detector::kDeviceLink, dependency_id, reason));
  }
  return report;
}

DetectionReport eval_temporal(const Table& table, const TemporalPlan& plan, std::string_view dependency_id) {
  const std::size_t from = table.require_column(plan.predecessor_column);
  const std::size_t to = table.require_column(plan.successor_column);
  DetectionReport report;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    const auto& sent = table.at(r, from);
    const auto& received = table.at(r, to);
    if (!sent || !received || *sent < *received) continue;
    const std::string reason = plan.predecessor_column + " " + *sent + " is not before " + plan.successor_column + " " + *received;
    report.add(make_finding(r, plan.predecessor_column, detector::kTemporal, dependency_id, reason));
    report.add(make_finding(r, plan.successor_column, detector::kTemporal, dependency_id, reason));
  }
  return report;
}

DetectionReport eval_colocation(const Table& table, const ColocationPlan& plan) {
  const std::size_t first = table.require_column(plan.first_column);
  const std::size_t second = table.require_column(plan.second_column);
  DetectionReport report;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    const auto a = table.number(r, first);
    const auto b = table.number(r, second);
    if (!a || !b || std::abs(*a - *b) <= plan.tolerance) continue;
    const std::string reason = plan.first_column + " and " + plan.second_column + " at " + local_name(plan.locality) +
                               " differ by " + format_number(std::abs(*a - *b));
    report.add(make_finding(r, plan.first_column, detector::kColocation, plan.first_dependency, reason));
    report.add(make_finding(r, plan.second_column, detector::kColocation, plan.second_dependency, reason));
  }
  return report;
}

DetectionReport eval_monitoring(const Table& table, const MonitoringPlan& plan, std::string_view dependency_id) {
  DetectionReport report;
  if (plan.unhealthy.empty()) return report;
  const std::size_t ts = table.require_column(plan.timestamp_column);
  std::vector<std::size_t> values;
  for (const auto& column : plan.value_columns) values.push_back(table.require_column(column));
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    const auto& stamp = table.at(r, ts);
    if (!stamp) continue;
    const auto range = std::find_if(plan.unhealthy.begin(), plan.unhealthy.end(),
                                    [&](const HealthRange& h) { return h.start <= *stamp && *stamp < h.end; });
    if (range == plan.unhealthy.end()) continue;
    const std::string reason = local_name(plan.device) + " unhealthy in [" + range->start + ", " + range->end + ")";
    for (const auto c : values) {
      if (table.at(r, c)) report.add(make_finding(r, table.column(c).name, detector::kMonitoring, dependency_id, reason));
    }
  }
  return report;
}

DetectionReport eval_capability(const Table& table, const CapabilityPlan& plan, std::string_view dependency_id) {
  const std::size_t column = table.require_column(plan.column);
  DetectionReport report;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    const auto v = table.number(r, column);
    if (!v) continue;
    bool violated = false;
    std::string reason;
    switch (plan.kind) {
      case CapabilityKind::kMin:
        violated = *v < plan.value;
        reason = "below minimum " + format_number(plan.value);
        break;
      case CapabilityKind::kMax:
        violated = *v > plan.value;
        reason = "above maximum " + format_number(plan.value);
        break;
      case CapabilityKind::kResolution:
        violated = std::abs(*v - std::round(*v / plan.value) * plan.value) > kNumericTolerance;
        reason = "not a multiple of resolution " + format_number(plan.value);
        break;
    }
    if (violated) report.add(make_finding(r, plan.column, detector::kCapability, dependency_id, reason));
  }
  return report;
}

DetectionReport evaluate_plan(const Table& table, const CheckPlan& plan) {
  const std::string_view id = plan.dependency_id;
  return std::visit(
      [&](const auto& check) {
        using T = std::decay_t<decltype(check)>;
        if constexpr (std::is_same_v<T, DenialPlan>) return eval_denial(table, check, id);
        if constexpr (std::is_same_v<T, MatchingPlan>) return eval_matching(table, check, id);
        if constexpr (std::is_same_v<T, DeviceLinkPlan>) return eval_device_link(table, check, id);
        if constexpr (std::is_same_v<T, TemporalPlan>) return eval_temporal(table, check, id);
        if constexpr (std::is_same_v<T, ColocationPlan>) return eval_colocation(table, check);
        if constexpr (std::is_same_v<T, MonitoringPlan>) return eval_monitoring(table, check, id);
        if constexpr (std::is_same_v<T, CapabilityPlan>) return eval_capability(table, check, id);
      },
      plan.check);
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::vector<std::string> dependency_ids)
    : rows_(rows), ids_(std::move(dependency_ids)), cells_(rows_ * ids_.size(), 1) {}

FeatureMatrix build_feature_matrix(const Table& table, const DependencySet& depset, const DetectionReport& report) {
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> index;
  for (const auto& dependency : depset.dependencies) {
    index.emplace(dependency.id, ids.size());
    ids.push_back(dependency.id);
  }
  FeatureMatrix matrix(table.num_rows(), std::move(ids));
  for (const auto& finding : report) {
    if (!finding.dependency) continue;
    const auto it = index.find(*finding.dependency);
    if (it != index.end()) matrix.mark_violated(finding.cell.row, it->second);
  }
  return matrix;
}

FeatureMatrix build_feature_matrix(const Table& table, const DependencySet& depset, const DatasetConfig& config) {
  return build_feature_matrix(table, depset, detect_all(table, depset, config));
}

DetectionReport detect_all(const Table& table, const std::vector<CheckPlan>& plans) {
  DetectionReport report = detect_nulls(table);
  for (const auto& plan : plans) report.merge(evaluate_plan(table, plan));
  return report;
}

DetectionReport detect_all(const Table& table, const DependencySet& depset, const DatasetConfig& config,
                           std::vector<std::string>* warnings) {
  auto compiled = compile(depset, config, table);
  if (warnings != nullptr) warnings->insert(warnings->end(), compiled.warnings.begin(), compiled.warnings.end());
  return detect_all(table, compiled.plans);
}

DetectionReport baseline_zscore(const Table& table, double k) {
  DetectionReport report;
  for (std::size_t c = 0; c < table.num_columns(); ++c) {
    if (table.column(c).type != ColumnType::kNumber) continue;
    std::vector<std::pair<std::size_t, double>> values;
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      if (const auto v = table.number(r, c)) values.emplace_back(r, *v);
    }
    if (values.empty()) continue;
    double mean = 0.0;
    for (const auto& [r, v] : values) mean += v;
    mean /= static_cast<double>(values.size());
    double variance = 0.0;
    for (const auto& [r, v] : values) variance += (v - mean) * (v - mean);
    const double stddev = std::sqrt(variance / static_cast<double>(values.size()));
    // Constant columns: accumulated rounding must not turn into flags.
    if (stddev <= 1e-12 * std::max(1.0, std::abs(mean))) continue;
    for (const auto& [r, v] : values) {
      if (std::abs(v - mean) > k * stddev) {
        report.add(make_finding(r, table.column(c).name, detector::kZscore, "",
                                "z-score " + fmt::format("{:.3f}", (v - mean) / stddev)));
      }
    }
  }
  return report;
}

std::string write_findings_csv(const DetectionReport& report) {
  std::string out = "row,column,detector,dependency_id,reason\n";
  for (const auto& f : report) {
    out += std::to_string(f.cell.row) + "," + csv_field(f.cell.column) + "," + csv_field(f.detector) + "," +
           csv_field(f.dependency.value_or("")) + "," + csv_field(f.reason) + "\n";
  }
  return out;
}

DetectionReport read_findings_csv(std::string_view text) {
  auto records = parse_csv_records(text);
  if (records.empty()) throw DataError("findings file has no header");
  DetectionReport report;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.size() != 5 || !rec[0] || !rec[1] || !rec[2]) {
      throw DataError("findings file line " + std::to_string(i + 1) + " is malformed");
    }
    const auto row = parse_number(*rec[0]);
    if (!row || *row < 0 || *row != std::floor(*row)) {
      throw DataError("findings file line " + std::to_string(i + 1) + ": bad row index");
    }
    report.add(Finding{CellRef{static_cast<std::size_t>(*row), *rec[1]}, *rec[2], rec[3], rec[4].value_or("")});
  }
  return report;
}

}  // namespace ctxclean
