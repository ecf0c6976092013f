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

#include "ctxclean/repair.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ctxclean {

namespace {

class Proposer {
 public:
  Proposer(const Table& table, const DetectionReport& report, std::vector<CheckPlan> plans)
      : table_(table), plans_(std::move(plans)) {
    for (const auto& finding : report) {
      flagged_rows_[finding.cell.column].insert(finding.cell.row);
      detectors_[finding.cell].insert(finding.detector);
    }
  }

  RepairPlan propose(RepairMode mode) {
    RepairPlan plan;
    for (const auto& [cell, detectors] : detectors_) {
      if (!table_.contains(cell)) throw DataError("finding refers to missing cell " + to_string(cell));
      const auto& old_value = table_.at(cell);
      if (mode == RepairMode::kDelete) {
        if (old_value) plan.repairs.push_back({cell, old_value, std::nullopt, std::string(strategy::kDelete)});
        continue;
      }
      if (auto repair = propose_for(cell, old_value, detectors)) plan.repairs.push_back(std::move(*repair));
    }
    return plan;
  }

 private:
  std::optional<Repair> propose_for(const CellRef& cell, const Cell& old_value, const std::set<std::string>& detectors) {
    const std::size_t column = table_.require_column(cell.column);
    const ColumnType type = table_.column(column).type;
    const auto make = [&](std::string value, std::string_view name) -> std::optional<Repair> {
      if (old_value && values_equal(type, value, *old_value)) return std::nullopt;
      return Repair{cell, old_value, std::move(value), std::string(name)};
    };

    if (auto value = majority(cell.row, column)) {
      if (auto repair = make(std::move(*value), strategy::kMajority)) return repair;
    }

    const bool capability = detectors.contains(std::string(detector::kCapability));
    const bool monitoring = detectors.contains(std::string(detector::kMonitoring));
    if (type == ColumnType::kNumber) {
      if (!old_value || capability || monitoring) {
        if (auto value = colocated(cell.row, cell.column)) {
          if (auto repair = make(std::move(*value), strategy::kColocation)) return repair;
        }
      }
      if (!old_value || capability) {
        const auto& stats = unflagged_stats(cell.column);
        if (stats && stats->median_text) {
          if (auto repair = make(*stats->median_text, strategy::kMedian)) return repair;
        }
      }
    } else if (!old_value) {
      const auto& stats = unflagged_stats(cell.column);
      if (stats) return make(stats->most_frequent, strategy::kMode);
    }
    return std::nullopt;
  }

  // Strictly most frequent rhs value of the row's lhs group, over the
  // denial/matching checks whose rhs is this column.
  std::optional<std::string> majority(std::size_t row, std::size_t rhs) {
    const std::string& rhs_name = table_.column(rhs).name;
    for (std::size_t p = 0; p < plans_.size(); ++p) {
      const auto& plan = plans_[p];
      std::string lhs_name;
      if (const auto* denial = std::get_if<DenialPlan>(&plan.check); denial && denial->rhs_column == rhs_name) {
        lhs_name = denial->lhs_column;
      } else if (const auto* matching = std::get_if<MatchingPlan>(&plan.check);
                 matching && matching->rhs_column == rhs_name) {
        lhs_name = matching->lhs_column;
      } else {
        continue;
      }
      const std::size_t lhs = table_.require_column(lhs_name);
      const auto& key_cell = table_.at(row, lhs);
      if (!key_cell) continue;
      const ColumnType lhs_type = table_.column(lhs).type;
      const std::string key = canonical_value(lhs_type, *key_cell);

      auto& counts = group_counts(p, lhs, rhs)[key];
      const std::string* best = nullptr;
      std::size_t best_count = 0;
      for (const auto& [value, count] : counts) {
        if (count > best_count) {
          best = &value;
          best_count = count;
        }
      }
      const auto& own = table_.at(row, rhs);
      const std::size_t own_count = own ? counts[*own] : 0;
      if (best != nullptr && best_count > own_count) return *best;
    }
    return std::nullopt;
  }

  // lhs key -> rhs value -> count, built once per plan.
  std::map<std::string, std::map<std::string, std::size_t>>& group_counts(std::size_t plan, std::size_t lhs,
                                                                          std::size_t rhs) {
    auto [it, inserted] = groups_.try_emplace(plan);
    if (inserted) {
      const ColumnType lhs_type = table_.column(lhs).type;
      for (std::size_t r = 0; r < table_.num_rows(); ++r) {
        const auto& key = table_.at(r, lhs);
        const auto& value = table_.at(r, rhs);
        if (key && value) ++it->second[canonical_value(lhs_type, *key)][*value];
      }
    }
    return it->second;
  }

  std::optional<std::string> colocated(std::size_t row, const std::string& column) {
    for (const auto& plan : plans_) {
      const auto* pair = std::get_if<ColocationPlan>(&plan.check);
      if (pair == nullptr) continue;
      std::string partner;
      if (pair->first_column == column) {
        partner = pair->second_column;
      } else if (pair->second_column == column) {
        partner = pair->first_column;
      } else {
        continue;
      }
      const auto& value = table_.at(row, table_.require_column(partner));
      if (value && !is_flagged(row, partner)) return *value;
    }
    return std::nullopt;
  }

  bool is_flagged(std::size_t row, const std::string& column) const {
    const auto it = flagged_rows_.find(column);
    return it != flagged_rows_.end() && it->second.contains(row);
  }

  const std::optional<ColumnStats>& unflagged_stats(const std::string& column) {
    auto it = stats_.find(column);
    if (it == stats_.end()) {
      auto stats = column_stats(table_, column, [&](std::size_t r) { return !is_flagged(r, column); });
      it = stats_.emplace(column, std::move(stats)).first;
    }
    return it->second;
  }

  const Table& table_;
  std::vector<CheckPlan> plans_;
  std::map<std::string, std::set<std::size_t>> flagged_rows_;
  std::map<CellRef, std::set<std::string>> detectors_;
  std::map<std::string, std::optional<ColumnStats>> stats_;
  std::map<std::size_t, std::map<std::string, std::map<std::string, std::size_t>>> groups_;
};

}  // namespace

std::string_view to_string(RepairMode mode) { return mode == RepairMode::kDelete ? "delete" : "repair"; }

std::optional<RepairMode> parse_repair_mode(std::string_view name) {
  if (name == "repair") return RepairMode::kRepair;
  if (name == "delete") return RepairMode::kDelete;
  return std::nullopt;
}

const Repair* RepairPlan::find(const CellRef& cell) const {
  const auto it = std::lower_bound(repairs.begin(), repairs.end(), cell,
                                   [](const Repair& r, const CellRef& c) { return r.cell < c; });
  return it != repairs.end() && it->cell == cell ? &*it : nullptr;
}

RepairPlan propose_repairs(const Table& table, const DetectionReport& report, const DependencySet& depset,
                           const DatasetConfig& config, RepairMode mode) {
  return Proposer(table, report, compile(depset, config, table).plans).propose(mode);
}

Table apply_repairs(const Table& table, const RepairPlan& plan) {
  Table out = table;
  for (const auto& repair : plan.repairs) {
    if (!out.contains(repair.cell)) throw StaleRepairError("repair targets missing cell " + to_string(repair.cell));
    if (out.at(repair.cell) != repair.old_value) {
      throw StaleRepairError("cell " + to_string(repair.cell) + " no longer holds the planned old value");
    }
    out.set(repair.cell, repair.new_value);
  }
  return out;
}

std::string write_repairs_csv(const RepairPlan& plan) {
  std::string out = "row,column,old,new,strategy\n";
  for (const auto& r : plan.repairs) {
    out += std::to_string(r.cell.row) + "," + csv_field(r.cell.column) + "," +
           (r.old_value ? csv_field(*r.old_value) : "") + "," + (r.new_value ? csv_field(*r.new_value) : "") + "," +
           csv_field(r.strategy) + "\n";
  }
  return out;
}

RepairPlan read_repairs_csv(std::string_view text) {
  auto records = parse_csv_records(text);
  if (records.empty()) throw DataError("repair plan file has no header");
  RepairPlan plan;
  for (std::size_t i = 1; i < records.size(); ++i) {
    auto& rec = records[i];
    if (rec.size() != 5 || !rec[0] || !rec[1] || !rec[4]) {
      throw DataError("repair plan line " + std::to_string(i + 1) + " is malformed");
    }
    const auto row = parse_number(*rec[0]);
    if (!row || *row < 0 || *row != std::floor(*row)) {
      throw DataError("repair plan line " + std::to_string(i + 1) + ": bad row index");
    }
    plan.repairs.push_back({CellRef{static_cast<std::size_t>(*row), *rec[1]}, rec[2], rec[3], *rec[4]});
  }
  std::sort(plan.repairs.begin(), plan.repairs.end(), [](const Repair& a, const Repair& b) { return a.cell < b.cell; });
  return plan;
}

}  // namespace ctxclean
