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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctxclean/detectors.h"
#include "ctxclean/ofd.h"
#include "ctxclean/table.h"

namespace ctxclean {

enum class RepairMode { kRepair, kDelete };

std::string_view to_string(RepairMode mode);
std::optional<RepairMode> parse_repair_mode(std::string_view name);

namespace strategy {
inline constexpr std::string_view kMajority = "majority";
inline constexpr std::string_view kColocation = "colocation";
inline constexpr std::string_view kMedian = "median";
inline constexpr std::string_view kMode = "mode";
inline constexpr std::string_view kDelete = "delete";
}  // namespace strategy

struct Repair {
  CellRef cell;
  Cell old_value;
  Cell new_value;  // nullopt is the delete marker
  std::string strategy;

  friend bool operator==(const Repair&, const Repair&) = default;
};

// At most one repair per cell, ordered by cell.
struct RepairPlan {
  std::vector<Repair> repairs;

  std::size_t size() const { return repairs.size(); }
  bool empty() const { return repairs.empty(); }
  const Repair* find(const CellRef& cell) const;

  friend bool operator==(const RepairPlan&, const RepairPlan&) = default;
};

// One proposal per flagged cell, first applicable strategy wins:
//  1. majority: the cell is in the rhs column of a denial/matching check;
//     take the most frequent rhs value of its lhs group if it occurs strictly
//     more often than the cell's own value.
//  2. colocation: a null or capability/monitoring-flagged numeric cell takes
//     the same-row value of a co-located sensor whose cell is unflagged.
//  3. median: capability-flagged or null numeric cell takes the median of
//     the column's unflagged cells.
//  4. mode: null non-numeric cell takes the most frequent unflagged value.
// Cells matching none of these stay flagged without a proposal. In delete
// mode every flagged non-null cell is proposed as null instead.
RepairPlan propose_repairs(const Table& table, const DetectionReport& report, const DependencySet& depset,
                           const DatasetConfig& config, RepairMode mode = RepairMode::kRepair);

class StaleRepairError : public DataError {
 public:
  using DataError::DataError;
};

// Returns a copy of the table with the plan applied. Throws StaleRepairError
// if a planned cell no longer holds its recorded old value.
Table apply_repairs(const Table& table, const RepairPlan& plan);

// Repair plan file: row,column,old,new,strategy
std::string write_repairs_csv(const RepairPlan& plan);
RepairPlan read_repairs_csv(std::string_view text);

}  // namespace ctxclean
