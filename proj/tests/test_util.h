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

// Fixtures and independent oracles shared by the test binaries. The oracles
// deliberately avoid the library's grouping and similarity code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctxclean/detectors.h"
#include "ctxclean/ofd.h"
#include "ctxclean/pipeline.h"
#include "ctxclean/table.h"

namespace ctxclean::testing {

inline std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(CTXCLEAN_DATA_DIR) / relative;
}

inline Table make_table(const std::vector<std::pair<std::string, ColumnType>>& columns,
                        std::vector<std::vector<Cell>> rows) {
  std::vector<Column> schema;
  for (const auto& [name, type] : columns) schema.push_back({name, type});
  return Table(std::move(schema), std::move(rows));
}

// Single-column table.
inline Table column_table(const std::string& name, ColumnType type, const std::vector<Cell>& values) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& value : values) rows.push_back({value});
  return make_table({{name, type}}, std::move(rows));
}

inline std::set<CellRef> cells_of(const DetectionReport& report) { return report.cells(); }

// Textbook Wagner-Fischer over code points.
inline std::u32string decode_utf8(const std::string& s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k < len && i + k < s.size(); ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline std::size_t oracle_distance(const std::string& a8, const std::string& b8) {
  const auto a = decode_utf8(a8);
  const auto b = decode_utf8(b8);
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[a.size()][b.size()];
}

inline double oracle_similarity(const std::string& a, const std::string& b) {
  const std::size_t longest = std::max(decode_utf8(a).size(), decode_utf8(b).size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(oracle_distance(a, b)) / static_cast<double>(longest);
}

inline bool oracle_lhs_equal(ColumnType type, const std::string& a, const std::string& b) {
  if (type == ColumnType::kNumber) return std::stod(a) == std::stod(b);
  return a == b;
}

inline bool oracle_rhs_differs(ColumnType type, const std::string& a, const std::string& b) {
  if (type == ColumnType::kNumber) return std::fabs(std::stod(a) - std::stod(b)) > 1e-9;
  return a != b;
}

// Every ordered pair of rows, no blocking.
template <typename Violates>
std::set<CellRef> brute_force_pairs(const Table& table, const std::string& lhs, const std::string& rhs,
                                    Violates violates) {
  const std::size_t l = table.require_column(lhs);
  const std::size_t r = table.require_column(rhs);
  std::set<CellRef> flagged;
  for (std::size_t i = 0; i < table.num_rows(); ++i) {
    for (std::size_t j = i + 1; j < table.num_rows(); ++j) {
      const auto &li = table.at(i, l), &lj = table.at(j, l), &ri = table.at(i, r), &rj = table.at(j, r);
      if (!li || !lj || !ri || !rj) continue;
      if (!oracle_lhs_equal(table.column(l).type, *li, *lj)) continue;
      if (!violates(*ri, *rj)) continue;
      flagged.insert({i, rhs});
      flagged.insert({j, rhs});
    }
  }
  return flagged;
}

inline std::set<CellRef> oracle_denial(const Table& table, const std::string& lhs, const std::string& rhs) {
  const ColumnType type = table.column(table.require_column(rhs)).type;
  return brute_force_pairs(table, lhs, rhs,
                           [&](const std::string& a, const std::string& b) { return oracle_rhs_differs(type, a, b); });
}

inline std::set<CellRef> oracle_matching(const Table& table, const std::string& lhs, const std::string& rhs,
                                         double threshold) {
  return brute_force_pairs(table, lhs, rhs, [&](const std::string& a, const std::string& b) {
    return oracle_similarity(a, b) < threshold;
  });
}

// Random table with small domains so that lhs groups collide often.
inline Table random_table(std::mt19937_64& rng, std::size_t max_rows = 200, std::size_t max_columns = 5) {
  std::uniform_int_distribution<std::size_t> rows_dist(0, max_rows);
  std::uniform_int_distribution<std::size_t> cols_dist(2, max_columns);
  const std::size_t rows = rows_dist(rng);
  const std::size_t cols = cols_dist(rng);
  std::vector<std::pair<std::string, ColumnType>> columns;
  std::vector<int> domain;
  for (std::size_t c = 0; c < cols; ++c) {
    const bool numeric = rng() % 3 == 0;
    columns.emplace_back("c" + std::to_string(c), numeric ? ColumnType::kNumber : ColumnType::kText);
    domain.push_back(1 + static_cast<int>(rng() % 6));
  }
  static const std::vector<std::string> words = {"berlin", "brelin", "bern", "barlin", "bonn", "2025551234",
                                                 "2025551239", "abc",  "xyz"};
  std::vector<std::vector<Cell>> data(rows);
  for (auto& row : data) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (rng() % 10 == 0) {
        row.push_back(std::nullopt);
      } else if (columns[c].second == ColumnType::kNumber) {
        // Mix spellings of the same number ("1", "1.0") to exercise numeric equality.
        const int v = static_cast<int>(rng() % domain[c]);
        row.push_back(rng() % 2 ? std::to_string(v) : std::to_string(v) + ".0");
      } else {
        row.push_back(words[rng() % std::min<std::size_t>(words.size(), domain[c] + 2)]);
      }
    }
  }
  return make_table(columns, std::move(data));
}

// Units of vocabulary triples over a small universe of sensors, devices and
// column nodes. Each unit is toggled as a whole; the unit for sensor s0's
// "broken" metadata node lacks a value and makes any graph containing it
// invalid.
using Unit = std::vector<Triple>;

inline std::vector<Unit> vocabulary_units() {
  const std::string ns = "https://ctxclean.dev/t#";
  auto node = [&](const std::string& local) { return Term::Iri(ns + local); };
  auto pred = [](std::string_view local) { return Term::Iri(vocab::iri(local)); };
  std::vector<Unit> units;
  for (int s = 0; s < 4; ++s) {
    const std::string sensor = "s" + std::to_string(s);
    for (int d = 0; d < 3; ++d) units.push_back({{node(sensor), pred(vocab::kAttachedTo), node("d" + std::to_string(d))}});
    for (int p = 0; p < 3; ++p) units.push_back({{node(sensor), pred(vocab::kDeployedAt), node("p" + std::to_string(p))}});
    units.push_back({{node(sensor), pred(vocab::kMapsToColumn), Term::Literal("col_" + sensor)}});
    const std::vector<std::pair<std::string, std::string>> metadata = {
        {"min", "-55"}, {"min", "-40"}, {"max", "125"}, {"max", "85"}, {"resolution", "0.5"}};
    for (std::size_t m = 0; m < metadata.size(); ++m) {
      const std::string meta = sensor + "_meta" + std::to_string(m);
      units.push_back({{node(sensor), pred(vocab::kHasMetadata), node(meta)},
                       {node(meta), pred(vocab::kMetadataType), Term::Literal(metadata[m].first)},
                       {node(meta), pred(vocab::kMetadataValue), Term::Literal(metadata[m].second)}});
    }
  }
  units.push_back({{node("s0"), pred(vocab::kHasMetadata), node("s0_broken")},
                   {node("s0_broken"), pred(vocab::kMetadataType), Term::Literal("min")}});
  for (int p = 0; p < 3; ++p) {
    for (int r = 0; r < 2; ++r) {
      units.push_back({{node("p" + std::to_string(p)), pred(vocab::kAtLocation), node("room" + std::to_string(r))}});
    }
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a != b) units.push_back({{node("d" + std::to_string(a)), pred(vocab::kSendsTo), node("d" + std::to_string(b))}});
    }
    units.push_back({{node("d" + std::to_string(a)), pred(vocab::kMonitoredBy), node("monitor")}});
    units.push_back({{node("d" + std::to_string(a)), pred(vocab::kTimestampColumn), Term::Literal("ts_" + std::to_string(a))}});
  }
  for (int a = 0; a < 4; ++a) {
    const std::string column = "c" + std::to_string(a);
    for (int b = 0; b < 4; ++b) {
      if (a != b) units.push_back({{node(column), pred(vocab::kDetermines), node("c" + std::to_string(b))}});
    }
    units.push_back({{node(column), pred(vocab::kMapsToColumn), Term::Literal("Column" + std::to_string(a))}});
  }
  for (int m = 0; m < 2; ++m) {
    const std::string match = "m" + std::to_string(m);
    units.push_back({{node("c" + std::to_string(m)), pred(vocab::kMatchesSimilar), node(match)},
                     {node(match), pred(vocab::kSimilarTo), node("c" + std::to_string(m + 2))},
                     {node(match), pred(vocab::kThreshold), Term::Literal(m == 0 ? "0.8" : "75")}});
  }
  return units;
}

// Toggles one to three random units: a unit fully present is removed,
// otherwise its missing triples are added.
inline TripleGraph mutate(TripleGraph graph, const std::vector<Unit>& units, std::mt19937_64& rng) {
  const std::size_t toggles = 1 + rng() % 3;
  for (std::size_t i = 0; i < toggles; ++i) {
    const Unit& unit = units[rng() % units.size()];
    const bool present = std::all_of(unit.begin(), unit.end(), [&](const Triple& t) { return graph.contains(t); });
    for (const auto& triple : unit) {
      if (present) {
        graph.erase(triple);
      } else {
        graph.insert(triple);
      }
    }
  }
  return graph;
}

}  // namespace ctxclean::testing
