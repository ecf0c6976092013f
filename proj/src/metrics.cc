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

#include "ctxclean/metrics.h"

#include <cmath>
#include <set>

#include <fmt/format.h>

namespace ctxclean {

namespace {

double ratio(std::size_t numerator, std::size_t denominator) {
  return denominator == 0 ? 0.0 : static_cast<double>(numerator) / static_cast<double>(denominator);
}

DetectionScores score_cells(const std::set<CellRef>& detected, const GroundTruth& truth) {
  DetectionScores s;
  for (const auto& cell : detected) {
    if (truth.contains(cell)) {
      ++s.true_positives;
    } else {
      ++s.false_positives;
    }
  }
  s.false_negatives = truth.size() - s.true_positives;
  s.precision = ratio(s.true_positives, s.true_positives + s.false_positives);
  s.recall = ratio(s.true_positives, s.true_positives + s.false_negatives);
  s.f1 = harmonic_mean(s.precision, s.recall);
  return s;
}

bool repaired_correctly(const Cell& proposed, const Cell& original) {
  if (!proposed || !original) return !proposed && !original;
  const auto a = parse_number(*proposed);
  const auto b = parse_number(*original);
  if (a && b) return std::abs(*a - *b) <= kNumericTolerance;
  return *proposed == *original;
}

void write_scores(std::string& out, const DetectionScores& s, std::string_view indent) {
  out += fmt::format("{0}\"true_positives\": {1},\n{0}\"false_positives\": {2},\n{0}\"false_negatives\": {3},\n",
                     indent, s.true_positives, s.false_positives, s.false_negatives);
  out += fmt::format("{0}\"precision\": {1:.6f},\n{0}\"recall\": {2:.6f},\n{0}\"f1\": {3:.6f}", indent, s.precision,
                     s.recall, s.f1);
}

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

double harmonic_mean(double a, double b) { return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b); }

DetectionScores detection_metrics(const DetectionReport& report, const GroundTruth& truth) {
  return score_cells(report.cells(), truth);
}

RepairScores repair_metrics(const RepairPlan& plan, const DetectionReport& report, const GroundTruth& truth) {
  RepairScores s;
  for (const auto& cell : report.cells()) {
    const auto original = truth.original.find(cell);
    if (original == truth.original.end()) continue;
    ++s.correctly_detected;
    const Repair* repair = plan.find(cell);
    if (repair != nullptr && repaired_correctly(repair->new_value, original->second)) ++s.correct_repairs;
  }
  s.repair_recall = ratio(s.correct_repairs, s.correctly_detected);
  s.repair_f1 = harmonic_mean(detection_metrics(report, truth).precision, s.repair_recall);
  return s;
}

EvalReport evaluate(const DetectionReport& report, const RepairPlan& plan, const GroundTruth& truth) {
  EvalReport out;
  out.detection = detection_metrics(report, truth);
  out.repair = repair_metrics(plan, report, truth);
  std::map<std::string, std::set<CellRef>> by_detector;
  for (const auto& finding : report) by_detector[finding.detector].insert(finding.cell);
  for (const auto& [name, cells] : by_detector) out.per_detector.emplace(name, score_cells(cells, truth));
  return out;
}

std::string to_json(const EvalReport& report) {
  std::string out = "{\n";
  write_scores(out, report.detection, "  ");
  out += fmt::format(
      ",\n  \"correctly_detected\": {},\n  \"correct_repairs\": {},\n  \"repair_recall\": {:.6f},\n  \"repair_f1\": {:.6f},\n",
      report.repair.correctly_detected, report.repair.correct_repairs, report.repair.repair_recall,
      report.repair.repair_f1);
  out += "  \"per_detector\": {";
  bool first = true;
  for (const auto& [name, scores] : report.per_detector) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    " + json_string(name) + ": {\n";
    write_scores(out, scores, "      ");
    out += "\n    }";
  }
  out += first ? "}\n}\n" : "\n  }\n}\n";
  return out;
}

}  // namespace ctxclean
