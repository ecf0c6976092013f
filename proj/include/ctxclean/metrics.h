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
#include <map>
#include <string>

#include "ctxclean/detectors.h"
#include "ctxclean/injector.h"
#include "ctxclean/repair.h"

namespace ctxclean {

// Cell-level detection scores. Zero denominators give 0.
struct DetectionScores {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RepairScores {
  std::size_t correctly_detected = 0;
  std::size_t correct_repairs = 0;
  double repair_recall = 0.0;
  double repair_f1 = 0.0;
};

struct EvalReport {
  DetectionScores detection;
  RepairScores repair;
  std::map<std::string, DetectionScores> per_detector;
};

double harmonic_mean(double a, double b);

DetectionScores detection_metrics(const DetectionReport& report, const GroundTruth& truth);

// A repair is correct when its value equals the original (numbers within
// kNumericTolerance); a delete marker is correct only for an original null.
RepairScores repair_metrics(const RepairPlan& plan, const DetectionReport& report, const GroundTruth& truth);

EvalReport evaluate(const DetectionReport& report, const RepairPlan& plan, const GroundTruth& truth);

// snake_case keys, fractions with six decimals.
std::string to_json(const EvalReport& report);

}  // namespace ctxclean
