// Copyright 2026 The detmetrics Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Precision-recall curves and the average precision / average recall family.
#ifndef DETMETRICS_AP_H_
#define DETMETRICS_AP_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detmetrics/matching.h"

namespace detmetrics {

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

// One point per detection, in descending score order.
struct PrCurve {
  std::vector<PrPoint> points;
  bool interpolated = false;
  std::size_t num_gts = 0;

  friend bool operator==(const PrCurve&, const PrCurve&) = default;
};

struct ApResult {
  double ap_exact = 0.0;
  double ap_101 = 0.0;
  double tau = 0.5;
  std::string variant;
};

// tau = 0.50, 0.55, ..., 0.95.
std::array<double, 10> CocoTaus();

// Cumulative precision/recall after each pooled detection. Recall is 0
// throughout when there are no ground truths.
PrCurve BuildPrCurve(const PooledOutcomes& pooled);

// Dataset-wide curve for the given instances (matched per image and class).
// Throws ContractViolation when a detection has no score.
PrCurve BuildPrCurve(std::span<const Instance> gts,
                     std::span<const Instance> dets, const LqFunction& lq,
                     double tau);

// Suffix maximum of precision along the curve: every point takes the best
// precision reachable at its position or later.
PrCurve Interpolate(const PrCurve& curve);

// Exact area under the step curve over recall in [0, 1]; precision is 0
// past the last recall.
double ApExact(const PrCurve& curve);

// Mean precision sampled at recall 0.00, 0.01, ..., 1.00, each sample
// reading the first point whose recall reaches it.
double Ap101(const PrCurve& curve);

// Both AUC conventions on the interpolated curve at one tau. Empty when
// there are no ground truths.
std::optional<ApResult> ComputeAp(std::span<const MatchGroup> groups,
                                  double tau);

// Mean of the interpolated 101-point AP over CocoTaus(). Empty when there
// are no ground truths.
std::optional<double> ApCoco(std::span<const MatchGroup> groups);
std::optional<double> ApCoco(std::span<const Instance> gts,
                             std::span<const Instance> dets,
                             const LqFunction& lq);

// Mean over CocoTaus() of the recall reached with the top `max_dets`
// detections of every image, ranked across all classes present. Throws
// ConfigurationError for max_dets < 1; empty when there are no ground truths.
std::optional<double> AverageRecall(std::span<const MatchGroup> groups,
                                    std::size_t max_dets);
// As above with precomputed per-group caps (see PerImageCaps).
std::optional<double> AverageRecall(std::span<const MatchGroup> groups,
                                    std::span<const std::size_t> caps);
std::optional<double> AverageRecall(std::span<const Instance> gts,
                                    std::span<const Instance> dets,
                                    const LqFunction& lq,
                                    std::size_t max_dets);

// Single-point convention for hard predictions: precision * recall.
std::optional<double> HardPredictionAp(const MatchResult& match);

}  // namespace detmetrics

#endif  // DETMETRICS_AP_H_
