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
// Score-threshold analysis of soft predictions: s-LRP curves, Optimal LRP
// and the LRP-optimal threshold s*.
//
// Thresholding keeps detections with score >= s. Between two consecutive
// detection scores s_i > s_j the kept set does not change, so LRP is
// constant on [s_j, s_i) and evaluating it at the detection scores alone is
// exact.
#ifndef DETMETRICS_OLRP_H_
#define DETMETRICS_OLRP_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "detmetrics/lrp.h"
#include "detmetrics/matching.h"

namespace detmetrics {

struct SLrpKnot {
  double score = 0.0;
  LrpResult lrp;

  friend bool operator==(const SLrpKnot&, const SLrpKnot&) = default;
};

struct SLrpCurve {
  // One knot per distinct detection score, strictly decreasing scores.
  std::vector<SLrpKnot> knots;
  std::size_t num_gts = 0;
  double tau = kDefaultTau;

  // LRP of the detections with score >= s. Above the highest score nothing
  // is kept: 1 with ground truths, undefined without.
  std::optional<double> ValueAt(double s) const;

  friend bool operator==(const SLrpCurve&, const SLrpCurve&) = default;
};

struct OlrpResult {
  std::optional<double> olrp;
  std::optional<double> loc;
  std::optional<double> fp;
  std::optional<double> fn;
  // Absent when there is no detection to threshold.
  std::optional<double> s_star;

  friend bool operator==(const OlrpResult&, const OlrpResult&) = default;
};

struct TauSweepPoint {
  double tau = 0.0;
  OlrpResult olrp;
};

// One pass over the pooled ranking with running TP/FP/localisation-error
// accumulators.
SLrpCurve BuildSLrpCurve(const PooledOutcomes& pooled, double tau);
SLrpCurve BuildSLrpCurve(std::span<const MatchGroup> groups, double tau);
SLrpCurve BuildSLrpCurve(std::span<const Instance> gts,
                         std::span<const Instance> dets, const LqFunction& lq,
                         double tau);

// Minimum over the knots. Equal values resolve to the highest score. An
// empty curve with ground truths gives oLRP 1 (everything missed) and no
// s*; without ground truths everything is undefined.
OlrpResult ComputeOlrp(const SLrpCurve& curve);

// Unweighted mean of the knot values; empty for an empty curve.
std::optional<double> ComputeAlrp(const SLrpCurve& curve);

// The two-step rewrite that drives aLRP down to oLRP without changing the
// detector: drop detections scored below s*, then give the survivors score
// 1. Survivors come back in their original ranking order with input indices
// renumbered from 0, so equal-score tie-breaking reproduces the original
// matching order.
std::vector<Instance> CollapseToOptimalThreshold(
    std::span<const Instance> dets, double s_star);

// oLRP recomputed at every tau of the grid.
std::vector<TauSweepPoint> TauSweep(std::span<const MatchGroup> groups,
                                    std::span<const double> taus);

// Field-wise class averaging of oLRP records (the `lrp` field carries oLRP).
LrpSummary AggregateClasses(const std::map<int, OlrpResult>& per_class);

}  // namespace detmetrics

#endif  // DETMETRICS_OLRP_H_
