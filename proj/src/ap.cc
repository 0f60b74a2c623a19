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
#include "detmetrics/ap.h"

#include <algorithm>

#include "detmetrics/errors.h"

namespace detmetrics {

std::array<double, 10> CocoTaus() {
  std::array<double, 10> taus{};
  for (int i = 0; i < 10; ++i) taus[i] = (50.0 + 5.0 * i) / 100.0;
  return taus;
}

PrCurve BuildPrCurve(const PooledOutcomes& pooled) {
  PrCurve curve;
  curve.num_gts = pooled.num_gts;
  curve.points.reserve(pooled.outcomes.size());
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (const DetectionOutcome& out : pooled.outcomes) {
    ++seen;
    tp += out.is_tp();
    PrPoint p;
    p.precision = static_cast<double>(tp) / static_cast<double>(seen);
    p.recall = pooled.num_gts == 0 ? 0.0
                                   : static_cast<double>(tp) /
                                         static_cast<double>(pooled.num_gts);
    curve.points.push_back(p);
  }
  return curve;
}

PrCurve BuildPrCurve(std::span<const Instance> gts,
                     std::span<const Instance> dets, const LqFunction& lq,
                     double tau) {
  auto groups = GroupInstances(gts, dets, lq);
  return BuildPrCurve(PoolSoft(groups, tau));
}

PrCurve Interpolate(const PrCurve& curve) {
  PrCurve out = curve;
  out.interpolated = true;
  double best = 0.0;
  for (auto it = out.points.rbegin(); it != out.points.rend(); ++it) {
    best = std::max(best, it->precision);
    it->precision = best;
  }
  return out;
}

double ApExact(const PrCurve& curve) {
  double area = 0.0;
  double prev_recall = 0.0;
  for (const PrPoint& p : curve.points) {
    area += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return area;
}

double Ap101(const PrCurve& curve) {
  double sum = 0.0;
  std::size_t j = 0;
  for (int i = 0; i <= 100; ++i) {
    const double threshold = i / 100.0;
    while (j < curve.points.size() && curve.points[j].recall < threshold) ++j;
    if (j == curve.points.size()) break;
    sum += curve.points[j].precision;
  }
  return sum / 101.0;
}

std::optional<ApResult> ComputeAp(std::span<const MatchGroup> groups,
                                  double tau) {
  PrCurve curve = BuildPrCurve(PoolSoft(groups, tau));
  if (curve.num_gts == 0) return std::nullopt;
  PrCurve envelope = Interpolate(curve);
  ApResult r;
  r.ap_exact = ApExact(envelope);
  r.ap_101 = Ap101(envelope);
  r.tau = tau;
  r.variant = "interpolated";
  return r;
}

std::optional<double> ApCoco(std::span<const MatchGroup> groups) {
  double sum = 0.0;
  for (double tau : CocoTaus()) {
    auto ap = ComputeAp(groups, tau);
    if (!ap) return std::nullopt;
    sum += ap->ap_101;
  }
  return sum / 10.0;
}

std::optional<double> ApCoco(std::span<const Instance> gts,
                             std::span<const Instance> dets,
                             const LqFunction& lq) {
  auto groups = GroupInstances(gts, dets, lq);
  return ApCoco(groups);
}

std::optional<double> AverageRecall(std::span<const MatchGroup> groups,
                                    std::size_t max_dets) {
  if (max_dets < 1) {
    throw ConfigurationError("average recall needs at least one detection");
  }
  return AverageRecall(groups, PerImageCaps(groups, max_dets));
}

std::optional<double> AverageRecall(std::span<const MatchGroup> groups,
                                    std::span<const std::size_t> caps) {
  double sum = 0.0;
  for (double tau : CocoTaus()) {
    PooledOutcomes pooled = PoolSoft(groups, tau, caps);
    if (pooled.num_gts == 0) return std::nullopt;
    std::size_t tp = 0;
    for (const auto& out : pooled.outcomes) tp += out.is_tp();
    sum += static_cast<double>(tp) / static_cast<double>(pooled.num_gts);
  }
  return sum / 10.0;
}

std::optional<double> AverageRecall(std::span<const Instance> gts,
                                    std::span<const Instance> dets,
                                    const LqFunction& lq,
                                    std::size_t max_dets) {
  auto groups = GroupInstances(gts, dets, lq);
  return AverageRecall(groups, max_dets);
}

std::optional<double> HardPredictionAp(const MatchResult& match) {
  if (match.num_ground_truths() == 0 || match.num_detections() == 0) {
    return match.num_ground_truths() == 0 ? std::nullopt
                                          : std::optional<double>(0.0);
  }
  const double tp = static_cast<double>(match.n_tp);
  return (tp / static_cast<double>(match.num_detections())) *
         (tp / static_cast<double>(match.num_ground_truths()));
}

}  // namespace detmetrics
