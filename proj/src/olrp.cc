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
#include "detmetrics/olrp.h"

#include <algorithm>

#include "detmetrics/errors.h"

namespace detmetrics {

std::optional<double> SLrpCurve::ValueAt(double s) const {
  // Knots are in descending score order; take the last one still >= s.
  const SLrpKnot* hit = nullptr;
  for (const SLrpKnot& k : knots) {
    if (k.score < s) break;
    hit = &k;
  }
  if (hit) return hit->lrp.lrp;
  if (num_gts > 0) return 1.0;
  return std::nullopt;
}

SLrpCurve BuildSLrpCurve(const PooledOutcomes& pooled, double tau) {
  SLrpCurve curve;
  curve.num_gts = pooled.num_gts;
  curve.tau = tau;
  std::size_t tp = 0, fp = 0;
  double loc_error = 0.0;
  const auto& outs = pooled.outcomes;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (outs[i].is_tp()) {
      ++tp;
      loc_error += 1.0 - outs[i].lq;
    } else {
      ++fp;
    }
    const bool last_of_score =
        i + 1 == outs.size() || outs[i + 1].score != outs[i].score;
    if (!last_of_score) continue;
    if (tp > pooled.num_gts) {
      throw ContractViolation("more TPs than ground truths");
    }
    curve.knots.push_back(
        {outs[i].score,
         LrpFromTotals(tp, loc_error, fp, pooled.num_gts - tp, tau)});
  }
  return curve;
}

SLrpCurve BuildSLrpCurve(std::span<const MatchGroup> groups, double tau) {
  return BuildSLrpCurve(PoolSoft(groups, tau), tau);
}

SLrpCurve BuildSLrpCurve(std::span<const Instance> gts,
                         std::span<const Instance> dets, const LqFunction& lq,
                         double tau) {
  auto groups = GroupInstances(gts, dets, lq);
  return BuildSLrpCurve(groups, tau);
}

OlrpResult ComputeOlrp(const SLrpCurve& curve) {
  OlrpResult r;
  const SLrpKnot* best = nullptr;
  for (const SLrpKnot& k : curve.knots) {
    if (!k.lrp.lrp) continue;
    if (!best || *k.lrp.lrp < *best->lrp.lrp) best = &k;
  }
  if (best) {
    r.olrp = best->lrp.lrp;
    r.loc = best->lrp.loc;
    r.fp = best->lrp.fp;
    r.fn = best->lrp.fn;
    r.s_star = best->score;
  } else if (curve.num_gts > 0) {
    r.olrp = 1.0;
    r.fn = 1.0;
  }
  return r;
}

std::optional<double> ComputeAlrp(const SLrpCurve& curve) {
  std::vector<std::optional<double>> values;
  values.reserve(curve.knots.size());
  for (const SLrpKnot& k : curve.knots) values.push_back(k.lrp.lrp);
  return MeanOfDefined(values);
}

std::vector<Instance> CollapseToOptimalThreshold(
    std::span<const Instance> dets, double s_star) {
  std::vector<Instance> kept;
  for (const Instance& d : dets) {
    if (!d.score) {
      throw ContractViolation("thresholding needs scored detections");
    }
    if (*d.score >= s_star) kept.push_back(d);
  }
  std::sort(kept.begin(), kept.end(), [](const Instance& a, const Instance& b) {
    if (*a.score != *b.score) return *a.score > *b.score;
    return a.input_index < b.input_index;
  });
  for (std::size_t i = 0; i < kept.size(); ++i) {
    kept[i].score = 1.0;
    kept[i].input_index = i;
  }
  return kept;
}

std::vector<TauSweepPoint> TauSweep(std::span<const MatchGroup> groups,
                                    std::span<const double> taus) {
  std::vector<TauSweepPoint> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    if (!(tau >= 0.0 && tau < 1.0)) {
      throw ConfigurationError("tau grid values must lie in [0,1)");
    }
    out.push_back({tau, ComputeOlrp(BuildSLrpCurve(groups, tau))});
  }
  return out;
}

LrpSummary AggregateClasses(const std::map<int, OlrpResult>& per_class) {
  std::map<int, LrpResult> as_lrp;
  for (const auto& [cls, r] : per_class) {
    LrpResult x;
    x.lrp = r.olrp;
    x.loc = r.loc;
    x.fp = r.fp;
    x.fn = r.fn;
    as_lrp[cls] = x;
  }
  return AggregateClasses(as_lrp);
}

}  // namespace detmetrics
