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
#include "detmetrics/pq.h"

#include <string>

#include "detmetrics/errors.h"

namespace detmetrics {

namespace {

void CheckPanoptic(const MatchResult& match) {
  if (match.tau != kPanopticTau) {
    throw ConfigurationError("PQ needs matches at tau = 0.5, got " +
                             std::to_string(match.tau));
  }
  if (match.tp_lqs.size() != match.n_tp) {
    throw ContractViolation("tp_lqs must hold one value per TP");
  }
}

}  // namespace

PqResult ComputePq(const MatchResult& match) {
  CheckPanoptic(match);
  double lq_sum = 0.0;
  for (double lq : match.tp_lqs) lq_sum += lq;
  const double tp = static_cast<double>(match.n_tp);
  const double denom = tp + 0.5 * static_cast<double>(match.n_fp) +
                       0.5 * static_cast<double>(match.n_fn);
  PqResult r;
  if (match.n_tp > 0) r.sq = lq_sum / tp;
  if (denom > 0.0) {
    r.pq = lq_sum / denom;
    r.rq = tp / denom;
  }
  return r;
}

std::optional<double> PqErrorIdentity(const MatchResult& match) {
  CheckPanoptic(match);
  double loc_error = 0.0;
  for (double lq : match.tp_lqs) loc_error += 1.0 - lq;
  const double z_hat = 2.0 * static_cast<double>(match.n_tp) +
                       static_cast<double>(match.n_fp) +
                       static_cast<double>(match.n_fn);
  if (z_hat == 0.0) return std::nullopt;
  return (loc_error / (1.0 - kPanopticTau) + static_cast<double>(match.n_fp) +
          static_cast<double>(match.n_fn)) /
         z_hat;
}

}  // namespace detmetrics
