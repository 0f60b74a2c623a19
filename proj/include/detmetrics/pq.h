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
#ifndef DETMETRICS_PQ_H_
#define DETMETRICS_PQ_H_

#include <optional>

#include "detmetrics/matching.h"

namespace detmetrics {

// PQ always validates TPs at IoU > 0.5.
inline constexpr double kPanopticTau = 0.5;

struct PqResult {
  std::optional<double> pq;
  // Mean TP lq; undefined without TPs.
  std::optional<double> sq;
  // N_TP / (N_TP + N_FP/2 + N_FN/2).
  std::optional<double> rq;

  friend bool operator==(const PqResult&, const PqResult&) = default;
};

// Throws ConfigurationError unless `match` was produced at tau == 0.5.
PqResult ComputePq(const MatchResult& match);

// 1 - PQ in its LRP-like form:
//   (sum_tp (1 - lq) / 0.5 + N_FP + N_FN) / (2 N_TP + N_FP + N_FN).
std::optional<double> PqErrorIdentity(const MatchResult& match);

}  // namespace detmetrics

#endif  // DETMETRICS_PQ_H_
