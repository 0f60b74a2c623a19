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
#ifndef DETMETRICS_LRP_H_
#define DETMETRICS_LRP_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>

#include "detmetrics/matching.h"

namespace detmetrics {

inline constexpr double kDefaultTau = 0.5;

// LRP Error and its components. The total is the average matching error:
//
//   lrp = (sum_tp (1 - lq) / (1 - tau) + N_FP + N_FN) / Z,
//   Z   = N_TP + N_FP + N_FN,
//
// and equals (w_loc * loc + w_fp * fp + w_fn * fn) / Z with
// w_loc = N_TP / (1 - tau), w_fp = |D|, w_fn = |G|.
//
// A component is undefined when its denominator is zero: loc without TPs,
// fp without detections, fn without ground truths. The total is undefined
// only when Z == 0.
struct LrpResult {
  std::optional<double> lrp;
  std::optional<double> loc;
  std::optional<double> fp;
  std::optional<double> fn;
  double w_loc = 0.0;
  double w_fp = 0.0;
  double w_fn = 0.0;
  double z = 0.0;
  std::size_t n_tp = 0;
  std::size_t n_fp = 0;
  std::size_t n_fn = 0;

  friend bool operator==(const LrpResult&, const LrpResult&) = default;
};

struct ImportanceWeights {
  double tp = 1.0;
  double fp = 1.0;
  double fn = 1.0;

  // Throws ConfigurationError unless all three are positive and finite.
  void Validate() const;

  friend bool operator==(const ImportanceWeights&,
                         const ImportanceWeights&) = default;
};

// Throws ContractViolation for tau outside [0, 1) or a TP lq <= tau.
LrpResult ComputeLrp(const MatchResult& match, double tau);

// LRP from sufficient statistics: the number of TPs, the sum of their
// localisation errors (1 - lq), and the FP/FN counts. Used by incremental
// s-LRP sweeps; performs no per-TP checks.
LrpResult LrpFromTotals(std::size_t n_tp, double loc_error_sum,
                        std::size_t n_fp, std::size_t n_fn, double tau);

// Weighted LRP: importance weights enter both the total matching error and
// its normaliser. Undefined when there is nothing to evaluate.
std::optional<double> ComputeLrpWeighted(const MatchResult& match, double tau,
                                         const ImportanceWeights& alpha);

// Arithmetic mean of the defined values; empty when none is defined.
std::optional<double> MeanOfDefined(std::span<const std::optional<double>> v);

struct LrpSummary {
  std::optional<double> lrp;
  std::optional<double> loc;
  std::optional<double> fp;
  std::optional<double> fn;
  // Number of classes whose total was defined.
  std::size_t num_classes = 0;

  friend bool operator==(const LrpSummary&, const LrpSummary&) = default;
};

// Class-wise averaging. Every field is averaged over the classes where that
// field is defined, independently of the others. Throws UndefinedError when
// no class has a defined total.
LrpSummary AggregateClasses(const std::map<int, LrpResult>& per_class);

}  // namespace detmetrics

#endif  // DETMETRICS_LRP_H_
