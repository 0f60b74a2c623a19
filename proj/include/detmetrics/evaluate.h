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
// Dataset-level evaluation: per-class matching, the requested metrics, and
// class-averaged summaries.
#ifndef DETMETRICS_EVALUATE_H_
#define DETMETRICS_EVALUATE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "detmetrics/ap.h"
#include "detmetrics/dataset.h"
#include "detmetrics/lrp.h"
#include "detmetrics/matching.h"
#include "detmetrics/olrp.h"

namespace detmetrics {

inline constexpr char kEngineVersion[] = "1.0.0";

struct MetricSet {
  bool lrp = true;
  bool olrp = true;
  bool pq = false;
  bool ap = true;
  bool ar = false;

  // Comma-separated subset of lrp,olrp,pq,ap,ar. Throws ConfigurationError
  // on unknown or empty lists.
  static MetricSet Parse(const std::string& list);
  std::string ToString() const;

  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

struct AreaPartition {
  std::string name;
  AreaRange range;

  friend bool operator==(const AreaPartition&, const AreaPartition&) = default;
};

struct EvalConfig {
  Task task = Task::kBox;
  double tau = kDefaultTau;
  FilterSpec filter;
  ImportanceWeights alpha;
  MetricSet metrics;
  std::size_t ar_max_dets = 100;
  // Single-point AP for hard predictions; off unless asked for.
  bool hard_ap = false;
  bool include_curves = false;
  // Extra summaries, each re-evaluating with its own area range.
  std::vector<AreaPartition> area_partitions;
  // Worker threads for the per-class fan-out; 0 picks the hardware count.
  // Results do not depend on it and it is not echoed in reports.
  int threads = 1;

  // Checks the config on its own and against the detections' prediction
  // type. Throws ConfigurationError.
  void Validate(bool detections_scored) const;

  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

struct SLrpPoint {
  double score = 0.0;
  std::optional<double> lrp, loc, fp, fn;

  friend bool operator==(const SLrpPoint&, const SLrpPoint&) = default;
};

// Metric values of one class or the means of a class group. Fields of
// metrics that were not requested stay empty, as do undefined values.
struct MetricValues {
  std::optional<double> lrp, lrp_loc, lrp_fp, lrp_fn;
  std::optional<double> lrp_weighted;
  std::optional<double> olrp, olrp_loc, olrp_fp, olrp_fn;
  std::optional<double> pq, sq, rq;
  // ap is the tau-averaged 101-point AP; ap_50_exact the exact AUC at 0.5.
  std::optional<double> ap, ap_50, ap_75, ap_50_exact;
  std::optional<double> ap_hard;
  std::optional<double> ar;

  friend bool operator==(const MetricValues&, const MetricValues&) = default;
};

struct ClassRecord {
  int class_id = 0;
  std::string name;
  std::optional<std::string> group;
  std::size_t num_gts = 0;
  std::size_t num_dets = 0;
  std::size_t n_tp = 0;
  std::size_t n_fp = 0;
  std::size_t n_fn = 0;
  MetricValues values;
  std::optional<double> s_star;
  std::vector<SLrpPoint> slrp_curve;  // only with include_curves
  std::vector<PrPoint> pr_curve;      // raw curve at tau, with include_curves

  friend bool operator==(const ClassRecord&, const ClassRecord&) = default;
};

struct GroupSummary {
  // "all", "things", "stuff" or "area:<partition>".
  std::string name;
  std::size_t num_classes = 0;
  MetricValues means;

  friend bool operator==(const GroupSummary&, const GroupSummary&) = default;
};

struct InputDigest {
  std::string role;  // "gt" or "dt"
  std::string sha256;

  friend bool operator==(const InputDigest&, const InputDigest&) = default;
};

struct Report {
  std::string engine_version = kEngineVersion;
  EvalConfig config;
  std::vector<InputDigest> inputs;
  std::vector<std::string> warnings;
  std::vector<ClassRecord> classes;
  std::vector<GroupSummary> summaries;

  friend bool operator==(const Report&, const Report&) = default;
};

// Evaluates `pair` class by class. Classes listed in the categories but
// without ground truths or detections get empty records and drop out of
// the means. Throws UndefinedError when no class has any defined value.
Report RunEvaluate(const DatasetPair& pair, const EvalConfig& cfg);

struct TauSweepRow {
  double tau = 0.0;
  int class_id = 0;
  OlrpResult olrp;
};

// oLRP of every class at every tau of the grid, followed by one row per tau
// with class_id -1 holding the class means (s* left empty).
std::vector<TauSweepRow> SweepTau(const DatasetPair& pair,
                                  const EvalConfig& cfg,
                                  const std::vector<double>& taus);

}  // namespace detmetrics

#endif  // DETMETRICS_EVALUATE_H_
