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
// Assignment of detections to ground truths. A detection is a TP candidate
// for a ground truth only when their localisation quality is strictly above
// the TP validation threshold tau.
#ifndef DETMETRICS_MATCHING_H_
#define DETMETRICS_MATCHING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "detmetrics/geometry.h"

namespace detmetrics {

// One ground truth or detection. A score marks a soft prediction.
struct Instance {
  std::int64_t image_id = 0;
  int class_id = 0;
  Geometry geometry = BoxGeom(0, 0, 1, 1);
  std::optional<double> score;
  double area = 0.0;
  // Position in the source file; breaks every ordering tie.
  std::size_t input_index = 0;
};

using LqFunction =
    std::function<LocalisationQuality(const Geometry&, const Geometry&)>;

// The default lq: IoU for boxes and masks, OKS for keypoints.
LqFunction DefaultLqFunction();

// Dense lq values, rows are ground truths and columns are detections.
class LqMatrix {
 public:
  LqMatrix() = default;
  LqMatrix(std::size_t num_gts, std::size_t num_dets,
           std::vector<double> values);

  static LqMatrix Compute(std::span<const Instance> gts,
                          std::span<const Instance> dets,
                          const LqFunction& lq);

  std::size_t num_gts() const { return num_gts_; }
  std::size_t num_dets() const { return num_dets_; }
  double operator()(std::size_t gt, std::size_t det) const {
    return values_[gt * num_dets_ + det];
  }

 private:
  std::size_t num_gts_ = 0;
  std::size_t num_dets_ = 0;
  std::vector<double> values_;
};

struct MatchResult {
  double tau = 0.5;
  std::size_t n_tp = 0;
  std::size_t n_fp = 0;
  std::size_t n_fn = 0;
  // One entry per TP, aligned with tp_pairs.
  std::vector<double> tp_lqs;
  // (ground-truth index, detection index) per TP.
  std::vector<std::pair<std::size_t, std::size_t>> tp_pairs;

  std::size_t num_detections() const { return n_tp + n_fp; }
  std::size_t num_ground_truths() const { return n_tp + n_fn; }

  // Pools another (class, image) result evaluated at the same tau.
  void Merge(const MatchResult& other);

  // Builds a result directly from counts, for analytic use.
  static MatchResult FromCounts(double tau, std::vector<double> tp_lqs,
                                std::size_t n_fp, std::size_t n_fn);

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

// What happened to a single soft detection.
struct DetectionOutcome {
  double score = 0.0;
  std::size_t tie_key = 0;
  // Column of the detection in the lq matrix it came from.
  std::size_t det = 0;
  // Matched ground-truth row; empty for a false positive.
  std::optional<std::size_t> gt;
  double lq = 0.0;

  bool is_tp() const { return gt.has_value(); }
};

// Orders outcomes by descending score, then ascending tie key.
bool ScoreOrder(const DetectionOutcome& a, const DetectionOutcome& b);

// Soft matching on a precomputed matrix. Detections are visited by
// descending score (ties by ascending tie key); each one takes the unmatched
// ground truth with the highest lq > tau (ties to the lowest row). Returns
// one outcome per detection in visiting order.
std::vector<DetectionOutcome> MatchSoftOutcomes(
    const LqMatrix& lq, std::span<const double> scores,
    std::span<const std::size_t> tie_keys, double tau);

// Collapses outcomes into counts. TP pairs are (gt, tie key), with the
// ground-truth row translated through `gt_keys` when given.
MatchResult SummarizeOutcomes(std::span<const DetectionOutcome> outcomes,
                              std::size_t num_gts, double tau,
                              std::span<const std::size_t> gt_keys = {});

// Hard matching: every (gt, det) pair with lq > tau, sorted by lq
// descending then by (gt key, det key), accepted greedily when both sides
// are still free.
MatchResult MatchHard(const LqMatrix& lq, double tau,
                      std::span<const std::size_t> gt_keys = {},
                      std::span<const std::size_t> det_keys = {});

// Instance-level wrappers for a single (image, class) group. Pairs are
// reported as input indices. MatchSoft throws ContractViolation when a
// detection has no score.
MatchResult MatchSoft(std::span<const Instance> gts,
                      std::span<const Instance> dets, const LqFunction& lq,
                      double tau);
MatchResult MatchHard(std::span<const Instance> gts,
                      std::span<const Instance> dets, const LqFunction& lq,
                      double tau);

// Matching inputs of one (image, class) group.
struct MatchGroup {
  std::int64_t image_id = 0;
  int class_id = 0;
  LqMatrix lq;
  std::vector<double> scores;  // empty for hard predictions
  std::vector<std::size_t> gt_keys;
  std::vector<std::size_t> det_keys;
};

// Splits instances into (image, class) groups, ordered by (class, image),
// and computes their lq matrices. Keys are input indices.
std::vector<MatchGroup> GroupInstances(std::span<const Instance> gts,
                                       std::span<const Instance> dets,
                                       const LqFunction& lq);

// Soft outcomes of many groups pooled into one ranking.
struct PooledOutcomes {
  // Sorted by ScoreOrder. `gt` holds ground-truth keys, `tie_key` the
  // detection keys.
  std::vector<DetectionOutcome> outcomes;
  std::size_t num_gts = 0;
};

// Matches every group at `tau` and pools the outcomes. With `per_group_cap`
// only the top-k detections of each group take part.
PooledOutcomes PoolSoft(std::span<const MatchGroup> groups, double tau,
                        std::optional<std::size_t> per_group_cap = {});
// As above with one cap per group.
PooledOutcomes PoolSoft(std::span<const MatchGroup> groups, double tau,
                        std::span<const std::size_t> per_group_caps);

// How many detections of each group survive keeping the top `cap`
// detections of every image across all the groups given. Within an image,
// ranking is by descending score then ascending detection key.
std::vector<std::size_t> PerImageCaps(std::span<const MatchGroup> groups,
                                      std::size_t cap);

// Hard-matches every group at `tau` and merges the results.
MatchResult PoolHard(std::span<const MatchGroup> groups, double tau);

struct AreaRange {
  double min = 0.0;
  double max = 0.0;

  bool Contains(double area) const { return area >= min && area < max; }
  friend bool operator==(const AreaRange&, const AreaRange&) = default;
};

struct FilterSpec {
  std::optional<double> score_threshold;
  std::optional<std::size_t> max_per_image;
  std::optional<std::size_t> max_per_class;
  std::optional<AreaRange> area_range;

  bool IsScoreDependent() const {
    return (score_threshold && *score_threshold > 0.0) || max_per_image ||
           max_per_class;
  }
  // Throws ConfigurationError for caps < 1, thresholds outside [0, 1] or an
  // empty area range.
  void Validate() const;

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

// Keeps detections with score >= threshold, then the top-k per image, then
// the top-k per class over the whole input, then those inside the area
// range. Survivors keep their input order. Throws ConfigurationError when a
// score-dependent filter meets an unscored detection.
std::vector<Instance> FilterDetections(std::span<const Instance> detections,
                                       const FilterSpec& spec);

// Ground truths only see the area range.
std::vector<Instance> FilterGroundTruths(std::span<const Instance> gts,
                                         const FilterSpec& spec);

}  // namespace detmetrics

#endif  // DETMETRICS_MATCHING_H_
