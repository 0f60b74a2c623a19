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
#include "detmetrics/matching.h"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "detmetrics/errors.h"

namespace detmetrics {

LqFunction DefaultLqFunction() { return &LocalisationQualityOf; }

LqMatrix::LqMatrix(std::size_t num_gts, std::size_t num_dets,
                   std::vector<double> values)
    : num_gts_(num_gts), num_dets_(num_dets), values_(std::move(values)) {
  if (values_.size() != num_gts_ * num_dets_) {
    throw ContractViolation("lq matrix size mismatch");
  }
}

LqMatrix LqMatrix::Compute(std::span<const Instance> gts,
                           std::span<const Instance> dets,
                           const LqFunction& lq) {
  std::vector<double> values(gts.size() * dets.size());
  for (std::size_t g = 0; g < gts.size(); ++g) {
    for (std::size_t d = 0; d < dets.size(); ++d) {
      values[g * dets.size() + d] =
          lq(gts[g].geometry, dets[d].geometry).value();
    }
  }
  return LqMatrix(gts.size(), dets.size(), std::move(values));
}

void MatchResult::Merge(const MatchResult& other) {
  if (other.tau != tau) {
    throw ContractViolation("cannot merge match results with different tau");
  }
  n_tp += other.n_tp;
  n_fp += other.n_fp;
  n_fn += other.n_fn;
  tp_lqs.insert(tp_lqs.end(), other.tp_lqs.begin(), other.tp_lqs.end());
  tp_pairs.insert(tp_pairs.end(), other.tp_pairs.begin(),
                  other.tp_pairs.end());
}

MatchResult MatchResult::FromCounts(double tau, std::vector<double> tp_lqs,
                                    std::size_t n_fp, std::size_t n_fn) {
  MatchResult m;
  m.tau = tau;
  m.n_tp = tp_lqs.size();
  m.n_fp = n_fp;
  m.n_fn = n_fn;
  m.tp_lqs = std::move(tp_lqs);
  for (std::size_t i = 0; i < m.n_tp; ++i) m.tp_pairs.emplace_back(i, i);
  return m;
}

bool ScoreOrder(const DetectionOutcome& a, const DetectionOutcome& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.tie_key < b.tie_key;
}

std::vector<DetectionOutcome> MatchSoftOutcomes(
    const LqMatrix& lq, std::span<const double> scores,
    std::span<const std::size_t> tie_keys, double tau) {
  const std::size_t num_dets = lq.num_dets();
  if (scores.size() != num_dets) {
    throw ContractViolation("one score per detection column required");
  }
  std::vector<DetectionOutcome> outcomes(num_dets);
  for (std::size_t d = 0; d < num_dets; ++d) {
    outcomes[d].score = scores[d];
    outcomes[d].tie_key = tie_keys.empty() ? d : tie_keys[d];
    outcomes[d].det = d;
  }
  std::sort(outcomes.begin(), outcomes.end(), ScoreOrder);

  std::vector<char> taken(lq.num_gts(), 0);
  for (DetectionOutcome& out : outcomes) {
    double best = tau;
    std::optional<std::size_t> best_gt;
    for (std::size_t g = 0; g < lq.num_gts(); ++g) {
      if (taken[g]) continue;
      double v = lq(g, out.det);
      if (v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best_gt) {
      taken[*best_gt] = 1;
      out.gt = best_gt;
      out.lq = best;
    }
  }
  return outcomes;
}

MatchResult SummarizeOutcomes(std::span<const DetectionOutcome> outcomes,
                              std::size_t num_gts, double tau,
                              std::span<const std::size_t> gt_keys) {
  MatchResult m;
  m.tau = tau;
  for (const DetectionOutcome& out : outcomes) {
    if (!out.is_tp()) {
      ++m.n_fp;
      continue;
    }
    ++m.n_tp;
    m.tp_lqs.push_back(out.lq);
    m.tp_pairs.emplace_back(gt_keys.empty() ? *out.gt : gt_keys[*out.gt],
                            out.tie_key);
  }
  if (m.n_tp > num_gts) {
    throw ContractViolation("more TPs than ground truths");
  }
  m.n_fn = num_gts - m.n_tp;
  return m;
}

MatchResult MatchHard(const LqMatrix& lq, double tau,
                      std::span<const std::size_t> gt_keys,
                      std::span<const std::size_t> det_keys) {
  struct Candidate {
    double lq;
    std::size_t gt_key, det_key, gt, det;
  };
  std::vector<Candidate> candidates;
  for (std::size_t g = 0; g < lq.num_gts(); ++g) {
    for (std::size_t d = 0; d < lq.num_dets(); ++d) {
      double v = lq(g, d);
      if (v > tau) {
        candidates.push_back({v, gt_keys.empty() ? g : gt_keys[g],
                              det_keys.empty() ? d : det_keys[d], g, d});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::tie(b.lq, a.gt_key, a.det_key) <
                     std::tie(a.lq, b.gt_key, b.det_key);
            });

  MatchResult m;
  m.tau = tau;
  std::vector<char> gt_used(lq.num_gts(), 0), det_used(lq.num_dets(), 0);
  for (const Candidate& c : candidates) {
    if (gt_used[c.gt] || det_used[c.det]) continue;
    gt_used[c.gt] = det_used[c.det] = 1;
    ++m.n_tp;
    m.tp_lqs.push_back(c.lq);
    m.tp_pairs.emplace_back(c.gt_key, c.det_key);
  }
  m.n_fp = lq.num_dets() - m.n_tp;
  m.n_fn = lq.num_gts() - m.n_tp;
  return m;
}

namespace {

std::vector<std::size_t> InputIndices(std::span<const Instance> instances) {
  std::vector<std::size_t> keys(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    keys[i] = instances[i].input_index;
  }
  return keys;
}

}  // namespace

MatchResult MatchSoft(std::span<const Instance> gts,
                      std::span<const Instance> dets, const LqFunction& lq,
                      double tau) {
  std::vector<double> scores(dets.size());
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (!dets[d].score) {
      throw ContractViolation("soft matching needs scored detections");
    }
    scores[d] = *dets[d].score;
  }
  LqMatrix matrix = LqMatrix::Compute(gts, dets, lq);
  std::vector<std::size_t> gt_keys = InputIndices(gts);
  std::vector<std::size_t> det_keys = InputIndices(dets);
  auto outcomes = MatchSoftOutcomes(matrix, scores, det_keys, tau);
  return SummarizeOutcomes(outcomes, gts.size(), tau, gt_keys);
}

MatchResult MatchHard(std::span<const Instance> gts,
                      std::span<const Instance> dets, const LqFunction& lq,
                      double tau) {
  LqMatrix matrix = LqMatrix::Compute(gts, dets, lq);
  return MatchHard(matrix, tau, InputIndices(gts), InputIndices(dets));
}

std::vector<MatchGroup> GroupInstances(std::span<const Instance> gts,
                                       std::span<const Instance> dets,
                                       const LqFunction& lq) {
  using Key = std::pair<int, std::int64_t>;
  std::map<Key, std::pair<std::vector<Instance>, std::vector<Instance>>> by;
  for (const Instance& g : gts) by[{g.class_id, g.image_id}].first.push_back(g);
  for (const Instance& d : dets) {
    by[{d.class_id, d.image_id}].second.push_back(d);
  }
  std::vector<MatchGroup> groups;
  groups.reserve(by.size());
  for (auto& [key, members] : by) {
    auto& [group_gts, group_dets] = members;
    MatchGroup group;
    group.class_id = key.first;
    group.image_id = key.second;
    group.lq = LqMatrix::Compute(group_gts, group_dets, lq);
    group.gt_keys = InputIndices(group_gts);
    group.det_keys = InputIndices(group_dets);
    bool scored = !group_dets.empty();
    for (const Instance& d : group_dets) scored = scored && d.score;
    if (scored) {
      for (const Instance& d : group_dets) group.scores.push_back(*d.score);
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

namespace {

PooledOutcomes PoolSoftImpl(std::span<const MatchGroup> groups, double tau,
                            const std::function<std::size_t(std::size_t)>& cap) {
  PooledOutcomes pooled;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const MatchGroup& group = groups[i];
    pooled.num_gts += group.lq.num_gts();
    if (group.lq.num_dets() == 0) continue;
    if (group.scores.size() != group.lq.num_dets()) {
      throw ContractViolation("soft matching needs scored detections");
    }
    auto outcomes =
        MatchSoftOutcomes(group.lq, group.scores, group.det_keys, tau);
    // Greedy matching in score order is prefix-stable: the outcomes of the
    // top-k detections do not depend on the ones after them.
    outcomes.resize(std::min(outcomes.size(), cap(i)));
    for (DetectionOutcome& out : outcomes) {
      if (out.gt) out.gt = group.gt_keys[*out.gt];
      pooled.outcomes.push_back(out);
    }
  }
  std::sort(pooled.outcomes.begin(), pooled.outcomes.end(), ScoreOrder);
  return pooled;
}

}  // namespace

PooledOutcomes PoolSoft(std::span<const MatchGroup> groups, double tau,
                        std::optional<std::size_t> per_group_cap) {
  const std::size_t cap =
      per_group_cap.value_or(std::numeric_limits<std::size_t>::max());
  return PoolSoftImpl(groups, tau, [cap](std::size_t) { return cap; });
}

PooledOutcomes PoolSoft(std::span<const MatchGroup> groups, double tau,
                        std::span<const std::size_t> per_group_caps) {
  if (per_group_caps.size() != groups.size()) {
    throw ContractViolation("one cap per group expected");
  }
  return PoolSoftImpl(groups, tau,
                      [&](std::size_t i) { return per_group_caps[i]; });
}

std::vector<std::size_t> PerImageCaps(std::span<const MatchGroup> groups,
                                      std::size_t cap) {
  struct Entry {
    double score;
    std::size_t key;
    std::size_t group;
  };
  std::map<std::int64_t, std::vector<Entry>> by_image;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const MatchGroup& g = groups[i];
    if (g.scores.size() != g.lq.num_dets()) {
      throw ContractViolation("detection caps need scored detections");
    }
    auto& entries = by_image[g.image_id];
    for (std::size_t d = 0; d < g.scores.size(); ++d) {
      entries.push_back({g.scores[d], g.det_keys[d], i});
    }
  }
  std::vector<std::size_t> caps(groups.size(), 0);
  for (auto& [unused, entries] : by_image) {
    const std::size_t keep = std::min(cap, entries.size());
    std::partial_sort(entries.begin(), entries.begin() + keep, entries.end(),
                      [](const Entry& a, const Entry& b) {
                        if (a.score != b.score) return a.score > b.score;
                        return a.key < b.key;
                      });
    for (std::size_t j = 0; j < keep; ++j) ++caps[entries[j].group];
  }
  return caps;
}

MatchResult PoolHard(std::span<const MatchGroup> groups, double tau) {
  MatchResult total;
  total.tau = tau;
  for (const MatchGroup& group : groups) {
    total.Merge(MatchHard(group.lq, tau, group.gt_keys, group.det_keys));
  }
  return total;
}

void FilterSpec::Validate() const {
  if (score_threshold &&
      !(*score_threshold >= 0.0 && *score_threshold <= 1.0)) {
    throw ConfigurationError("score threshold must lie in [0,1]");
  }
  if ((max_per_image && *max_per_image < 1) ||
      (max_per_class && *max_per_class < 1)) {
    throw ConfigurationError("detection caps must be at least 1");
  }
  if (area_range && !(area_range->min < area_range->max)) {
    throw ConfigurationError("area range needs min < max");
  }
}

namespace {

// Marks the top `cap` detections of every group as kept.
template <typename KeyFn>
void KeepTopPerGroup(std::span<const Instance> dets, std::vector<char>& keep,
                     std::size_t cap, KeyFn key) {
  std::map<std::int64_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (keep[i]) groups[key(dets[i])].push_back(i);
  }
  for (auto& [unused, members] : groups) {
    if (members.size() <= cap) continue;
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) {
                if (*dets[a].score != *dets[b].score) {
                  return *dets[a].score > *dets[b].score;
                }
                return dets[a].input_index < dets[b].input_index;
              });
    for (std::size_t j = cap; j < members.size(); ++j) keep[members[j]] = 0;
  }
}

}  // namespace

std::vector<Instance> FilterDetections(std::span<const Instance> detections,
                                       const FilterSpec& spec) {
  spec.Validate();
  if (spec.IsScoreDependent()) {
    for (const Instance& d : detections) {
      if (!d.score) {
        throw ConfigurationError(
            "score threshold or detection caps require scored detections");
      }
    }
  }
  std::vector<char> keep(detections.size(), 1);
  if (spec.score_threshold) {
    for (std::size_t i = 0; i < detections.size(); ++i) {
      if (detections[i].score && *detections[i].score < *spec.score_threshold) {
        keep[i] = 0;
      }
    }
  }
  if (spec.max_per_image) {
    KeepTopPerGroup(detections, keep, *spec.max_per_image,
                    [](const Instance& d) { return d.image_id; });
  }
  if (spec.max_per_class) {
    KeepTopPerGroup(detections, keep, *spec.max_per_class,
                    [](const Instance& d) {
                      return static_cast<std::int64_t>(d.class_id);
                    });
  }
  std::vector<Instance> out;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (!keep[i]) continue;
    if (spec.area_range && !spec.area_range->Contains(detections[i].area)) {
      continue;
    }
    out.push_back(detections[i]);
  }
  return out;
}

std::vector<Instance> FilterGroundTruths(std::span<const Instance> gts,
                                         const FilterSpec& spec) {
  spec.Validate();
  std::vector<Instance> out;
  for (const Instance& g : gts) {
    if (spec.area_range && !spec.area_range->Contains(g.area)) continue;
    out.push_back(g);
  }
  return out;
}

}  // namespace detmetrics
