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
#include "detmetrics/evaluate.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "detmetrics/errors.h"
#include "detmetrics/pq.h"

namespace detmetrics {

MetricSet MetricSet::Parse(const std::string& list) {
  MetricSet m{false, false, false, false, false};
  std::stringstream in(list);
  std::string item;
  bool any = false;
  while (std::getline(in, item, ',')) {
    if (item == "lrp") {
      m.lrp = true;
    } else if (item == "olrp") {
      m.olrp = true;
    } else if (item == "pq") {
      m.pq = true;
    } else if (item == "ap") {
      m.ap = true;
    } else if (item == "ar") {
      m.ar = true;
    } else {
      throw ConfigurationError("unknown metric '" + item +
                               "' (expected lrp, olrp, pq, ap or ar)");
    }
    any = true;
  }
  if (!any) throw ConfigurationError("no metric requested");
  return m;
}

std::string MetricSet::ToString() const {
  std::string out;
  auto add = [&out](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(lrp, "lrp");
  add(olrp, "olrp");
  add(pq, "pq");
  add(ap, "ap");
  add(ar, "ar");
  return out;
}

void EvalConfig::Validate(bool detections_scored) const {
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw ConfigurationError("tau must lie in [0,1)");
  }
  filter.Validate();
  alpha.Validate();
  if (ar_max_dets < 1) {
    throw ConfigurationError("average recall needs at least one detection");
  }
  if (!(metrics.lrp || metrics.olrp || metrics.pq || metrics.ap ||
        metrics.ar)) {
    throw ConfigurationError("no metric requested");
  }
  for (const AreaPartition& p : area_partitions) {
    if (p.name.empty()) throw ConfigurationError("area partition needs a name");
    if (!(p.range.min < p.range.max)) {
      throw ConfigurationError("area partition '" + p.name +
                               "' needs min < max");
    }
  }
  if (metrics.pq && tau != 0.5) {
    throw ConfigurationError("pq validates TPs at tau = 0.5 only");
  }
  const bool soft = task != Task::kPanoptic && detections_scored;
  if (task == Task::kPanoptic && tau != 0.5) {
    throw ConfigurationError("panoptic evaluation requires tau = 0.5");
  }
  if (!soft) {
    const char* why = task == Task::kPanoptic
                          ? " is not available for panoptic (hard) predictions"
                          : " needs scored detections";
    if (metrics.olrp) throw ConfigurationError(std::string("olrp") + why);
    if (metrics.ar) throw ConfigurationError(std::string("ar") + why);
    if (metrics.ap && !hard_ap) {
      throw ConfigurationError(std::string("ap") + why +
                               " (request the single-point convention "
                               "explicitly to override)");
    }
  }
}

namespace {

bool AllScored(std::span<const Instance> dets) {
  return std::all_of(dets.begin(), dets.end(),
                     [](const Instance& d) { return d.score.has_value(); });
}

// Runs fn(0..n-1) on up to `threads` workers. Each index writes only its own
// output slot, so the result does not depend on scheduling.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn) {
  std::size_t workers =
      threads > 0 ? static_cast<std::size_t>(threads)
                  : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Filtered instances grouped by (class, image), with each category's slice.
struct Prepared {
  std::vector<MatchGroup> groups;
  // [begin, end) into `groups`, aligned with pair.categories.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::vector<std::size_t> ar_caps;
  bool soft = true;
};

Prepared Prepare(const DatasetPair& pair, const EvalConfig& cfg,
                 const FilterSpec& filter) {
  Prepared p;
  std::vector<Instance> gts = FilterGroundTruths(pair.ground_truths, filter);
  std::vector<Instance> dets = FilterDetections(pair.detections, filter);
  p.soft = cfg.task != Task::kPanoptic && AllScored(pair.detections);
  if (!p.soft) {
    // Hard predictions never carry scores into matching.
    for (Instance& d : dets) d.score.reset();
  }
  p.groups = GroupInstances(gts, dets, DefaultLqFunction());
  for (const Category& c : pair.categories) {
    auto lo = std::partition_point(
        p.groups.begin(), p.groups.end(),
        [&](const MatchGroup& g) { return g.class_id < c.id; });
    auto hi = std::partition_point(
        lo, p.groups.end(),
        [&](const MatchGroup& g) { return g.class_id <= c.id; });
    p.ranges.emplace_back(lo - p.groups.begin(), hi - p.groups.begin());
  }
  if (p.soft && cfg.metrics.ar) p.ar_caps = PerImageCaps(p.groups, cfg.ar_max_dets);
  return p;
}

void FillFromMatch(const MatchResult& match, const EvalConfig& cfg,
                   ClassRecord& r) {
  r.n_tp = match.n_tp;
  r.n_fp = match.n_fp;
  r.n_fn = match.n_fn;
  MetricValues& v = r.values;
  if (cfg.metrics.lrp) {
    LrpResult lrp = ComputeLrp(match, cfg.tau);
    v.lrp = lrp.lrp;
    v.lrp_loc = lrp.loc;
    v.lrp_fp = lrp.fp;
    v.lrp_fn = lrp.fn;
    if (cfg.alpha != ImportanceWeights{}) {
      v.lrp_weighted = ComputeLrpWeighted(match, cfg.tau, cfg.alpha);
    }
  }
  if (cfg.metrics.pq) {
    PqResult pq = ComputePq(match);
    v.pq = pq.pq;
    v.sq = pq.sq;
    v.rq = pq.rq;
  }
}

ClassRecord EvaluateClass(std::span<const MatchGroup> groups,
                          std::span<const std::size_t> ar_caps, bool soft,
                          const EvalConfig& cfg) {
  ClassRecord r;
  for (const MatchGroup& g : groups) {
    r.num_gts += g.lq.num_gts();
    r.num_dets += g.lq.num_dets();
  }
  MetricValues& v = r.values;
  if (!soft) {
    MatchResult match = PoolHard(groups, cfg.tau);
    FillFromMatch(match, cfg, r);
    if (cfg.metrics.ap && cfg.hard_ap) v.ap_hard = HardPredictionAp(match);
    return r;
  }

  PooledOutcomes pooled = PoolSoft(groups, cfg.tau);
  FillFromMatch(SummarizeOutcomes(pooled.outcomes, pooled.num_gts, cfg.tau),
                cfg, r);
  if (cfg.metrics.olrp || cfg.include_curves) {
    SLrpCurve curve = BuildSLrpCurve(pooled, cfg.tau);
    if (cfg.metrics.olrp) {
      OlrpResult o = ComputeOlrp(curve);
      v.olrp = o.olrp;
      v.olrp_loc = o.loc;
      v.olrp_fp = o.fp;
      v.olrp_fn = o.fn;
      r.s_star = o.s_star;
    }
    if (cfg.include_curves) {
      for (const SLrpKnot& k : curve.knots) {
        r.slrp_curve.push_back(
            {k.score, k.lrp.lrp, k.lrp.loc, k.lrp.fp, k.lrp.fn});
      }
    }
  }
  if (cfg.include_curves) r.pr_curve = BuildPrCurve(pooled).points;
  if (cfg.metrics.ap && pooled.num_gts > 0) {
    const auto taus = CocoTaus();
    double sum = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      PrCurve curve =
          Interpolate(taus[i] == cfg.tau ? BuildPrCurve(pooled)
                                         : BuildPrCurve(PoolSoft(groups, taus[i])));
      const double ap = Ap101(curve);
      sum += ap;
      if (i == 0) {
        v.ap_50 = ap;
        v.ap_50_exact = ApExact(curve);
      }
      if (i == 5) v.ap_75 = ap;
    }
    v.ap = sum / static_cast<double>(taus.size());
  }
  if (cfg.metrics.ar) v.ar = AverageRecall(groups, ar_caps);
  return r;
}

std::vector<ClassRecord> EvaluateAll(const DatasetPair& pair,
                                     const EvalConfig& cfg,
                                     const Prepared& p) {
  std::vector<ClassRecord> records(pair.categories.size());
  ParallelFor(records.size(), cfg.threads, [&](std::size_t i) {
    const auto [lo, hi] = p.ranges[i];
    std::span<const MatchGroup> groups(p.groups.data() + lo, hi - lo);
    std::span<const std::size_t> caps;
    if (!p.ar_caps.empty()) caps = {p.ar_caps.data() + lo, hi - lo};
    ClassRecord r = EvaluateClass(groups, caps, p.soft, cfg);
    const Category& c = pair.categories[i];
    r.class_id = c.id;
    r.name = c.name;
    r.group = c.group;
    records[i] = std::move(r);
  });
  return records;
}

template <typename Pred>
GroupSummary Summarize(const std::string& name,
                       const std::vector<ClassRecord>& records, Pred keep) {
  GroupSummary s;
  s.name = name;
  using Field = std::optional<double> MetricValues::*;
  static constexpr Field kFields[] = {
      &MetricValues::lrp,     &MetricValues::lrp_loc,
      &MetricValues::lrp_fp,  &MetricValues::lrp_fn,
      &MetricValues::lrp_weighted,
      &MetricValues::olrp,    &MetricValues::olrp_loc,
      &MetricValues::olrp_fp, &MetricValues::olrp_fn,
      &MetricValues::pq,      &MetricValues::sq,
      &MetricValues::rq,      &MetricValues::ap,
      &MetricValues::ap_50,   &MetricValues::ap_75,
      &MetricValues::ap_50_exact,
      &MetricValues::ap_hard, &MetricValues::ar};
  std::vector<const ClassRecord*> members;
  for (const ClassRecord& r : records) {
    if (keep(r)) members.push_back(&r);
  }
  s.num_classes = members.size();
  for (Field f : kFields) {
    std::vector<std::optional<double>> values;
    values.reserve(members.size());
    for (const ClassRecord* r : members) values.push_back(r->values.*f);
    s.means.*f = MeanOfDefined(values);
  }
  return s;
}

}  // namespace

Report RunEvaluate(const DatasetPair& pair, const EvalConfig& cfg) {
  cfg.Validate(AllScored(pair.detections));
  Report report;
  report.config = cfg;
  report.config.threads = EvalConfig{}.threads;
  if (cfg.task == Task::kPanoptic && !pair.detections.empty() &&
      AllScored(pair.detections)) {
    report.warnings.push_back(
        "panoptic evaluation ignores detection scores and matches hard "
        "predictions");
  }
  if (cfg.hard_ap && cfg.metrics.ap &&
      (cfg.task == Task::kPanoptic || !AllScored(pair.detections))) {
    report.warnings.push_back(
        "ap_hard uses the single-point precision x recall convention for "
        "hard predictions and is not comparable to AP of soft predictions");
  }

  const Prepared prepared = Prepare(pair, cfg, cfg.filter);
  report.classes = EvaluateAll(pair, cfg, prepared);

  report.summaries.push_back(
      Summarize("all", report.classes, [](const ClassRecord&) { return true; }));
  if (report.summaries.front().means == MetricValues{}) {
    throw UndefinedError("no class has a defined value for any metric");
  }
  for (const char* group : {"things", "stuff"}) {
    const bool present =
        std::any_of(pair.categories.begin(), pair.categories.end(),
                    [&](const Category& c) { return c.group == group; });
    if (!present) continue;
    report.summaries.push_back(
        Summarize(group, report.classes,
                  [&](const ClassRecord& r) { return r.group == group; }));
  }
  for (const AreaPartition& part : cfg.area_partitions) {
    FilterSpec filter = cfg.filter;
    filter.area_range = part.range;
    EvalConfig sub = cfg;
    sub.include_curves = false;
    const Prepared p = Prepare(pair, sub, filter);
    report.summaries.push_back(Summarize("area:" + part.name,
                                         EvaluateAll(pair, sub, p),
                                         [](const ClassRecord&) {
                                           return true;
                                         }));
  }
  return report;
}

std::vector<TauSweepRow> SweepTau(const DatasetPair& pair,
                                  const EvalConfig& cfg,
                                  const std::vector<double>& taus) {
  if (taus.empty()) throw ConfigurationError("tau grid is empty");
  EvalConfig base = cfg;
  base.metrics = MetricSet{false, true, false, false, false};
  for (double tau : taus) {
    base.tau = tau;
    base.Validate(AllScored(pair.detections));
  }
  const Prepared p = Prepare(pair, base, cfg.filter);
  std::vector<std::vector<TauSweepPoint>> per_class(pair.categories.size());
  ParallelFor(per_class.size(), cfg.threads, [&](std::size_t i) {
    const auto [lo, hi] = p.ranges[i];
    per_class[i] = TauSweep(
        std::span<const MatchGroup>(p.groups.data() + lo, hi - lo), taus);
  });
  std::vector<TauSweepRow> rows;
  for (std::size_t t = 0; t < taus.size(); ++t) {
    std::vector<std::optional<double>> olrp, loc, fp, fn;
    for (std::size_t i = 0; i < per_class.size(); ++i) {
      const OlrpResult& o = per_class[i][t].olrp;
      rows.push_back({taus[t], pair.categories[i].id, o});
      olrp.push_back(o.olrp);
      loc.push_back(o.loc);
      fp.push_back(o.fp);
      fn.push_back(o.fn);
    }
    OlrpResult mean;
    mean.olrp = MeanOfDefined(olrp);
    mean.loc = MeanOfDefined(loc);
    mean.fp = MeanOfDefined(fp);
    mean.fn = MeanOfDefined(fn);
    rows.push_back({taus[t], -1, mean});
  }
  return rows;
}

}  // namespace detmetrics
