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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "detmetrics/errors.h"
#include "detmetrics/report.h"
#include "support/oracle.h"

namespace detmetrics {
namespace {

Instance Box(int cls, double x1, double y1, double x2, double y2,
             std::optional<double> score = std::nullopt,
             std::int64_t image = 1) {
  Instance inst;
  inst.image_id = image;
  inst.class_id = cls;
  BoxGeom b(x1, y1, x2, y2);
  inst.geometry = b;
  inst.area = b.area();
  inst.score = score;
  return inst;
}

DatasetPair Pair(std::vector<Instance> gts, std::vector<Instance> dets,
                 std::vector<int> classes = {1}) {
  DatasetPair p;
  for (int c : classes) {
    p.categories.push_back({c, "c" + std::to_string(c), std::nullopt, {}});
  }
  std::set<std::int64_t> images;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    gts[i].input_index = i;
    images.insert(gts[i].image_id);
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    dets[i].input_index = i;
    images.insert(dets[i].image_id);
  }
  for (std::int64_t id : images) p.images.push_back({id, 100, 100});
  p.ground_truths = std::move(gts);
  p.detections = std::move(dets);
  return p;
}

DatasetPair ThreeDetectionFixture() {
  return Pair({Box(1, 0, 0, 10, 10), Box(1, 20, 20, 30, 30)},
              {Box(1, 0, 0, 10, 8, 0.9), Box(1, 50, 50, 60, 60, 0.5),
               Box(1, 20, 20, 30, 26, 0.3)});
}

DatasetPair RandomPair(std::uint64_t seed, int images, int classes) {
  std::mt19937_64 rng(seed);
  auto set = oracle::RandomBoxSet(rng, images, classes, 4);
  std::vector<int> ids;
  for (int c = 1; c <= classes; ++c) ids.push_back(c);
  return Pair(set.gts, set.dets, ids);
}

TEST(EvaluateTest, PerfectPredictions) {
  DatasetPair p = Pair({Box(1, 0, 0, 10, 10), Box(1, 20, 20, 30, 30)},
                       {Box(1, 0, 0, 10, 10, 0.9), Box(1, 20, 20, 30, 30, 0.8)});
  EvalConfig cfg;
  cfg.metrics = MetricSet::Parse("lrp,olrp,pq,ap,ar");
  Report r = RunEvaluate(p, cfg);
  const MetricValues& m = r.summaries.at(0).means;
  EXPECT_EQ(r.summaries[0].name, "all");
  EXPECT_EQ(*m.lrp, 0.0);
  EXPECT_EQ(*m.olrp, 0.0);
  EXPECT_EQ(*m.pq, 1.0);
  EXPECT_EQ(*m.ap, 1.0);
  EXPECT_EQ(*m.ar, 1.0);
}

TEST(EvaluateTest, ThreeDetectionFixtureEndToEnd) {
  EvalConfig cfg;
  cfg.include_curves = true;
  Report r = RunEvaluate(ThreeDetectionFixture(), cfg);
  const ClassRecord& c = r.classes.at(0);
  EXPECT_NEAR(*c.values.olrp, 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(*c.s_star, 0.9);
  EXPECT_NEAR(*c.values.olrp_loc, 0.2, 1e-12);
  EXPECT_EQ(*c.values.olrp_fp, 0.0);
  EXPECT_EQ(*c.values.olrp_fn, 0.5);
  EXPECT_NEAR(*c.values.lrp, 2.2 / 3.0, 1e-12);
  EXPECT_EQ(c.n_tp, 2u);
  EXPECT_EQ(c.n_fp, 1u);
  EXPECT_EQ(c.slrp_curve.size(), 3u);
  EXPECT_EQ(c.pr_curve.size(), 3u);
}

TEST(EvaluateTest, ClassWithoutDataIsUndefined) {
  DatasetPair p = ThreeDetectionFixture();
  p.categories.push_back({2, "empty", std::nullopt, {}});
  Report r = RunEvaluate(p, EvalConfig{});
  ASSERT_EQ(r.classes.size(), 2u);
  EXPECT_FALSE(r.classes[1].values.lrp.has_value());
  EXPECT_FALSE(r.classes[1].values.olrp.has_value());
  EXPECT_EQ(r.summaries[0].means.olrp, r.classes[0].values.olrp);
  EXPECT_NE(ReportToJson(r).find("\"lrp\": null"), std::string::npos);
}

TEST(EvaluateTest, NothingDefinedThrows) {
  DatasetPair p = Pair({}, {});
  EXPECT_THROW(RunEvaluate(p, EvalConfig{}), UndefinedError);
}

TEST(EvaluateTest, DeterministicAcrossThreadCounts) {
  DatasetPair p = RandomPair(71, 20, 6);
  EvalConfig cfg;
  cfg.metrics = MetricSet::Parse("lrp,olrp,ap,ar");
  cfg.include_curves = true;
  Report one = RunEvaluate(p, cfg);
  for (int threads : {2, 4, 0}) {
    cfg.threads = threads;
    Report many = RunEvaluate(p, cfg);
    EXPECT_EQ(one, many);
    EXPECT_EQ(ReportToJson(one), ReportToJson(many));
  }
}

TEST(EvaluateTest, NeutralFilterLeavesResultsUnchanged) {
  DatasetPair p = RandomPair(72, 10, 3);
  EvalConfig plain;
  EvalConfig wide;
  wide.filter.score_threshold = 0.0;
  wide.filter.max_per_image = 100000;
  wide.filter.max_per_class = 100000;
  Report a = RunEvaluate(p, plain);
  Report b = RunEvaluate(p, wide);
  EXPECT_EQ(a.classes, b.classes);
  EXPECT_EQ(a.summaries, b.summaries);
}

TEST(EvaluateTest, ReportJsonRoundTrip) {
  DatasetPair p = RandomPair(73, 5, 3);
  p.categories[0].group = "things";
  p.categories[1].group = "stuff";
  EvalConfig cfg;
  cfg.metrics = MetricSet::Parse("lrp,olrp,pq,ap,ar");
  cfg.include_curves = true;
  cfg.area_partitions = {{"small", {0.0, 400.0}}};
  cfg.alpha = {1.0, 2.0, 1.0};
  Report r = RunEvaluate(p, cfg);
  r.inputs = {{"gt", Sha256Hex("a")}, {"dt", Sha256Hex("b")}};
  const std::string text = ReportToJson(r);
  Report back = ReportFromJson(text);
  EXPECT_EQ(ReportToJson(back), text);
  std::vector<std::string> names;
  for (const auto& s : r.summaries) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"all", "things", "stuff",
                                             "area:small"}));
  EXPECT_THROW(ReportFromJson("{}"), ValidationError);
}

TEST(EvaluateTest, Sha256KnownAnswer) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(EvaluateTest, HardPredictions) {
  DatasetPair p = Pair({Box(1, 0, 0, 10, 10), Box(1, 20, 20, 30, 30)},
                       {Box(1, 0, 0, 10, 8), Box(1, 50, 50, 60, 60)});
  EvalConfig cfg;
  cfg.metrics = MetricSet::Parse("lrp,pq");
  Report r = RunEvaluate(p, cfg);
  EXPECT_NEAR(*r.classes[0].values.lrp, (0.2 / 0.5 + 2.0) / 3.0, 1e-12);
  EXPECT_NEAR(*r.classes[0].values.pq, 0.8 / 2.0, 1e-12);
  cfg.metrics = MetricSet::Parse("lrp,olrp");
  EXPECT_THROW(RunEvaluate(p, cfg), ConfigurationError);
  cfg.metrics = MetricSet::Parse("lrp,ap");
  EXPECT_THROW(RunEvaluate(p, cfg), ConfigurationError);
  cfg.hard_ap = true;
  Report hard = RunEvaluate(p, cfg);
  EXPECT_NEAR(*hard.classes[0].values.ap_hard, 0.25, 1e-12);
  EXPECT_FALSE(hard.warnings.empty());
}

TEST(EvaluateTest, PanopticUsesHardMatchingAndWarnsOnScores) {
  DatasetPair p = ThreeDetectionFixture();
  EvalConfig cfg;
  cfg.task = Task::kPanoptic;
  cfg.metrics = MetricSet::Parse("lrp,pq");
  Report r = RunEvaluate(p, cfg);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_NEAR(*r.classes[0].values.pq, (0.8 + 0.6) / 2.5, 1e-12);
  cfg.tau = 0.6;
  EXPECT_THROW(RunEvaluate(p, cfg), ConfigurationError);
}

TEST(EvaluateTest, ConfigurationErrors) {
  DatasetPair p = ThreeDetectionFixture();
  EvalConfig cfg;
  cfg.tau = 1.0;
  EXPECT_THROW(RunEvaluate(p, cfg), ConfigurationError);
  cfg = EvalConfig{};
  cfg.tau = 0.7;
  cfg.metrics.pq = true;
  EXPECT_THROW(RunEvaluate(p, cfg), ConfigurationError);
  cfg = EvalConfig{};
  cfg.ar_max_dets = 0;
  cfg.metrics.ar = true;
  EXPECT_THROW(RunEvaluate(p, cfg), ConfigurationError);
  EXPECT_THROW(MetricSet::Parse("lrp,map"), ConfigurationError);
  EXPECT_THROW(MetricSet::Parse(""), ConfigurationError);
  EXPECT_EQ(MetricSet::Parse("pq,lrp").ToString(), "lrp,pq");
}

TEST(SweepTauTest, RowsAndMeans) {
  std::vector<double> taus = {0.5, 0.7};
  auto rows = SweepTau(ThreeDetectionFixture(), EvalConfig{}, taus);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_NEAR(*rows[0].olrp.olrp, 0.7, 1e-12);
  EXPECT_EQ(rows[1].class_id, -1);
  EXPECT_NEAR(*rows[2].olrp.olrp, (0.2 / 0.3 + 1.0) / 2.0, 1e-12);
  const std::string csv = TauSweepToCsv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tau,class_id,olrp,loc,fp,fn,s_star");
}

TEST(CsvTest, Headers) {
  EvalConfig cfg;
  cfg.include_curves = true;
  Report r = RunEvaluate(ThreeDetectionFixture(), cfg);
  auto head = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  EXPECT_EQ(head(SLrpCurvesToCsv(r)), "class_id,score,lrp,loc,fp,fn");
  EXPECT_EQ(head(PrCurvesToCsv(r)),
            "class_id,recall,precision,interpolated_precision");
  EXPECT_NE(ReportToCsv(r).find("olrp"), std::string::npos);
}

}  // namespace
}  // namespace detmetrics
