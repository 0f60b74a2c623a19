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
#include "detmetrics/lrp.h"

#include <gtest/gtest.h>

#include <random>

#include "detmetrics/analysis.h"
#include "detmetrics/errors.h"
#include "support/oracle.h"

namespace detmetrics {
namespace {

TEST(LrpTest, PerfectDetector) {
  LrpResult r = ComputeLrp(MatchResult::FromCounts(0.5, {1.0, 1.0}, 0, 0), 0.5);
  EXPECT_EQ(*r.lrp, 0.0);
  EXPECT_EQ(*r.loc, 0.0);
  EXPECT_EQ(*r.fp, 0.0);
  EXPECT_EQ(*r.fn, 0.0);
}

TEST(LrpTest, NoTruePositivesIsMaximalError) {
  LrpResult r = ComputeLrp(MatchResult::FromCounts(0.5, {}, 2, 3), 0.5);
  EXPECT_DOUBLE_EQ(*r.lrp, 1.0);
  EXPECT_FALSE(r.loc.has_value());
  EXPECT_DOUBLE_EQ(*r.fp, 1.0);
  EXPECT_DOUBLE_EQ(*r.fn, 1.0);
}

TEST(LrpTest, OneOfEach) {
  LrpResult r = ComputeLrp(MatchResult::FromCounts(0.5, {0.75}, 1, 1), 0.5);
  EXPECT_NEAR(*r.lrp, 2.5 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(*r.loc, 0.25);
  EXPECT_DOUBLE_EQ(*r.fp, 0.5);
  EXPECT_DOUBLE_EQ(*r.fn, 0.5);
  EXPECT_DOUBLE_EQ(r.w_loc, 2.0);
  EXPECT_DOUBLE_EQ(r.w_fp, 2.0);
  EXPECT_DOUBLE_EQ(r.w_fn, 2.0);
  EXPECT_DOUBLE_EQ(r.z, 3.0);
}

TEST(LrpTest, UndefinedStates) {
  LrpResult empty = ComputeLrp(MatchResult::FromCounts(0.5, {}, 0, 0), 0.5);
  EXPECT_FALSE(empty.lrp.has_value());
  EXPECT_FALSE(empty.loc.has_value());
  EXPECT_FALSE(empty.fp.has_value());
  EXPECT_FALSE(empty.fn.has_value());
  // Ground truths only: fp undefined (no detections).
  LrpResult misses = ComputeLrp(MatchResult::FromCounts(0.5, {}, 0, 4), 0.5);
  EXPECT_DOUBLE_EQ(*misses.lrp, 1.0);
  EXPECT_FALSE(misses.fp.has_value());
  EXPECT_DOUBLE_EQ(*misses.fn, 1.0);
  // Detections only: fn undefined (no ground truths).
  LrpResult spurious = ComputeLrp(MatchResult::FromCounts(0.5, {}, 3, 0), 0.5);
  EXPECT_DOUBLE_EQ(*spurious.lrp, 1.0);
  EXPECT_FALSE(spurious.fn.has_value());
}

TEST(LrpTest, ContractViolations) {
  EXPECT_THROW(ComputeLrp(MatchResult::FromCounts(0.5, {0.5}, 0, 0), 0.5),
               ContractViolation);
  EXPECT_THROW(ComputeLrp(MatchResult::FromCounts(0.5, {}, 1, 0), 1.0),
               ContractViolation);
  EXPECT_THROW(ComputeLrp(MatchResult::FromCounts(0.5, {}, 1, 0), -0.1),
               ContractViolation);
}

TEST(LrpWeightedTest, Examples) {
  MatchResult m = MatchResult::FromCounts(0.5, {0.75}, 1, 1);
  EXPECT_EQ(*ComputeLrpWeighted(m, 0.5, {}), *ComputeLrp(m, 0.5).lrp);
  EXPECT_NEAR(*ComputeLrpWeighted(m, 0.5, {1, 1, 2}), 0.875, 1e-15);
  EXPECT_NEAR(*ComputeLrpWeighted(m, 0.5, {3, 3, 3}), *ComputeLrp(m, 0.5).lrp,
              1e-15);
  EXPECT_THROW(ComputeLrpWeighted(m, 0.5, {0, 1, 1}), ConfigurationError);
  EXPECT_FALSE(ComputeLrpWeighted(MatchResult::FromCounts(0.5, {}, 0, 0), 0.5,
                                  {2, 1, 1})
                   .has_value());
}

TEST(LrpPropertyTest, RangeRecombinationAndBounds) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> tau_dist(0.0, 0.95);
  for (int i = 0; i < 1000; ++i) {
    const double tau = tau_dist(rng);
    MatchResult m = oracle::RandomMatch(rng, tau);
    LrpResult r = ComputeLrp(m, tau);
    ASSERT_TRUE(r.lrp);
    EXPECT_GE(*r.lrp, 0.0);
    EXPECT_LE(*r.lrp, 1.0 + 1e-15);
    EXPECT_DOUBLE_EQ(r.z, static_cast<double>(m.n_tp + m.n_fp + m.n_fn));
    if (r.loc && r.fp && r.fn) {
      EXPECT_NEAR(*r.lrp,
                  (r.w_loc * *r.loc + r.w_fp * *r.fp + r.w_fn * *r.fn) / r.z,
                  1e-12);
    }
    if (r.fp) {  // 1 - precision
      EXPECT_GE(*r.lrp + 1e-15, *r.fp);
    }
    if (r.fn) {  // 1 - recall
      EXPECT_GE(*r.lrp + 1e-15, *r.fn);
    }
    if (m.n_tp == 0) {
      EXPECT_DOUBLE_EQ(*r.lrp, 1.0);
    }
    const bool perfect =
        m.n_fp == 0 && m.n_fn == 0 &&
        std::all_of(m.tp_lqs.begin(), m.tp_lqs.end(),
                    [](double lq) { return lq == 1.0; });
    EXPECT_EQ(*r.lrp == 0.0, perfect);
    // The brute-force definition.
    oracle::Tally t;
    t.tp = m.n_tp;
    t.fp = m.n_fp;
    t.fn = m.n_fn;
    t.lqs = m.tp_lqs;
    EXPECT_NEAR(*r.lrp, *oracle::Lrp(t, tau), 1e-12);
  }
}

TEST(LrpPropertyTest, ContinuousAtTheTpBoundary) {
  // One GT and one detection: lrp -> 1 as lq -> tau from above, and lrp is
  // 1 (one FP plus one FN) at lq <= tau.
  for (double tau : {0.1, 0.5, 0.75}) {
    const double eps = 1e-9;
    LrpResult above =
        ComputeLrp(MatchResult::FromCounts(tau, {tau + eps}, 0, 0), tau);
    LrpResult below = ComputeLrp(MatchResult::FromCounts(tau, {}, 1, 1), tau);
    EXPECT_NEAR(*above.lrp, *below.lrp, 2 * eps / (1.0 - tau));
  }
}

TEST(LrpPropertyTest, DasaReduction) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> tau_dist(0.0, 0.95);
  for (int i = 0; i < 1000; ++i) {
    const double tau = tau_dist(rng);
    MatchResult m = oracle::RandomMatch(rng, tau);
    EXPECT_NEAR(*DasaError(m, 1.0 - tau, 1.0) / (1.0 - tau),
                *ComputeLrp(m, tau).lrp, 1e-12);
  }
}

TEST(LrpPropertyTest, StrictlyDecreasingInEachTpLq) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 300; ++i) {
    MatchResult m = oracle::RandomMatch(rng, 0.5);
    if (m.n_tp == 0) continue;
    std::size_t k = i % m.n_tp;
    if (m.tp_lqs[k] >= 1.0) continue;
    MatchResult better = m;
    better.tp_lqs[k] = std::min(1.0, m.tp_lqs[k] + 0.01);
    EXPECT_LT(*ComputeLrp(better, 0.5).lrp, *ComputeLrp(m, 0.5).lrp);
  }
}

TEST(AggregateClassesTest, Examples) {
  std::map<int, LrpResult> two;
  two[1].lrp = 0.4;
  two[2].lrp = 0.6;
  EXPECT_DOUBLE_EQ(*AggregateClasses(two).lrp, 0.5);

  std::map<int, LrpResult> skip;
  skip[1].lrp = 0.4;
  skip[2].lrp = 0.6;
  skip[2].loc = 0.2;
  LrpSummary s = AggregateClasses(skip);
  EXPECT_DOUBLE_EQ(*s.lrp, 0.5);
  EXPECT_DOUBLE_EQ(*s.loc, 0.2);
  EXPECT_FALSE(s.fp.has_value());

  std::map<int, LrpResult> one;
  one[7] = ComputeLrp(MatchResult::FromCounts(0.5, {0.75}, 1, 1), 0.5);
  LrpSummary single = AggregateClasses(one);
  EXPECT_EQ(single.lrp, one[7].lrp);
  EXPECT_EQ(single.loc, one[7].loc);
  EXPECT_EQ(single.fp, one[7].fp);
  EXPECT_EQ(single.fn, one[7].fn);
  EXPECT_EQ(single.num_classes, 1u);
}

TEST(AggregateClassesTest, AllUndefinedThrows) {
  std::map<int, LrpResult> none;
  none[1] = LrpResult{};
  EXPECT_THROW(AggregateClasses(none), UndefinedError);
}

}  // namespace
}  // namespace detmetrics
