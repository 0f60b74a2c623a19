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
#ifndef DETMETRICS_TESTS_SUPPORT_FIXTURES_H_
#define DETMETRICS_TESTS_SUPPORT_FIXTURES_H_

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "detmetrics/analysis.h"
#include "detmetrics/ap.h"
#include "detmetrics/lrp.h"
#include "detmetrics/olrp.h"
#include "detmetrics/pq.h"
#include "json.hpp"

namespace detmetrics::fixtures {

// Pooled outcomes in ranking order from a TP/FP pattern.
inline PooledOutcomes Pattern(const std::vector<bool>& tp,
                              std::size_t num_gts) {
  PooledOutcomes p;
  p.num_gts = num_gts;
  std::size_t next_gt = 0;
  for (std::size_t i = 0; i < tp.size(); ++i) {
    DetectionOutcome out;
    out.score = 1.0 - 0.01 * static_cast<double>(i);
    out.tie_key = i;
    out.det = i;
    if (tp[i]) {
      out.gt = next_gt++;
      out.lq = 0.9;
    }
    p.outcomes.push_back(out);
  }
  return p;
}

inline Instance Box(double x1, double y1, double x2, double y2,
                    std::optional<double> score, std::size_t index) {
  Instance inst;
  inst.class_id = 1;
  BoxGeom b(x1, y1, x2, y2);
  inst.geometry = b;
  inst.area = b.area();
  inst.score = score;
  inst.input_index = index;
  return inst;
}

// The golden fixture values as computed by the library, keyed like
// tests/data/fixtures.json.
inline std::map<std::string, double> LibraryValues() {
  std::map<std::string, double> v;
  const MatchResult m = MatchResult::FromCounts(0.5, {0.75}, 1, 1);
  v["lrp_one_tp_one_fp_one_fn"] = *ComputeLrp(m, 0.5).lrp;
  v["pq_one_tp_one_fp_one_fn"] = *ComputePq(m).pq;
  v["pq_error_one_tp_one_fp_one_fn"] = *PqErrorIdentity(m);

  const std::vector<Instance> gts = {Box(0, 0, 10, 10, std::nullopt, 0),
                                     Box(20, 20, 30, 30, std::nullopt, 1)};
  const std::vector<Instance> dets = {Box(0, 0, 10, 8, 0.9, 0),
                                      Box(50, 50, 60, 60, 0.5, 1),
                                      Box(20, 20, 30, 26, 0.3, 2)};
  const SLrpCurve curve = BuildSLrpCurve(gts, dets, DefaultLqFunction(), 0.5);
  const OlrpResult o = ComputeOlrp(curve);
  v["olrp_fixture"] = *o.olrp;
  v["olrp_fixture_s_star"] = *o.s_star;
  v["olrp_fixture_loc"] = *o.loc;
  v["olrp_fixture_fp"] = *o.fp;
  v["olrp_fixture_fn"] = *o.fn;
  v["alrp_fixture"] = *ComputeAlrp(curve);
  v["lrp_fixture_all_dets"] =
      *ComputeLrp(MatchSoft(gts, dets, DefaultLqFunction(), 0.5), 0.5).lrp;

  const PrCurve env = Interpolate(BuildPrCurve(Pattern({true, false, true}, 2)));
  v["ap_exact_tp_fp_tp"] = ApExact(env);
  v["ap_101_tp_fp_tp"] = Ap101(env);

  const PrCurve sparse = BuildPrCurve(
      Pattern({true, false, false, false, false, true, true}, 5));
  v["sparse_ap_exact"] = ApExact(Interpolate(sparse));
  v["sparse_ap_101"] = Ap101(Interpolate(sparse));
  v["sparse_ap_101_raw"] = Ap101(sparse);

  SurfaceSpec spec;
  spec.mean_lqs = {0.75};
  spec.n_tps = {10};
  spec.n_errs = {10};
  const SurfaceRow row = ErrorSurface(spec).at(0);
  v["surface_lrp"] = row.lrp;
  v["surface_pq_error"] = row.pq_error;
  v["surface_pr_error"] = row.pr_error;
  return v;
}

// Reads the frozen values written by tests/oracle/derive_fixtures.py.
inline std::map<std::string, double> FrozenValues(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto root = nlohmann::json::parse(buffer.str());
  std::map<std::string, double> v;
  for (const auto& [key, entry] : root.items()) {
    v[key] = entry.at("value").get<double>();
  }
  return v;
}

}  // namespace detmetrics::fixtures

#endif  // DETMETRICS_TESTS_SUPPORT_FIXTURES_H_
