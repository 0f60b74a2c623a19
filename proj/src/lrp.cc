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

#include <cmath>
#include <string>
#include <vector>

#include "detmetrics/errors.h"

namespace detmetrics {

namespace {

void CheckTau(double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw ContractViolation("tau must lie in [0,1), got " +
                            std::to_string(tau));
  }
}

double LocErrorSum(const MatchResult& match, double tau) {
  if (match.tp_lqs.size() != match.n_tp) {
    throw ContractViolation("tp_lqs must hold one value per TP");
  }
  double sum = 0.0;
  for (double lq : match.tp_lqs) {
    if (!(lq > tau) || lq > 1.0) {
      throw ContractViolation("TP localisation quality " + std::to_string(lq) +
                              " not in (tau, 1]");
    }
    sum += 1.0 - lq;
  }
  return sum;
}

}  // namespace

void ImportanceWeights::Validate() const {
  for (double w : {tp, fp, fn}) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ConfigurationError("importance weights must be positive");
    }
  }
}

LrpResult LrpFromTotals(std::size_t n_tp, double loc_error_sum,
                        std::size_t n_fp, std::size_t n_fn, double tau) {
  LrpResult r;
  r.n_tp = n_tp;
  r.n_fp = n_fp;
  r.n_fn = n_fn;
  const double num_dets = static_cast<double>(n_tp + n_fp);
  const double num_gts = static_cast<double>(n_tp + n_fn);
  r.z = static_cast<double>(n_tp + n_fp + n_fn);
  r.w_loc = static_cast<double>(n_tp) / (1.0 - tau);
  r.w_fp = num_dets;
  r.w_fn = num_gts;
  if (n_tp > 0) r.loc = loc_error_sum / static_cast<double>(n_tp);
  if (num_dets > 0) r.fp = static_cast<double>(n_fp) / num_dets;
  if (num_gts > 0) r.fn = static_cast<double>(n_fn) / num_gts;
  if (r.z > 0) {
    r.lrp = (loc_error_sum / (1.0 - tau) + static_cast<double>(n_fp) +
             static_cast<double>(n_fn)) /
            r.z;
  }
  return r;
}

LrpResult ComputeLrp(const MatchResult& match, double tau) {
  CheckTau(tau);
  return LrpFromTotals(match.n_tp, LocErrorSum(match, tau), match.n_fp,
                       match.n_fn, tau);
}

std::optional<double> ComputeLrpWeighted(const MatchResult& match, double tau,
                                         const ImportanceWeights& alpha) {
  CheckTau(tau);
  alpha.Validate();
  const double loc = LocErrorSum(match, tau);
  const double z = alpha.tp * static_cast<double>(match.n_tp) +
                   alpha.fp * static_cast<double>(match.n_fp) +
                   alpha.fn * static_cast<double>(match.n_fn);
  if (z == 0.0) return std::nullopt;
  return (alpha.tp * loc / (1.0 - tau) +
          alpha.fp * static_cast<double>(match.n_fp) +
          alpha.fn * static_cast<double>(match.n_fn)) /
         z;
}

std::optional<double> MeanOfDefined(std::span<const std::optional<double>> v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& x : v) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

LrpSummary AggregateClasses(const std::map<int, LrpResult>& per_class) {
  std::vector<std::optional<double>> lrp, loc, fp, fn;
  for (const auto& [unused, r] : per_class) {
    lrp.push_back(r.lrp);
    loc.push_back(r.loc);
    fp.push_back(r.fp);
    fn.push_back(r.fn);
  }
  LrpSummary s;
  s.lrp = MeanOfDefined(lrp);
  if (!s.lrp) throw UndefinedError("no class has a defined LRP value");
  s.loc = MeanOfDefined(loc);
  s.fp = MeanOfDefined(fp);
  s.fn = MeanOfDefined(fn);
  for (const auto& x : lrp) s.num_classes += x.has_value();
  return s;
}

}  // namespace detmetrics
