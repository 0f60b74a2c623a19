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
// Report serialization. Undefined values are written as null, never as 0
// or NaN; metrics that were not requested are omitted.
#ifndef DETMETRICS_REPORT_H_
#define DETMETRICS_REPORT_H_

#include <string>
#include <string_view>
#include <vector>

#include "detmetrics/analysis.h"
#include "detmetrics/evaluate.h"

namespace detmetrics {

// Pretty-printed JSON; doubles are written with round-trip precision.
std::string ReportToJson(const Report& report);

// Inverse of ReportToJson. Throws ValidationError on malformed input.
Report ReportFromJson(std::string_view text);

// One row per class followed by one row per summary group.
std::string ReportToCsv(const Report& report);

// class_id,score,lrp,loc,fp,fn
std::string SLrpCurvesToCsv(const Report& report);
// class_id,recall,precision,interpolated_precision
std::string PrCurvesToCsv(const Report& report);
// tau,class_id,olrp,loc,fp,fn,s_star (class_id "all" for the means)
std::string TauSweepToCsv(const std::vector<TauSweepRow>& rows);
// mean_lq,n_tp,n_err,lrp,pr_error,pq_error
std::string SurfaceToCsv(const std::vector<SurfaceRow>& rows);

// Lower-case hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

}  // namespace detmetrics

#endif  // DETMETRICS_REPORT_H_
