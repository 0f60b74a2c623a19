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
// Comparative machinery: analytic error surfaces, the DASA reduction, and
// triangle-inequality probes on sets of disjoint masks.
#ifndef DETMETRICS_ANALYSIS_H_
#define DETMETRICS_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "detmetrics/geometry.h"
#include "detmetrics/matching.h"

namespace detmetrics {

struct SurfaceSpec {
  std::vector<double> mean_lqs;
  std::vector<std::size_t> n_tps;
  std::vector<std::size_t> n_errs;
  double tau = 0.5;
  // Fraction of the errors counted as FPs; the rest are FNs.
  double fp_share = 0.5;

  // Throws ConfigurationError for empty grids, mean lq outside (tau, 1] or
  // fp_share outside [0, 1].
  void Validate() const;
};

struct SurfaceRow {
  double mean_lq = 0.0;
  std::size_t n_tp = 0;
  std::size_t n_err = 0;
  double lrp = 0.0;
  double pr_error = 0.0;  // 1 - precision * recall
  double pq_error = 0.0;  // 1 - PQ
  double precision_error = 0.0;
  double recall_error = 0.0;
};

// Evaluates the three errors in closed form on every grid cell, with
// n_tp TPs all at lq = mean_lq. Cells with n_tp + n_err == 0 have nothing to
// evaluate and are skipped.
std::vector<SurfaceRow> ErrorSurface(const SurfaceSpec& spec);

// DASA with cut-off `cutoff`, distance 1 - lq and norm order `p`. Only p == 1
// is supported (UnsupportedError otherwise). Empty when Z == 0.
std::optional<double> DasaError(const MatchResult& match, double cutoff,
                                double p);

// A set of pairwise-disjoint masks on one grid.
struct MaskSet {
  std::vector<MaskGeom> masks;
};

struct SetTriple {
  MaskSet x, y, z;
};

// Hard matching at tau = 0.5 with mask IoU, `g` as ground truth.
MatchResult MatchMaskSets(const MaskSet& g, const MaskSet& d);
std::optional<double> LrpBetween(const MaskSet& g, const MaskSet& d);
std::optional<double> PqErrorBetween(const MaskSet& g, const MaskSet& d);

struct TriangleViolation {
  std::size_t index = 0;
  double lhs = 0.0;  // d(X, Y)
  double rhs = 0.0;  // d(X, Z) + d(Z, Y)
};

// Checks LRP(X,Y) <= LRP(X,Z) + LRP(Z,Y) on every triple. Returns the
// violations, with a 1e-12 slack for rounding.
std::vector<TriangleViolation> LrpTriangleProbe(
    std::span<const SetTriple> triples);

// True when 1-PQ(X,Y) > (1-PQ(X,Z)) + (1-PQ(Z,Y)) strictly.
bool IsPqTriangleWitness(const SetTriple& t);

// Seeded random triples of non-empty disjoint-mask sets on a
// grid_size x grid_size grid. Y and Z are mostly perturbations of X so that
// the sets overlap substantially.
std::vector<SetTriple> RandomDisjointTriples(int grid_size, std::size_t count,
                                             std::uint64_t seed);

// Seeded randomized search for a PQ-error triangle-inequality witness.
// Empty when `budget` trials find none.
std::optional<SetTriple> PqTriangleSearch(int grid_size, std::size_t budget,
                                          std::uint64_t seed);

}  // namespace detmetrics

#endif  // DETMETRICS_ANALYSIS_H_
