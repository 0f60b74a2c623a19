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
#include "detmetrics/analysis.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "detmetrics/errors.h"
#include "detmetrics/lrp.h"
#include "detmetrics/pq.h"

namespace detmetrics {

void SurfaceSpec::Validate() const {
  if (mean_lqs.empty() || n_tps.empty() || n_errs.empty()) {
    throw ConfigurationError("surface grids must be non-empty");
  }
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw ConfigurationError("surface tau must lie in [0,1)");
  }
  for (double m : mean_lqs) {
    if (!(m > tau && m <= 1.0)) {
      throw ConfigurationError("mean lq values must lie in (tau, 1]");
    }
  }
  if (!(fp_share >= 0.0 && fp_share <= 1.0)) {
    throw ConfigurationError("fp share must lie in [0,1]");
  }
}

std::vector<SurfaceRow> ErrorSurface(const SurfaceSpec& spec) {
  spec.Validate();
  std::vector<SurfaceRow> rows;
  for (double m : spec.mean_lqs) {
    for (std::size_t n_tp : spec.n_tps) {
      for (std::size_t n_err : spec.n_errs) {
        if (n_tp + n_err == 0) continue;
        const double tp = static_cast<double>(n_tp);
        const double err = static_cast<double>(n_err);
        const double fp = spec.fp_share * err;
        const double fn = err - fp;
        const double loc_error = tp * (1.0 - m);
        SurfaceRow row;
        row.mean_lq = m;
        row.n_tp = n_tp;
        row.n_err = n_err;
        row.lrp = (loc_error / (1.0 - spec.tau) + err) / (tp + err);
        row.pq_error = (loc_error / 0.5 + err) / (2.0 * tp + err);
        const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
        const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
        row.pr_error = 1.0 - precision * recall;
        row.precision_error = 1.0 - precision;
        row.recall_error = 1.0 - recall;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::optional<double> DasaError(const MatchResult& match, double cutoff,
                                double p) {
  if (p != 1.0) {
    throw UnsupportedError("DASA is implemented for p = 1 only");
  }
  if (!(cutoff > 0.0)) throw ConfigurationError("DASA cut-off must be > 0");
  const double z = static_cast<double>(match.n_tp + match.n_fp + match.n_fn);
  if (z == 0.0) return std::nullopt;
  // With p = 1 the l factors of the general form cancel.
  double assigned = 0.0;
  for (double lq : match.tp_lqs) {
    const double distance = 1.0 - lq;
    if (distance < cutoff) assigned += distance;
  }
  return (assigned + cutoff * static_cast<double>(match.n_fp) +
          cutoff * static_cast<double>(match.n_fn)) /
         z;
}

MatchResult MatchMaskSets(const MaskSet& g, const MaskSet& d) {
  std::vector<double> values(g.masks.size() * d.masks.size());
  for (std::size_t i = 0; i < g.masks.size(); ++i) {
    for (std::size_t j = 0; j < d.masks.size(); ++j) {
      values[i * d.masks.size() + j] = MaskIou(g.masks[i], d.masks[j]).value();
    }
  }
  return MatchHard(LqMatrix(g.masks.size(), d.masks.size(), std::move(values)),
                   kPanopticTau);
}

std::optional<double> LrpBetween(const MaskSet& g, const MaskSet& d) {
  return ComputeLrp(MatchMaskSets(g, d), kPanopticTau).lrp;
}

std::optional<double> PqErrorBetween(const MaskSet& g, const MaskSet& d) {
  auto pq = ComputePq(MatchMaskSets(g, d)).pq;
  if (!pq) return std::nullopt;
  return 1.0 - *pq;
}

std::vector<TriangleViolation> LrpTriangleProbe(
    std::span<const SetTriple> triples) {
  std::vector<TriangleViolation> violations;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const SetTriple& t = triples[i];
    auto xy = LrpBetween(t.x, t.y);
    auto xz = LrpBetween(t.x, t.z);
    auto zy = LrpBetween(t.z, t.y);
    if (!xy || !xz || !zy) continue;
    if (*xy > *xz + *zy + 1e-12) violations.push_back({i, *xy, *xz + *zy});
  }
  return violations;
}

bool IsPqTriangleWitness(const SetTriple& t) {
  auto xy = PqErrorBetween(t.x, t.y);
  auto xz = PqErrorBetween(t.x, t.z);
  auto zy = PqErrorBetween(t.z, t.y);
  if (!xy || !xz || !zy) return false;
  return *xy > *xz + *zy;
}

namespace {

// Column-major label image; 0 is void, every other label one instance.
struct LabelMap {
  int size = 0;
  std::vector<int> labels;

  int& at(int row, int col) { return labels[col * size + row]; }
  int at(int row, int col) const { return labels[col * size + row]; }
};

void PaintRect(LabelMap& map, std::mt19937_64& rng, int label) {
  std::uniform_int_distribution<int> pos(0, map.size - 1);
  std::uniform_int_distribution<int> extent(2, std::max(2, map.size / 2 + 1));
  const int r0 = pos(rng), c0 = pos(rng);
  const int h = extent(rng), w = extent(rng);
  for (int r = r0; r < std::min(map.size, r0 + h); ++r) {
    for (int c = c0; c < std::min(map.size, c0 + w); ++c) map.at(r, c) = label;
  }
}

LabelMap RandomLabelMap(int size, std::mt19937_64& rng) {
  LabelMap map{size, std::vector<int>(size * size, 0)};
  const int count = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int label = 1; label <= count; ++label) PaintRect(map, rng, label);
  return map;
}

// Shifts every instance by a small random offset (later labels win
// overlaps), then sometimes paints a fresh instance or erases one.
LabelMap Perturb(const LabelMap& base, std::mt19937_64& rng) {
  const int n = base.size;
  std::map<int, std::pair<int, int>> shift;
  std::uniform_int_distribution<int> offset(-2, 2);
  for (int label : base.labels) {
    if (label != 0 && !shift.count(label)) {
      shift[label] = {offset(rng), offset(rng)};
    }
  }
  LabelMap out{n, std::vector<int>(n * n, 0)};
  for (const auto& [label, d] : shift) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (base.at(r, c) != label) continue;
        const int rr = r + d.first, cc = c + d.second;
        if (rr >= 0 && rr < n && cc >= 0 && cc < n) out.at(rr, cc) = label;
      }
    }
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < 0.3) PaintRect(out, rng, 100);
  if (coin(rng) < 0.2 && !shift.empty()) {
    const int victim = std::next(shift.begin(),
                                 std::uniform_int_distribution<int>(
                                     0, static_cast<int>(shift.size()) - 1)(
                                     rng))
                           ->first;
    std::replace(out.labels.begin(), out.labels.end(), victim, 0);
  }
  return out;
}

MaskSet ToMaskSet(const LabelMap& map) {
  std::map<int, std::vector<std::uint8_t>> pixels;
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    const int label = map.labels[i];
    if (label == 0) continue;
    auto& buffer = pixels[label];
    if (buffer.empty()) buffer.assign(map.labels.size(), 0);
    buffer[i] = 1;
  }
  MaskSet set;
  for (const auto& [unused, buffer] : pixels) {
    set.masks.push_back(MaskGeom::FromPixels(map.size, map.size, buffer));
  }
  return set;
}

SetTriple RandomTriple(int grid_size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (;;) {
    LabelMap x = RandomLabelMap(grid_size, rng);
    LabelMap y = coin(rng) < 0.2 ? RandomLabelMap(grid_size, rng)
                                 : Perturb(x, rng);
    LabelMap z = coin(rng) < 0.2 ? RandomLabelMap(grid_size, rng)
                                 : Perturb(coin(rng) < 0.5 ? x : y, rng);
    SetTriple t{ToMaskSet(x), ToMaskSet(y), ToMaskSet(z)};
    if (!t.x.masks.empty() && !t.y.masks.empty() && !t.z.masks.empty()) {
      return t;
    }
  }
}

}  // namespace

std::vector<SetTriple> RandomDisjointTriples(int grid_size, std::size_t count,
                                             std::uint64_t seed) {
  if (grid_size < 2) throw ConfigurationError("grid size must be >= 2");
  std::mt19937_64 rng(seed);
  std::vector<SetTriple> triples;
  triples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    triples.push_back(RandomTriple(grid_size, rng));
  }
  return triples;
}

std::optional<SetTriple> PqTriangleSearch(int grid_size, std::size_t budget,
                                          std::uint64_t seed) {
  if (grid_size < 2) throw ConfigurationError("grid size must be >= 2");
  std::mt19937_64 rng(seed);
  for (std::size_t trial = 0; trial < budget; ++trial) {
    SetTriple t = RandomTriple(grid_size, rng);
    if (IsPqTriangleWitness(t)) return t;
  }
  return std::nullopt;
}

}  // namespace detmetrics
