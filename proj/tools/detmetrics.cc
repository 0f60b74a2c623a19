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
// Command-line front end. Exit codes: 0 success, 1 invalid input or
// configuration (or nothing to evaluate), 2 internal invariant failure.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "detmetrics/analysis.h"
#include "detmetrics/dataset.h"
#include "detmetrics/errors.h"
#include "detmetrics/evaluate.h"
#include "detmetrics/lrp.h"
#include "detmetrics/pq.h"
#include "detmetrics/report.h"

namespace {

using namespace detmetrics;

constexpr int kExitInvalid = 1;
constexpr int kExitInternal = 2;

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double ParseDouble(const std::string& s, const std::string& what) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(what + ": '" + s + "' is not a number");
}

std::size_t ParseCount(const std::string& s, const std::string& what) {
  const double v = ParseDouble(s, what);
  if (!(v >= 0.0) || v != std::floor(v) || std::isinf(v)) {
    throw ValidationError(what + ": '" + s + "' is not a count");
  }
  return static_cast<std::size_t>(v);
}

// "a:b:step" inclusive of b (up to rounding); values snapped to 1e-12.
std::vector<double> ParseRealGrid(const std::string& s,
                                  const std::string& what) {
  auto parts = Split(s, ':');
  if (parts.size() == 1) return {ParseDouble(parts[0], what)};
  if (parts.size() != 3) throw ValidationError(what + ": expected a:b:step");
  const double a = ParseDouble(parts[0], what);
  const double b = ParseDouble(parts[1], what);
  const double step = ParseDouble(parts[2], what);
  if (!(step > 0.0) || !(b >= a)) {
    throw ValidationError(what + ": need step > 0 and b >= a");
  }
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
  std::vector<double> out;
  for (std::size_t i = 0; i <= n; ++i) {
    out.push_back(std::round((a + i * step) * 1e12) / 1e12);
  }
  return out;
}

// "a:b" inclusive integer range, or a single count.
std::vector<std::size_t> ParseCountRange(const std::string& s,
                                         const std::string& what) {
  auto parts = Split(s, ':');
  if (parts.size() == 1) return {ParseCount(parts[0], what)};
  if (parts.size() != 2) throw ValidationError(what + ": expected a:b");
  const std::size_t a = ParseCount(parts[0], what);
  const std::size_t b = ParseCount(parts[1], what);
  if (b < a) throw ValidationError(what + ": need b >= a");
  std::vector<std::size_t> out;
  for (std::size_t v = a; v <= b; ++v) out.push_back(v);
  return out;
}

AreaRange ParseAreaRange(const std::string& s) {
  auto parts = Split(s, ':');
  if (parts.size() != 2) throw ValidationError("--area-range: expected MIN:MAX");
  return {ParseDouble(parts[0], "--area-range"),
          ParseDouble(parts[1], "--area-range")};
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

// Options shared by every command that evaluates a dataset.
struct DataOptions {
  std::string gt, dt, task = "box";
  double tau = kDefaultTau;
  std::optional<double> score_threshold;
  std::optional<std::size_t> max_per_image, max_per_class;
  std::string area_range;
  std::string metrics;
  std::string alpha;
  std::size_t ar_max_dets = 100;
  bool hard_ap = false;
  std::string area_partitions;
  int threads = 1;

  void Register(CLI::App* app, bool evaluation_options) {
    app->add_option("--gt", gt, "Ground-truth JSON")->required();
    app->add_option("--dt", dt, "Detections JSON")->required();
    app->add_option("--task", task, "box|mask|keypoints|panoptic");
    app->add_option("--score-threshold", score_threshold,
                    "Keep detections with score >= s");
    app->add_option("--max-dets-per-image", max_per_image);
    app->add_option("--max-dets-per-class", max_per_class);
    app->add_option("--area-range", area_range, "MIN:MAX, MAX may be inf");
    app->add_option("--threads", threads, "Worker threads, 0 = all cores");
    if (!evaluation_options) return;
    app->add_option("--tau", tau, "TP validation threshold");
    app->add_option("--metrics", metrics, "Subset of lrp,olrp,pq,ap,ar");
    app->add_option("--alpha", alpha, "Importance weights TP,FP,FN");
    app->add_option("--ar-max-dets", ar_max_dets,
                    "Top detections per image for ar");
    app->add_flag("--hard-ap", hard_ap,
                  "Single-point AP for hard predictions");
    app->add_option("--area-partitions", area_partitions,
                    "name:MIN:MAX,... extra summaries");
  }

  EvalConfig ToConfig() const {
    EvalConfig cfg;
    cfg.task = ParseTask(task);
    cfg.tau = tau;
    cfg.filter.score_threshold = score_threshold;
    cfg.filter.max_per_image = max_per_image;
    cfg.filter.max_per_class = max_per_class;
    if (!area_range.empty()) cfg.filter.area_range = ParseAreaRange(area_range);
    if (!metrics.empty()) {
      cfg.metrics = MetricSet::Parse(metrics);
    } else if (cfg.task == Task::kPanoptic) {
      cfg.metrics = MetricSet{true, false, true, false, false};
    }
    if (!alpha.empty()) {
      auto parts = Split(alpha, ',');
      if (parts.size() != 3) throw ValidationError("--alpha: expected TP,FP,FN");
      cfg.alpha = {ParseDouble(parts[0], "--alpha"),
                   ParseDouble(parts[1], "--alpha"),
                   ParseDouble(parts[2], "--alpha")};
    }
    cfg.ar_max_dets = ar_max_dets;
    cfg.hard_ap = hard_ap;
    if (!area_partitions.empty()) {
      for (const std::string& item : Split(area_partitions, ',')) {
        auto parts = Split(item, ':');
        if (parts.size() != 3) {
          throw ValidationError("--area-partitions: expected name:MIN:MAX");
        }
        cfg.area_partitions.push_back(
            {parts[0], {ParseDouble(parts[1], "--area-partitions"),
                        ParseDouble(parts[2], "--area-partitions")}});
      }
    }
    cfg.threads = threads;
    return cfg;
  }
};

struct Loaded {
  DatasetPair pair;
  std::vector<InputDigest> digests;
};

Loaded Load(const DataOptions& opts, Task task) {
  Loaded l;
  const std::string gt_text = ReadFile(opts.gt);
  const std::string dt_text = ReadFile(opts.dt);
  l.pair = ParseGroundTruth(gt_text, task);
  l.pair.detections = ParseDetections(dt_text, l.pair, task);
  l.digests = {{"gt", Sha256Hex(gt_text)}, {"dt", Sha256Hex(dt_text)}};
  return l;
}

// Random match configurations for the algebraic probes.
MatchResult RandomMatch(std::mt19937_64& rng, double tau) {
  std::uniform_int_distribution<int> count(0, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> lqs(count(rng));
  for (double& lq : lqs) {
    lq = std::nextafter(tau, 2.0) + unit(rng) * (1.0 - tau);
    lq = std::min(lq, 1.0);
  }
  std::size_t n_fp = count(rng), n_fn = count(rng);
  if (lqs.empty() && n_fp == 0 && n_fn == 0) n_fn = 1;
  return MatchResult::FromCounts(tau, std::move(lqs), n_fp, n_fn);
}

int RunProbe(const std::string& check, std::uint64_t seed,
             std::size_t trials) {
  if (check == "pq-triangle") {
    auto witness = PqTriangleSearch(8, trials, seed);
    if (!witness) {
      std::cout << "pq-triangle: no witness within " << trials << " trials\n";
      return kExitInternal;
    }
    const double xy = *PqErrorBetween(witness->x, witness->y);
    const double xz = *PqErrorBetween(witness->x, witness->z);
    const double zy = *PqErrorBetween(witness->z, witness->y);
    std::cout << "pq-triangle: witness 1-PQ(X,Y)=" << xy << " > "
              << "1-PQ(X,Z)+1-PQ(Z,Y)=" << xz + zy << " (|X|="
              << witness->x.masks.size() << ", |Y|=" << witness->y.masks.size()
              << ", |Z|=" << witness->z.masks.size() << ")\n";
    const SetTriple t[] = {*witness};
    const bool lrp_ok = LrpTriangleProbe(t).empty();
    std::cout << "lrp on the same triple: "
              << (lrp_ok ? "triangle inequality holds" : "violated") << "\n";
    return lrp_ok ? 0 : kExitInternal;
  }
  if (check == "lrp-triangle") {
    auto triples = RandomDisjointTriples(16, trials, seed);
    auto violations = LrpTriangleProbe(triples);
    std::cout << "lrp-triangle: " << violations.size() << " violations over "
              << triples.size() << " triples\n";
    for (const TriangleViolation& v : violations) {
      std::cout << "  triple " << v.index << ": " << v.lhs << " > " << v.rhs
                << "\n";
    }
    return violations.empty() ? 0 : kExitInternal;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tau_dist(0.0, 0.95);
  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    if (check == "dasa") {
      const double tau = tau_dist(rng);
      MatchResult m = RandomMatch(rng, tau);
      const double dasa = *DasaError(m, 1.0 - tau, 1.0) / (1.0 - tau);
      worst = std::max(worst, std::abs(dasa - *ComputeLrp(m, tau).lrp));
    } else if (check == "identity") {
      MatchResult m = RandomMatch(rng, kPanopticTau);
      worst = std::max(worst, std::abs((1.0 - *ComputePq(m).pq) -
                                       *PqErrorIdentity(m)));
    } else {
      throw ConfigurationError("unknown check '" + check + "'");
    }
  }
  const bool ok = worst <= 1e-12;
  std::cout << check << ": max deviation " << worst << " over " << trials
            << " configurations (" << (ok ? "pass" : "FAIL") << ")\n";
  return ok ? 0 : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection evaluation: LRP, oLRP, PQ and AP"};
  app.require_subcommand(1);

  DataOptions eval_opts;
  std::string output_format = "json", eval_out;
  bool curves = false;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate detections");
  eval_opts.Register(evaluate, true);
  evaluate->add_option("--output", output_format, "json|csv");
  evaluate->add_option("--out", eval_out, "Output path (default stdout)");
  evaluate->add_flag("--curves", curves, "Include s-LRP and PR curves");

  DataOptions curve_opts;
  std::string kind = "slrp", curve_out;
  CLI::App* curve = app.add_subcommand("curve", "Export s-LRP or PR curves");
  curve_opts.Register(curve, false);
  curve->add_option("--tau", curve_opts.tau, "TP validation threshold");
  curve->add_option("--kind", kind, "slrp|pr");
  curve->add_option("--out", curve_out, "CSV path (default stdout)");

  DataOptions sweep_opts;
  std::string taus = "0.5:0.95:0.05", sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep-tau", "oLRP over a tau grid");
  sweep_opts.Register(sweep, false);
  sweep->add_option("--taus", taus, "a:b:step");
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

  std::string mean_lq = "0.55:1.0:0.05", n_tp = "1:20", n_err = "0:20",
              surface_out;
  double surface_tau = 0.5, fp_share = 0.5;
  CLI::App* surface = app.add_subcommand("surface", "Analytic error surface");
  surface->add_option("--mean-lq", mean_lq, "a:b:step");
  surface->add_option("--n-tp", n_tp, "a:b");
  surface->add_option("--n-err", n_err, "a:b");
  surface->add_option("--tau", surface_tau);
  surface->add_option("--fp-share", fp_share, "Fraction of errors that are FPs");
  surface->add_option("--out", surface_out, "CSV path (default stdout)");

  std::string check;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  CLI::App* probe = app.add_subcommand("probe", "Property probes");
  probe->add_option("--check", check, "pq-triangle|lrp-triangle|dasa|identity")
      ->required();
  probe->add_option("--seed", seed);
  probe->add_option("--trials", trials);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*evaluate) {
      EvalConfig cfg = eval_opts.ToConfig();
      cfg.include_curves = curves;
      Loaded l = Load(eval_opts, cfg.task);
      Report report = RunEvaluate(l.pair, cfg);
      report.inputs = l.digests;
      if (output_format == "json") {
        WriteOutput(eval_out, ReportToJson(report));
      } else if (output_format == "csv") {
        WriteOutput(eval_out, ReportToCsv(report));
      } else {
        throw ConfigurationError("--output must be json or csv");
      }
    } else if (*curve) {
      EvalConfig cfg = curve_opts.ToConfig();
      if (kind == "slrp") {
        cfg.metrics = MetricSet{false, true, false, false, false};
      } else if (kind == "pr") {
        cfg.metrics = MetricSet{false, false, false, true, false};
      } else {
        throw ConfigurationError("--kind must be slrp or pr");
      }
      cfg.include_curves = true;
      Loaded l = Load(curve_opts, cfg.task);
      Report report = RunEvaluate(l.pair, cfg);
      WriteOutput(curve_out, kind == "slrp" ? SLrpCurvesToCsv(report)
                                            : PrCurvesToCsv(report));
    } else if (*sweep) {
      EvalConfig cfg = sweep_opts.ToConfig();
      Loaded l = Load(sweep_opts, cfg.task);
      WriteOutput(sweep_out, TauSweepToCsv(SweepTau(
                                 l.pair, cfg, ParseRealGrid(taus, "--taus"))));
    } else if (*surface) {
      SurfaceSpec spec;
      spec.mean_lqs = ParseRealGrid(mean_lq, "--mean-lq");
      spec.n_tps = ParseCountRange(n_tp, "--n-tp");
      spec.n_errs = ParseCountRange(n_err, "--n-err");
      spec.tau = surface_tau;
      spec.fp_share = fp_share;
      WriteOutput(surface_out, SurfaceToCsv(ErrorSurface(spec)));
    } else if (*probe) {
      if (trials == 0) trials = check == "pq-triangle" ? 10000
                                : check == "lrp-triangle" ? 500
                                                          : 1000;
      return RunProbe(check, seed, trials);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const UndefinedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
