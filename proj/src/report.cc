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
#include "detmetrics/report.h"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "detmetrics/errors.h"
#include "json.hpp"

namespace detmetrics {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json Opt(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <typename T>
ordered_json OptAny(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

// Infinite bounds have no JSON number; they travel as null.
ordered_json Bound(double v) {
  return std::isinf(v) ? ordered_json(nullptr) : ordered_json(v);
}

double ReadBound(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::infinity()
                     : v.get<double>();
}

std::optional<double> ReadOpt(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

using Field = std::optional<double> MetricValues::*;
struct NamedField {
  const char* name;
  Field field;
};

// Metric fields in output order, each tagged with the metric it belongs to.
struct MetricFields {
  const char* metric;
  std::vector<NamedField> fields;
};

const std::vector<MetricFields>& AllFields() {
  static const std::vector<MetricFields> kAll = {
      {"lrp",
       {{"lrp", &MetricValues::lrp},
        {"lrp_loc", &MetricValues::lrp_loc},
        {"lrp_fp", &MetricValues::lrp_fp},
        {"lrp_fn", &MetricValues::lrp_fn}}},
      {"lrp_weighted", {{"lrp_weighted", &MetricValues::lrp_weighted}}},
      {"olrp",
       {{"olrp", &MetricValues::olrp},
        {"olrp_loc", &MetricValues::olrp_loc},
        {"olrp_fp", &MetricValues::olrp_fp},
        {"olrp_fn", &MetricValues::olrp_fn}}},
      {"pq",
       {{"pq", &MetricValues::pq},
        {"sq", &MetricValues::sq},
        {"rq", &MetricValues::rq}}},
      {"ap",
       {{"ap", &MetricValues::ap},
        {"ap_50", &MetricValues::ap_50},
        {"ap_75", &MetricValues::ap_75},
        {"ap_50_exact", &MetricValues::ap_50_exact}}},
      {"ap_hard", {{"ap_hard", &MetricValues::ap_hard}}},
      {"ar", {{"ar", &MetricValues::ar}}},
  };
  return kAll;
}

bool Emits(const EvalConfig& cfg, const std::string& metric) {
  if (metric == "lrp") return cfg.metrics.lrp;
  if (metric == "lrp_weighted") {
    return cfg.metrics.lrp && cfg.alpha != ImportanceWeights{};
  }
  if (metric == "olrp") return cfg.metrics.olrp;
  if (metric == "pq") return cfg.metrics.pq;
  if (metric == "ap") return cfg.metrics.ap;
  if (metric == "ap_hard") return cfg.metrics.ap && cfg.hard_ap;
  if (metric == "ar") return cfg.metrics.ar;
  return false;
}

ordered_json ValuesToJson(const MetricValues& v, const EvalConfig& cfg) {
  ordered_json out = ordered_json::object();
  for (const MetricFields& group : AllFields()) {
    if (!Emits(cfg, group.metric)) continue;
    for (const NamedField& f : group.fields) out[f.name] = Opt(v.*f.field);
  }
  return out;
}

MetricValues ValuesFromJson(const json& obj) {
  MetricValues v;
  for (const MetricFields& group : AllFields()) {
    for (const NamedField& f : group.fields) v.*f.field = ReadOpt(obj, f.name);
  }
  return v;
}

ordered_json ConfigToJson(const EvalConfig& cfg) {
  ordered_json filter = {
      {"score_threshold", Opt(cfg.filter.score_threshold)},
      {"max_dets_per_image", OptAny(cfg.filter.max_per_image)},
      {"max_dets_per_class", OptAny(cfg.filter.max_per_class)},
      {"area_range", nullptr}};
  if (cfg.filter.area_range) {
    filter["area_range"] = ordered_json::array(
        {cfg.filter.area_range->min, Bound(cfg.filter.area_range->max)});
  }
  ordered_json partitions = ordered_json::array();
  for (const AreaPartition& p : cfg.area_partitions) {
    partitions.push_back(
        {{"name", p.name}, {"min", p.range.min}, {"max", Bound(p.range.max)}});
  }
  return {{"task", TaskName(cfg.task)},
          {"tau", cfg.tau},
          {"metrics", cfg.metrics.ToString()},
          {"alpha", {{"tp", cfg.alpha.tp}, {"fp", cfg.alpha.fp},
                     {"fn", cfg.alpha.fn}}},
          {"filter", filter},
          {"ar_max_dets", cfg.ar_max_dets},
          {"hard_ap", cfg.hard_ap},
          {"include_curves", cfg.include_curves},
          {"area_partitions", partitions}};
}

EvalConfig ConfigFromJson(const json& j) {
  EvalConfig cfg;
  cfg.task = ParseTask(j.at("task").get<std::string>());
  cfg.tau = j.at("tau").get<double>();
  cfg.metrics = MetricSet::Parse(j.at("metrics").get<std::string>());
  const json& a = j.at("alpha");
  cfg.alpha = {a.at("tp").get<double>(), a.at("fp").get<double>(),
               a.at("fn").get<double>()};
  const json& f = j.at("filter");
  cfg.filter.score_threshold = ReadOpt(f, "score_threshold");
  if (!f.at("max_dets_per_image").is_null()) {
    cfg.filter.max_per_image = f["max_dets_per_image"].get<std::size_t>();
  }
  if (!f.at("max_dets_per_class").is_null()) {
    cfg.filter.max_per_class = f["max_dets_per_class"].get<std::size_t>();
  }
  if (!f.at("area_range").is_null()) {
    cfg.filter.area_range =
        AreaRange{f["area_range"].at(0).get<double>(),
                  ReadBound(f["area_range"].at(1))};
  }
  cfg.ar_max_dets = j.at("ar_max_dets").get<std::size_t>();
  cfg.hard_ap = j.at("hard_ap").get<bool>();
  cfg.include_curves = j.at("include_curves").get<bool>();
  for (const json& p : j.at("area_partitions")) {
    cfg.area_partitions.push_back(
        {p.at("name").get<std::string>(),
         AreaRange{p.at("min").get<double>(), ReadBound(p.at("max"))}});
  }
  return cfg;
}

std::string Num(const std::optional<double>& v) {
  if (!v) return "";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", *v);
  return buffer;
}

std::string Num(double v) { return Num(std::optional<double>(v)); }

// Quotes a CSV field when it holds a separator, quote or newline.
std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ReportToJson(const Report& report) {
  ordered_json root;
  root["engine"] = {{"name", "detmetrics"},
                    {"version", report.engine_version}};
  root["config"] = ConfigToJson(report.config);
  ordered_json inputs = ordered_json::array();
  for (const InputDigest& d : report.inputs) {
    inputs.push_back({{"role", d.role}, {"sha256", d.sha256}});
  }
  root["inputs"] = inputs;
  root["warnings"] = report.warnings;

  ordered_json classes = ordered_json::array();
  for (const ClassRecord& r : report.classes) {
    ordered_json c = {{"class_id", r.class_id},
                      {"name", r.name},
                      {"group", OptAny(r.group)},
                      {"num_gts", r.num_gts},
                      {"num_dets", r.num_dets},
                      {"n_tp", r.n_tp},
                      {"n_fp", r.n_fp},
                      {"n_fn", r.n_fn},
                      {"metrics", ValuesToJson(r.values, report.config)}};
    if (report.config.metrics.olrp) c["s_star"] = Opt(r.s_star);
    if (report.config.include_curves) {
      ordered_json slrp = ordered_json::array();
      for (const SLrpPoint& k : r.slrp_curve) {
        slrp.push_back(ordered_json::array(
            {k.score, Opt(k.lrp), Opt(k.loc), Opt(k.fp), Opt(k.fn)}));
      }
      ordered_json pr = ordered_json::array();
      for (const PrPoint& p : r.pr_curve) {
        pr.push_back(ordered_json::array({p.recall, p.precision}));
      }
      c["curves"] = {{"slrp", slrp}, {"pr", pr}};
    }
    classes.push_back(std::move(c));
  }
  root["classes"] = classes;

  ordered_json summaries = ordered_json::array();
  for (const GroupSummary& s : report.summaries) {
    summaries.push_back({{"name", s.name},
                         {"num_classes", s.num_classes},
                         {"metrics", ValuesToJson(s.means, report.config)}});
  }
  root["summaries"] = summaries;
  return root.dump(2) + "\n";
}

Report ReportFromJson(std::string_view text) {
  try {
    const json root = json::parse(text);
    Report report;
    report.engine_version = root.at("engine").at("version").get<std::string>();
    report.config = ConfigFromJson(root.at("config"));
    for (const json& d : root.at("inputs")) {
      report.inputs.push_back(
          {d.at("role").get<std::string>(), d.at("sha256").get<std::string>()});
    }
    report.warnings = root.at("warnings").get<std::vector<std::string>>();
    for (const json& c : root.at("classes")) {
      ClassRecord r;
      r.class_id = c.at("class_id").get<int>();
      r.name = c.at("name").get<std::string>();
      if (!c.at("group").is_null()) r.group = c["group"].get<std::string>();
      r.num_gts = c.at("num_gts").get<std::size_t>();
      r.num_dets = c.at("num_dets").get<std::size_t>();
      r.n_tp = c.at("n_tp").get<std::size_t>();
      r.n_fp = c.at("n_fp").get<std::size_t>();
      r.n_fn = c.at("n_fn").get<std::size_t>();
      r.values = ValuesFromJson(c.at("metrics"));
      r.s_star = ReadOpt(c, "s_star");
      if (auto curves = c.find("curves"); curves != c.end()) {
        for (const json& k : curves->at("slrp")) {
          auto at = [&k](int i) -> std::optional<double> {
            if (k.at(i).is_null()) return std::nullopt;
            return k.at(i).get<double>();
          };
          r.slrp_curve.push_back(
              {k.at(0).get<double>(), at(1), at(2), at(3), at(4)});
        }
        for (const json& p : curves->at("pr")) {
          r.pr_curve.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
      }
      report.classes.push_back(std::move(r));
    }
    for (const json& s : root.at("summaries")) {
      report.summaries.push_back({s.at("name").get<std::string>(),
                                  s.at("num_classes").get<std::size_t>(),
                                  ValuesFromJson(s.at("metrics"))});
    }
    return report;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

std::string ReportToCsv(const Report& report) {
  std::vector<NamedField> columns;
  for (const MetricFields& group : AllFields()) {
    if (!Emits(report.config, group.metric)) continue;
    columns.insert(columns.end(), group.fields.begin(), group.fields.end());
  }
  const bool olrp = report.config.metrics.olrp;
  std::ostringstream out;
  out << "class_id,name,group,num_gts,num_dets,n_tp,n_fp,n_fn";
  for (const NamedField& f : columns) out << ',' << f.name;
  if (olrp) out << ",s_star";
  out << '\n';
  for (const ClassRecord& r : report.classes) {
    out << r.class_id << ',' << CsvField(r.name) << ','
        << r.group.value_or("") << ',' << r.num_gts << ',' << r.num_dets
        << ',' << r.n_tp << ',' << r.n_fp << ',' << r.n_fn;
    for (const NamedField& f : columns) out << ',' << Num(r.values.*f.field);
    if (olrp) out << ',' << Num(r.s_star);
    out << '\n';
  }
  for (const GroupSummary& s : report.summaries) {
    out << CsvField(s.name) << ",,," << ",,,,";
    for (const NamedField& f : columns) out << ',' << Num(s.means.*f.field);
    if (olrp) out << ',';
    out << '\n';
  }
  return out.str();
}

std::string SLrpCurvesToCsv(const Report& report) {
  std::ostringstream out;
  out << "class_id,score,lrp,loc,fp,fn\n";
  for (const ClassRecord& r : report.classes) {
    for (const SLrpPoint& k : r.slrp_curve) {
      out << r.class_id << ',' << Num(k.score) << ',' << Num(k.lrp) << ','
          << Num(k.loc) << ',' << Num(k.fp) << ',' << Num(k.fn) << '\n';
    }
  }
  return out.str();
}

std::string PrCurvesToCsv(const Report& report) {
  std::ostringstream out;
  out << "class_id,recall,precision,interpolated_precision\n";
  for (const ClassRecord& r : report.classes) {
    PrCurve raw;
    raw.points = r.pr_curve;
    const PrCurve envelope = Interpolate(raw);
    for (std::size_t i = 0; i < raw.points.size(); ++i) {
      out << r.class_id << ',' << Num(raw.points[i].recall) << ','
          << Num(raw.points[i].precision) << ','
          << Num(envelope.points[i].precision) << '\n';
    }
  }
  return out.str();
}

std::string TauSweepToCsv(const std::vector<TauSweepRow>& rows) {
  std::ostringstream out;
  out << "tau,class_id,olrp,loc,fp,fn,s_star\n";
  for (const TauSweepRow& row : rows) {
    out << Num(row.tau) << ','
        << (row.class_id < 0 ? std::string("all")
                             : std::to_string(row.class_id))
        << ',' << Num(row.olrp.olrp) << ',' << Num(row.olrp.loc) << ','
        << Num(row.olrp.fp) << ',' << Num(row.olrp.fn) << ','
        << Num(row.olrp.s_star) << '\n';
  }
  return out.str();
}

std::string SurfaceToCsv(const std::vector<SurfaceRow>& rows) {
  std::ostringstream out;
  out << "mean_lq,n_tp,n_err,lrp,pr_error,pq_error\n";
  for (const SurfaceRow& r : rows) {
    out << Num(r.mean_lq) << ',' << r.n_tp << ',' << r.n_err << ','
        << Num(r.lrp) << ',' << Num(r.pr_error) << ',' << Num(r.pq_error)
        << '\n';
  }
  return out.str();
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace detmetrics
