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
#include "detmetrics/dataset.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "detmetrics/errors.h"
#include "json.hpp"

namespace detmetrics {

using nlohmann::json;

Task ParseTask(std::string_view name) {
  if (name == "box") return Task::kBox;
  if (name == "mask") return Task::kMask;
  if (name == "keypoints") return Task::kKeypoints;
  if (name == "panoptic") return Task::kPanoptic;
  throw ConfigurationError("unknown task '" + std::string(name) +
                           "' (expected box, mask, keypoints or panoptic)");
}

std::string TaskName(Task task) {
  switch (task) {
    case Task::kBox:
      return "box";
    case Task::kMask:
      return "mask";
    case Task::kKeypoints:
      return "keypoints";
    case Task::kPanoptic:
      return "panoptic";
  }
  return "box";
}

const Category* DatasetPair::FindCategory(int id) const {
  for (const Category& c : categories) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const ImageInfo* DatasetPair::FindImage(std::int64_t id) const {
  for (const ImageInfo& im : images) {
    if (im.id == id) return &im;
  }
  return nullptr;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

namespace {

[[noreturn]] void Fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

json ParseJson(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

const json& Require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) Fail(path + "." + key, "missing field");
  return *it;
}

double Number(const json& v, const std::string& path) {
  if (!v.is_number()) Fail(path, "expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) Fail(path, "expected a finite number");
  return x;
}

std::int64_t Integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) Fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

const json& Array(const json& v, const std::string& path) {
  if (!v.is_array()) Fail(path, "expected an array");
  return v;
}

struct Lookup {
  std::unordered_map<std::int64_t, const ImageInfo*> images;
  std::unordered_map<int, const Category*> categories;

  explicit Lookup(const DatasetPair& pair) {
    for (const ImageInfo& im : pair.images) images[im.id] = &im;
    for (const Category& c : pair.categories) categories[c.id] = &c;
  }
};

BoxGeom ParseBox(const json& record, const std::string& path) {
  const std::string p = path + ".bbox";
  const json& b = Array(Require(record, "bbox", path), p);
  if (b.size() != 4) Fail(p, "expected [x, y, w, h]");
  const double x = Number(b[0], p + "[0]");
  const double y = Number(b[1], p + "[1]");
  const double w = Number(b[2], p + "[2]");
  const double h = Number(b[3], p + "[3]");
  if (!(w > 0.0)) Fail(p + "[2]", "width must be > 0");
  if (!(h > 0.0)) Fail(p + "[3]", "height must be > 0");
  return BoxGeom::FromXywh(x, y, w, h);
}

MaskGeom ParseMask(const json& record, const std::string& path,
                   const ImageInfo& image) {
  const std::string p = path + ".segmentation";
  const json& seg = Require(record, "segmentation", path);
  if (seg.is_array()) {
    throw UnsupportedError(
        p + ": polygon segmentations are not supported; supply uncompressed "
            "RLE {\"size\": [h, w], \"counts\": [...]}");
  }
  if (!seg.is_object()) Fail(p, "expected an RLE object");
  const json& size = Array(Require(seg, "size", p), p + ".size");
  if (size.size() != 2) Fail(p + ".size", "expected [height, width]");
  const std::int64_t h = Integer(size[0], p + ".size[0]");
  const std::int64_t w = Integer(size[1], p + ".size[1]");
  if (h != image.height || w != image.width) {
    Fail(p + ".size", "does not match the image size " +
                          std::to_string(image.height) + "x" +
                          std::to_string(image.width));
  }
  const json& counts = Require(seg, "counts", p);
  if (counts.is_string()) {
    throw UnsupportedError(p + ".counts: compressed RLE strings are not "
                               "supported; supply integer counts");
  }
  Array(counts, p + ".counts");
  std::vector<std::int64_t> runs;
  runs.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    runs.push_back(Integer(counts[i], p + ".counts[" + std::to_string(i) + "]"));
  }
  try {
    return DecodeRle(runs, static_cast<int>(h), static_cast<int>(w));
  } catch (const ValidationError& e) {
    Fail(p, e.what());
  }
}

KeypointSetGeom ParseKeypoints(const json& record, const std::string& path,
                               const Category& category,
                               std::optional<double> fallback_scale) {
  const std::string p = path + ".keypoints";
  const json& k = Array(Require(record, "keypoints", path), p);
  if (k.size() % 3 != 0) Fail(p, "expected [x, y, v] triplets");
  if (k.size() / 3 != category.keypoint_falloff.size()) {
    Fail(p, "category " + std::to_string(category.id) + " defines " +
                std::to_string(category.keypoint_falloff.size()) +
                " keypoints, got " + std::to_string(k.size() / 3));
  }
  std::vector<Keypoint> points;
  for (std::size_t i = 0; i < k.size(); i += 3) {
    const std::string at = p + "[" + std::to_string(i) + "]";
    points.push_back({Number(k[i], at), Number(k[i + 1], at),
                      Number(k[i + 2], at) > 0.0});
  }
  std::optional<double> scale;
  if (auto it = record.find("scale"); it != record.end()) {
    scale = Number(*it, path + ".scale");
  } else if (auto a = record.find("area"); a != record.end()) {
    scale = std::sqrt(Number(*a, path + ".area"));
  } else if (record.contains("bbox")) {
    scale = std::sqrt(ParseBox(record, path).area());
  } else {
    scale = fallback_scale;
  }
  if (!scale || !(*scale > 0.0)) {
    Fail(path, "keypoint instances need a positive scale, area or bbox");
  }
  return KeypointSetGeom(std::move(points), *scale, category.keypoint_falloff);
}

// Reads the fields shared by annotations and detection records.
Instance ParseInstance(const json& record, const std::string& path,
                       const Lookup& lookup, Task task, bool is_gt) {
  if (!record.is_object()) Fail(path, "expected an object");
  Instance inst;
  inst.image_id = Integer(Require(record, "image_id", path), path + ".image_id");
  const std::int64_t cat =
      Integer(Require(record, "category_id", path), path + ".category_id");
  auto im = lookup.images.find(inst.image_id);
  if (im == lookup.images.end()) {
    Fail(path + ".image_id",
         "unknown image id " + std::to_string(inst.image_id));
  }
  auto c = lookup.categories.find(static_cast<int>(cat));
  if (c == lookup.categories.end() || cat != static_cast<int>(cat)) {
    Fail(path + ".category_id", "unknown category id " + std::to_string(cat));
  }
  inst.class_id = static_cast<int>(cat);
  switch (task) {
    case Task::kBox:
      inst.geometry = ParseBox(record, path);
      break;
    case Task::kMask:
    case Task::kPanoptic:
      inst.geometry = ParseMask(record, path, *im->second);
      break;
    case Task::kKeypoints:
      // Detections rarely carry a scale; OKS reads the ground truth's.
      inst.geometry = ParseKeypoints(record, path, *c->second,
                                     is_gt ? std::nullopt
                                           : std::optional<double>(1.0));
      break;
  }
  if (auto a = record.find("area"); a != record.end()) {
    inst.area = Number(*a, path + ".area");
    if (inst.area < 0.0) Fail(path + ".area", "must be >= 0");
  } else if (task == Task::kKeypoints && record.contains("bbox")) {
    inst.area = ParseBox(record, path).area();
  } else {
    inst.area = GeometryArea(inst.geometry);
  }
  return inst;
}

}  // namespace

DatasetPair ParseGroundTruth(std::string_view json_text, Task task) {
  const json root = ParseJson(json_text);
  if (!root.is_object()) Fail("$", "expected an object");
  DatasetPair pair;

  const json& images = Array(Require(root, "images", "$"), "$.images");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string p = "$.images[" + std::to_string(i) + "]";
    const json& im = images[i];
    if (!im.is_object()) Fail(p, "expected an object");
    ImageInfo info;
    info.id = Integer(Require(im, "id", p), p + ".id");
    info.width = static_cast<int>(Integer(Require(im, "width", p), p + ".width"));
    info.height =
        static_cast<int>(Integer(Require(im, "height", p), p + ".height"));
    if (info.width <= 0 || info.height <= 0) {
      Fail(p, "width and height must be > 0");
    }
    if (pair.FindImage(info.id)) {
      Fail(p + ".id", "duplicate image id " + std::to_string(info.id));
    }
    pair.images.push_back(info);
  }

  const json& cats = Array(Require(root, "categories", "$"), "$.categories");
  for (std::size_t i = 0; i < cats.size(); ++i) {
    const std::string p = "$.categories[" + std::to_string(i) + "]";
    const json& c = cats[i];
    if (!c.is_object()) Fail(p, "expected an object");
    Category cat;
    cat.id = static_cast<int>(Integer(Require(c, "id", p), p + ".id"));
    if (auto n = c.find("name"); n != c.end()) {
      if (!n->is_string()) Fail(p + ".name", "expected a string");
      cat.name = n->get<std::string>();
    }
    if (auto g = c.find("group"); g != c.end()) {
      if (!g->is_string() || (*g != "things" && *g != "stuff")) {
        Fail(p + ".group", "expected \"things\" or \"stuff\"");
      }
      cat.group = g->get<std::string>();
    } else if (auto t = c.find("isthing"); t != c.end()) {
      cat.group = Integer(*t, p + ".isthing") ? "things" : "stuff";
    }
    if (auto k = c.find("keypoint_falloff"); k != c.end()) {
      Array(*k, p + ".keypoint_falloff");
      for (std::size_t j = 0; j < k->size(); ++j) {
        const std::string at = p + ".keypoint_falloff[" + std::to_string(j) + "]";
        const double kappa = Number((*k)[j], at);
        if (!(kappa > 0.0)) Fail(at, "falloff constants must be > 0");
        cat.keypoint_falloff.push_back(kappa);
      }
    }
    if (task == Task::kKeypoints && cat.keypoint_falloff.empty()) {
      Fail(p + ".keypoint_falloff", "required for the keypoints task");
    }
    if (pair.FindCategory(cat.id)) {
      Fail(p + ".id", "duplicate category id " + std::to_string(cat.id));
    }
    pair.categories.push_back(std::move(cat));
  }

  const Lookup lookup(pair);
  const json& anns = Array(Require(root, "annotations", "$"), "$.annotations");
  pair.ground_truths.reserve(anns.size());
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const std::string p = "$.annotations[" + std::to_string(i) + "]";
    try {
      Instance g = ParseInstance(anns[i], p, lookup, task, /*is_gt=*/true);
      g.input_index = i;
      pair.ground_truths.push_back(std::move(g));
    } catch (const UnsupportedError&) {
      throw;
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (what.rfind("$.", 0) == 0) throw;
      Fail(p, what);
    }
  }
  return pair;
}

DatasetPair LoadGroundTruth(const std::filesystem::path& path, Task task) {
  return ParseGroundTruth(ReadFile(path), task);
}

std::vector<Instance> ParseDetections(std::string_view json_text,
                                      const DatasetPair& gt, Task task) {
  const json root = ParseJson(json_text);
  Array(root, "$");
  const Lookup lookup(gt);
  std::vector<Instance> dets;
  dets.reserve(root.size());
  std::optional<bool> scored;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string p = "$[" + std::to_string(i) + "]";
    Instance d;
    try {
      d = ParseInstance(root[i], p, lookup, task, /*is_gt=*/false);
    } catch (const UnsupportedError&) {
      throw;
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (what.rfind("$[", 0) == 0) throw;
      Fail(p, what);
    }
    d.input_index = i;
    const auto s = root[i].find("score");
    const bool has_score = s != root[i].end() && !s->is_null();
    if (scored && *scored != has_score) {
      Fail(p, "mixed scored and unscored detections");
    }
    scored = has_score;
    if (has_score) {
      const double v = Number(*s, p + ".score");
      if (!(v >= 0.0 && v <= 1.0)) Fail(p + ".score", "must lie in [0, 1]");
      d.score = v;
    }
    dets.push_back(std::move(d));
  }
  return dets;
}

std::vector<Instance> LoadDetections(const std::filesystem::path& path,
                                     const DatasetPair& gt, Task task) {
  return ParseDetections(ReadFile(path), gt, task);
}

}  // namespace detmetrics
