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
// COCO-style dataset ingestion.
//
// Ground-truth file:
//
//   {"images":      [{"id": 1, "width": 640, "height": 480}, ...],
//    "categories":  [{"id": 1, "name": "person", "group": "things",
//                     "keypoint_falloff": [0.026, ...]}, ...],
//    "annotations": [{"id": 7, "image_id": 1, "category_id": 1,
//                     "bbox": [x, y, w, h],
//                     "segmentation": {"size": [h, w], "counts": [...]},
//                     "keypoints": [x1, y1, v1, ...],
//                     "area": 123.0, "scale": 11.1}, ...]}
//
// Only the geometry field of the selected task is required. "group" may be
// replaced by the panoptic "isthing" flag. Detection file: a flat array of
// records with image_id, category_id, the task geometry and an optional
// score; either every record has a score or none does.
#ifndef DETMETRICS_DATASET_H_
#define DETMETRICS_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "detmetrics/matching.h"

namespace detmetrics {

enum class Task { kBox, kMask, kKeypoints, kPanoptic };

// Throws ConfigurationError for unknown names.
Task ParseTask(std::string_view name);
std::string TaskName(Task task);

struct Category {
  int id = 0;
  std::string name;
  // "things" or "stuff" when tagged.
  std::optional<std::string> group;
  std::vector<double> keypoint_falloff;

  friend bool operator==(const Category&, const Category&) = default;
};

struct ImageInfo {
  std::int64_t id = 0;
  int width = 0;
  int height = 0;
};

struct DatasetPair {
  std::vector<Category> categories;
  std::vector<ImageInfo> images;
  std::vector<Instance> ground_truths;
  std::vector<Instance> detections;

  const Category* FindCategory(int id) const;
  const ImageInfo* FindImage(std::int64_t id) const;
};

// Parses the ground-truth side. Throws ValidationError naming the offending
// field path for schema violations, dangling references and non-positive
// box sizes; UnsupportedError for polygon or compressed masks.
DatasetPair ParseGroundTruth(std::string_view json_text, Task task);
DatasetPair LoadGroundTruth(const std::filesystem::path& path, Task task);

// Parses detections against the images and categories of `gt`. Input
// indices follow array positions.
std::vector<Instance> ParseDetections(std::string_view json_text,
                                      const DatasetPair& gt, Task task);
std::vector<Instance> LoadDetections(const std::filesystem::path& path,
                                     const DatasetPair& gt, Task task);

// Whole-file read; throws ValidationError when the file cannot be opened.
std::string ReadFile(const std::filesystem::path& path);

}  // namespace detmetrics

#endif  // DETMETRICS_DATASET_H_
