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
// Localisation-quality functions for boxes, masks and keypoint sets. Every
// value type here is immutable once built and every function is pure.
#ifndef DETMETRICS_GEOMETRY_H_
#define DETMETRICS_GEOMETRY_H_

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace detmetrics {

// A value in [0, 1], higher is better.
class LocalisationQuality {
 public:
  // Throws ContractViolation outside [0, 1] (or for NaN).
  explicit LocalisationQuality(double value);

  // Maps a similarity with range [lo, hi] linearly onto [0, 1]. This is how
  // a similarity such as GIoU in [-1, 1] is brought into lq range.
  static LocalisationQuality FromRange(double value, double lo, double hi);

  double value() const { return value_; }

  friend bool operator==(const LocalisationQuality&,
                         const LocalisationQuality&) = default;

 private:
  double value_;
};

// Axis-aligned box in continuous image coordinates, corner form.
class BoxGeom {
 public:
  // Rejects degenerate boxes (x2 <= x1 or y2 <= y1) and non-finite values
  // with ValidationError.
  BoxGeom(double x1, double y1, double x2, double y2);

  // Converts the external [x, y, w, h] convention to corner form.
  static BoxGeom FromXywh(double x, double y, double w, double h);

  double x1() const { return x1_; }
  double y1() const { return y1_; }
  double x2() const { return x2_; }
  double y2() const { return y2_; }
  double area() const { return (x2_ - x1_) * (y2_ - y1_); }

  friend bool operator==(const BoxGeom&, const BoxGeom&) = default;

 private:
  double x1_, y1_, x2_, y2_;
};

// Binary mask stored as uncompressed, column-major run lengths. Runs
// alternate background/foreground and always start with a background run,
// which may be empty. Stored runs are canonical: no zero-length run after
// the first one.
class MaskGeom {
 public:
  // Builds from a column-major bitmap of height * width bytes (nonzero means
  // foreground).
  static MaskGeom FromPixels(int height, int width,
                             std::span<const std::uint8_t> pixels);

  int height() const { return height_; }
  int width() const { return width_; }
  const std::vector<std::uint32_t>& runs() const { return runs_; }
  std::int64_t area() const { return area_; }
  bool empty() const { return area_ == 0; }

  // Column-major bitmap, one byte per pixel.
  std::vector<std::uint8_t> ToPixels() const;
  bool Contains(int row, int col) const;

  friend bool operator==(const MaskGeom&, const MaskGeom&) = default;

 private:
  friend MaskGeom DecodeRle(std::span<const std::int64_t>, int, int);
  MaskGeom(int height, int width, std::vector<std::uint32_t> runs);

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint32_t> runs_;
  std::int64_t area_ = 0;
};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  bool visible = false;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

class KeypointSetGeom {
 public:
  // `falloff` holds one kappa per keypoint. Requires scale > 0, every
  // kappa > 0 and points.size() == falloff.size().
  KeypointSetGeom(std::vector<Keypoint> points, double scale,
                  std::vector<double> falloff);

  const std::vector<Keypoint>& points() const { return points_; }
  double scale() const { return scale_; }
  const std::vector<double>& falloff() const { return falloff_; }

  friend bool operator==(const KeypointSetGeom&,
                         const KeypointSetGeom&) = default;

 private:
  std::vector<Keypoint> points_;
  double scale_;
  std::vector<double> falloff_;
};

using Geometry = std::variant<BoxGeom, MaskGeom, KeypointSetGeom>;

LocalisationQuality BoxIou(const BoxGeom& a, const BoxGeom& b);

// Pixel IoU. Two empty masks have IoU 0. Throws ValidationError when the
// grids differ.
LocalisationQuality MaskIou(const MaskGeom& a, const MaskGeom& b);

// Object keypoint similarity of detection `d` against ground truth `g`:
// the mean over keypoints visible in `g` of exp(-d_i^2 / (2 (S k_i)^2)),
// with S and k_i taken from `g`. Throws ValidationError on schema mismatch
// or when `g` has no visible keypoint.
LocalisationQuality Oks(const KeypointSetGeom& g, const KeypointSetGeom& d);

// Dispatches on the geometry kind; mixing kinds is a ValidationError.
LocalisationQuality LocalisationQualityOf(const Geometry& gt,
                                          const Geometry& det);

// Decodes uncompressed column-major RLE. Throws ValidationError when a count
// is negative or the counts do not sum to height * width.
MaskGeom DecodeRle(std::span<const std::int64_t> runs, int height, int width);

// Canonical runs of `mask`; DecodeRle(EncodeRle(m)) == m.
std::vector<std::int64_t> EncodeRle(const MaskGeom& mask);

// Area of a geometry used by area-range filters: box area, mask pixel count,
// and 0 for keypoint sets (whose area must come from annotations).
double GeometryArea(const Geometry& g);

}  // namespace detmetrics

#endif  // DETMETRICS_GEOMETRY_H_
