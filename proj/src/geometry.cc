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
#include "detmetrics/geometry.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "detmetrics/errors.h"

namespace detmetrics {

LocalisationQuality::LocalisationQuality(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ContractViolation("localisation quality out of [0,1]: " +
                            std::to_string(value));
  }
}

LocalisationQuality LocalisationQuality::FromRange(double value, double lo,
                                                   double hi) {
  if (!(hi > lo)) {
    throw ContractViolation("FromRange needs hi > lo");
  }
  return LocalisationQuality((value - lo) / (hi - lo));
}

BoxGeom::BoxGeom(double x1, double y1, double x2, double y2)
    : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
  if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) ||
      !std::isfinite(y2)) {
    throw ValidationError("box coordinates must be finite");
  }
  if (!(x2 > x1) || !(y2 > y1)) {
    throw ValidationError("degenerate box: need x2 > x1 and y2 > y1");
  }
}

BoxGeom BoxGeom::FromXywh(double x, double y, double w, double h) {
  if (!(w > 0.0) || !(h > 0.0)) {
    throw ValidationError("bbox width and height must be positive");
  }
  return BoxGeom(x, y, x + w, y + h);
}

MaskGeom::MaskGeom(int height, int width, std::vector<std::uint32_t> runs)
    : height_(height), width_(width), runs_(std::move(runs)) {
  for (std::size_t i = 1; i < runs_.size(); i += 2) area_ += runs_[i];
}

MaskGeom MaskGeom::FromPixels(int height, int width,
                              std::span<const std::uint8_t> pixels) {
  if (height <= 0 || width <= 0) {
    throw ValidationError("mask grid must be non-empty");
  }
  if (pixels.size() != static_cast<std::size_t>(height) * width) {
    throw ValidationError("pixel buffer does not match mask size");
  }
  std::vector<std::uint32_t> runs;
  bool current = false;
  std::uint32_t length = 0;
  for (std::uint8_t p : pixels) {
    bool fg = p != 0;
    if (fg != current) {
      runs.push_back(length);
      length = 0;
      current = fg;
    }
    ++length;
  }
  runs.push_back(length);
  return MaskGeom(height, width, std::move(runs));
}

std::vector<std::uint8_t> MaskGeom::ToPixels() const {
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(height_) * width_);
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    pixels.insert(pixels.end(), runs_[i], static_cast<std::uint8_t>(i % 2));
  }
  return pixels;
}

bool MaskGeom::Contains(int row, int col) const {
  if (row < 0 || row >= height_ || col < 0 || col >= width_) return false;
  std::int64_t index = static_cast<std::int64_t>(col) * height_ + row;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    if (index < runs_[i]) return i % 2 == 1;
    index -= runs_[i];
  }
  return false;
}

KeypointSetGeom::KeypointSetGeom(std::vector<Keypoint> points, double scale,
                                 std::vector<double> falloff)
    : points_(std::move(points)), scale_(scale), falloff_(std::move(falloff)) {
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
    throw ValidationError("keypoint scale must be positive");
  }
  if (points_.size() != falloff_.size()) {
    throw ValidationError("keypoint count does not match falloff constants");
  }
  for (double k : falloff_) {
    if (!(k > 0.0)) throw ValidationError("falloff constants must be > 0");
  }
}

LocalisationQuality BoxIou(const BoxGeom& a, const BoxGeom& b) {
  double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (iw <= 0.0 || ih <= 0.0) return LocalisationQuality(0.0);
  double inter = iw * ih;
  double uni = a.area() + b.area() - inter;
  return LocalisationQuality(std::clamp(inter / uni, 0.0, 1.0));
}

LocalisationQuality MaskIou(const MaskGeom& a, const MaskGeom& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ValidationError("mask grids differ: " + std::to_string(a.height()) +
                          "x" + std::to_string(a.width()) + " vs " +
                          std::to_string(b.height()) + "x" +
                          std::to_string(b.width()));
  }
  if (a.empty() || b.empty()) return LocalisationQuality(0.0);

  // Walk both run sequences in lockstep, counting overlapping foreground.
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  std::size_t ia = 0, ib = 0;
  std::int64_t left_a = ra[0], left_b = rb[0];
  std::int64_t inter = 0;
  while (ia < ra.size() && ib < rb.size()) {
    std::int64_t step = std::min(left_a, left_b);
    if (ia % 2 == 1 && ib % 2 == 1) inter += step;
    left_a -= step;
    left_b -= step;
    if (left_a == 0 && ++ia < ra.size()) left_a = ra[ia];
    if (left_b == 0 && ++ib < rb.size()) left_b = rb[ib];
  }
  std::int64_t uni = a.area() + b.area() - inter;
  return LocalisationQuality(static_cast<double>(inter) /
                             static_cast<double>(uni));
}

LocalisationQuality Oks(const KeypointSetGeom& g, const KeypointSetGeom& d) {
  if (g.points().size() != d.points().size()) {
    throw ValidationError("keypoint schemas differ");
  }
  double sum = 0.0;
  int annotated = 0;
  for (std::size_t i = 0; i < g.points().size(); ++i) {
    const Keypoint& kg = g.points()[i];
    if (!kg.visible) continue;
    const Keypoint& kd = d.points()[i];
    double dx = kg.x - kd.x;
    double dy = kg.y - kd.y;
    double spread = g.scale() * g.falloff()[i];
    sum += std::exp(-(dx * dx + dy * dy) / (2.0 * spread * spread));
    ++annotated;
  }
  if (annotated == 0) {
    throw ValidationError("ground truth has no annotated keypoints");
  }
  return LocalisationQuality(std::clamp(sum / annotated, 0.0, 1.0));
}

LocalisationQuality LocalisationQualityOf(const Geometry& gt,
                                          const Geometry& det) {
  if (gt.index() != det.index()) {
    throw ValidationError("ground truth and detection geometries differ");
  }
  switch (gt.index()) {
    case 0:
      return BoxIou(std::get<BoxGeom>(gt), std::get<BoxGeom>(det));
    case 1:
      return MaskIou(std::get<MaskGeom>(gt), std::get<MaskGeom>(det));
    default:
      return Oks(std::get<KeypointSetGeom>(gt),
                 std::get<KeypointSetGeom>(det));
  }
}

MaskGeom DecodeRle(std::span<const std::int64_t> runs, int height, int width) {
  if (height <= 0 || width <= 0) {
    throw ValidationError("mask grid must be non-empty");
  }
  const std::int64_t total = static_cast<std::int64_t>(height) * width;
  std::int64_t sum = 0;
  for (std::int64_t r : runs) {
    if (r < 0) throw ValidationError("negative RLE count");
    sum += r;
  }
  if (sum != total) {
    throw ValidationError("RLE counts sum to " + std::to_string(sum) +
                          ", expected " + std::to_string(total));
  }
  // Canonicalise: a zero-length run after the first merges its neighbours.
  std::vector<std::uint32_t> canonical;
  canonical.reserve(runs.size());
  bool pending_merge = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i > 0 && runs[i] == 0) {
      pending_merge = !pending_merge;
      continue;
    }
    if (pending_merge) {
      canonical.back() += static_cast<std::uint32_t>(runs[i]);
      pending_merge = false;
    } else {
      canonical.push_back(static_cast<std::uint32_t>(runs[i]));
    }
  }
  if (canonical.empty()) canonical.push_back(0);
  return MaskGeom(height, width, std::move(canonical));
}

std::vector<std::int64_t> EncodeRle(const MaskGeom& mask) {
  return {mask.runs().begin(), mask.runs().end()};
}

double GeometryArea(const Geometry& g) {
  if (const auto* box = std::get_if<BoxGeom>(&g)) return box->area();
  if (const auto* mask = std::get_if<MaskGeom>(&g)) {
    return static_cast<double>(mask->area());
  }
  return 0.0;
}

}  // namespace detmetrics
