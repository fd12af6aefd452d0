/* Copyright 2026 The conekit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CONEKIT_CORE_HPP
#define CONEKIT_CORE_HPP

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

/**
 * @file core.hpp
 * @brief Cone taxonomy, box geometry and the image filename protocol.
 */

namespace conekit {

enum class ConeClass { blue, yellow, small_orange, large_orange, other };

inline constexpr std::array<ConeClass, 5> kAllClasses = {
    ConeClass::blue, ConeClass::yellow, ConeClass::small_orange,
    ConeClass::large_orange, ConeClass::other};

// The four classes that count towards contribution requirements and statistics.
inline constexpr std::array<ConeClass, 4> kMainClasses = {
    ConeClass::blue, ConeClass::yellow, ConeClass::small_orange,
    ConeClass::large_orange};

enum class ObjectTag { knocked_over, truncated, tape_removed_or_sticker };

inline constexpr std::array<ObjectTag, 3> kAllTags = {
    ObjectTag::knocked_over, ObjectTag::truncated,
    ObjectTag::tape_removed_or_sticker};

/// On-disk class name, e.g. `blue_cone`.
std::string_view class_label(ConeClass cls);
/// Short name used in reports, e.g. `small_orange`.
std::string_view class_short_name(ConeClass cls);
std::optional<ConeClass> class_from_label(std::string_view label);
/// Darknet index 0..4 in `kAllClasses` order.
int class_index(ConeClass cls);
std::optional<ConeClass> class_from_index(int index);

std::string_view tag_label(ObjectTag tag);
std::optional<ObjectTag> tag_from_label(std::string_view label);

using TagSet = std::set<ObjectTag>;

struct Point {
  double x = 0;
  double y = 0;
  bool operator==(const Point&) const = default;
};

/**
 * Axis-aligned box with continuous corners in image pixels, origin top-left.
 * Area is (x_max - x_min) * (y_max - y_min). A box is valid iff both extents
 * are strictly positive and all corners are finite.
 */
struct BoundingBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool is_valid() const;

  bool operator==(const BoundingBox&) const = default;
};

/// Throws ContractError when `box` is not valid.
void require_valid(const BoundingBox& box, std::string_view what = "box");

/// Intersection over union; symmetric, 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

struct PolygonMask {
  std::vector<Point> exterior;
  std::vector<std::vector<Point>> holes;

  /// Axis-aligned hull of the exterior ring.
  BoundingBox hull() const;
  bool operator==(const PolygonMask&) const = default;
};

struct LabeledObject {
  ConeClass cls = ConeClass::other;
  BoundingBox box;
  std::optional<PolygonMask> mask;
  TagSet tags;
  // Original class string when the source used a name outside the taxonomy.
  std::optional<std::string> unmapped_class;

  bool operator==(const LabeledObject&) const = default;
};

struct ImageDims {
  int width = 0;
  int height = 0;
  bool operator==(const ImageDims&) const = default;
};

struct AnnotatedImage {
  std::string name;  // image filename, e.g. team-a_00001.png
  int width = 0;
  int height = 0;
  std::vector<LabeledObject> objects;
  std::map<std::string, std::string> scene_meta;

  ImageDims dims() const { return {width, height}; }
  /// `scene_meta["onboard"]` as a bool; nullopt when missing or not a bool.
  std::optional<bool> onboard() const;
  void set_onboard(bool value) { scene_meta["onboard"] = value ? "true" : "false"; }

  bool operator==(const AnnotatedImage&) const = default;
};

/// `<team-ID>_<5-digit-number>.<suffix>`
struct ImageName {
  std::string team_id;
  int number = 0;
  std::string extension;  // lowercase: png, jpg or jpeg

  std::string render() const;
  bool operator==(const ImageName&) const = default;
};

/// Throws ParseError naming the violated rule.
ImageName parse_image_name(std::string_view s);
std::optional<ImageName> try_parse_image_name(std::string_view s,
                                              std::string* reason = nullptr);
std::string label_name_for(const ImageName& img);

}  // namespace conekit

#endif  // CONEKIT_CORE_HPP
