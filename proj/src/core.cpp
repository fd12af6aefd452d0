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

#include "conekit/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "conekit/error.hpp"

namespace conekit {

namespace {

constexpr std::array<std::string_view, 5> kClassLabels = {
    "blue_cone", "yellow_cone", "small_orange_cone", "large_orange_cone",
    "other_cone"};
constexpr std::array<std::string_view, 5> kClassShort = {
    "blue", "yellow", "small_orange", "large_orange", "other"};
constexpr std::array<std::string_view, 3> kTagLabels = {
    "knocked_over", "truncated", "tape_removed_or_sticker"};

bool team_char_ok(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

}  // namespace

std::string_view class_label(ConeClass cls) {
  return kClassLabels[static_cast<std::size_t>(cls)];
}

std::string_view class_short_name(ConeClass cls) {
  return kClassShort[static_cast<std::size_t>(cls)];
}

std::optional<ConeClass> class_from_label(std::string_view label) {
  for (std::size_t i = 0; i < kClassLabels.size(); ++i) {
    if (kClassLabels[i] == label) return kAllClasses[i];
  }
  return std::nullopt;
}

int class_index(ConeClass cls) { return static_cast<int>(cls); }

std::optional<ConeClass> class_from_index(int index) {
  if (index < 0 || index >= static_cast<int>(kAllClasses.size())) return std::nullopt;
  return kAllClasses[static_cast<std::size_t>(index)];
}

std::string_view tag_label(ObjectTag tag) {
  return kTagLabels[static_cast<std::size_t>(tag)];
}

std::optional<ObjectTag> tag_from_label(std::string_view label) {
  for (std::size_t i = 0; i < kTagLabels.size(); ++i) {
    if (kTagLabels[i] == label) return kAllTags[i];
  }
  return std::nullopt;
}

bool BoundingBox::is_valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min < x_max && y_min < y_max;
}

void require_valid(const BoundingBox& box, std::string_view what) {
  if (!box.is_valid()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.*s (%g, %g, %g, %g) is not a valid box",
                  static_cast<int>(what.size()), what.data(), box.x_min, box.y_min,
                  box.x_max, box.y_max);
    throw ContractError(buf);
  }
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  require_valid(a, "first box");
  require_valid(b, "second box");
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BoundingBox PolygonMask::hull() const {
  if (exterior.empty()) return {};
  BoundingBox box{exterior[0].x, exterior[0].y, exterior[0].x, exterior[0].y};
  for (const auto& p : exterior) {
    box.x_min = std::min(box.x_min, p.x);
    box.y_min = std::min(box.y_min, p.y);
    box.x_max = std::max(box.x_max, p.x);
    box.y_max = std::max(box.y_max, p.y);
  }
  return box;
}

std::optional<bool> AnnotatedImage::onboard() const {
  auto it = scene_meta.find("onboard");
  if (it == scene_meta.end()) return std::nullopt;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  return std::nullopt;
}

std::string ImageName::render() const {
  char digits[16];
  std::snprintf(digits, sizeof digits, "%05d", number);
  return team_id + "_" + digits + "." + extension;
}

std::optional<ImageName> try_parse_image_name(std::string_view s, std::string* reason) {
  auto fail = [&](const char* why) -> std::optional<ImageName> {
    if (reason) *reason = why;
    return std::nullopt;
  };
  const auto dot = s.rfind('.');
  if (dot == std::string_view::npos) return fail("missing extension");
  std::string ext(s.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext != "png" && ext != "jpg" && ext != "jpeg") {
    return fail("unsupported extension (expected png, jpg or jpeg)");
  }
  const auto stem = s.substr(0, dot);
  const auto us = stem.rfind('_');
  if (us == std::string_view::npos) return fail("missing _<5-digit-number> group");
  const auto digits = stem.substr(us + 1);
  if (digits.size() != 5 ||
      !std::all_of(digits.begin(), digits.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return fail("number must be exactly 5 digits");
  }
  const auto team = stem.substr(0, us);
  if (team.empty()) return fail("empty team id");
  if (!std::all_of(team.begin(), team.end(), team_char_ok)) {
    return fail("team id must match [a-z0-9-]+");
  }
  ImageName out;
  out.team_id = std::string(team);
  out.number = std::stoi(std::string(digits));
  out.extension = std::move(ext);
  return out;
}

ImageName parse_image_name(std::string_view s) {
  std::string reason;
  auto parsed = try_parse_image_name(s, &reason);
  if (!parsed) throw ParseError("bad image name '" + std::string(s) + "': " + reason);
  return *parsed;
}

std::string label_name_for(const ImageName& img) { return img.render() + ".json"; }

}  // namespace conekit
