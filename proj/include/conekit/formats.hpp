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

#ifndef CONEKIT_FORMATS_HPP
#define CONEKIT_FORMATS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conekit/core.hpp"

/**
 * @file formats.hpp
 * @brief Annotation parsers, writers, converters and on-disk layout checks.
 *
 * Supported formats:
 *  - supervisely_like: one JSON document per image,
 *    `{size:{width,height}, objects:[{classTitle, geometryType, points:{exterior, interior}, tags}], sceneMeta}`.
 *  - darknet_yolo: `cls cx cy w h` per line, normalized, six decimals. Tags, when
 *    present, follow the five numbers as extra tokens.
 *  - pascal_voc: XML with 1-based inclusive integer corners.
 *  - labelbox: export-style JSON with `bbox:{top,left,height,width}` (parse only).
 */

namespace conekit {

enum class FormatId { supervisely_like, darknet_yolo, pascal_voc, labelbox };

std::string_view format_name(FormatId fmt);
std::optional<FormatId> format_from_name(std::string_view name);

enum class ParseMode {
  strict,   // invalid or off-image boxes raise ValidationError
  lenient,  // keep them for sanity reporting
};

struct ParseOptions {
  std::optional<ImageDims> dims;  // required for darknet_yolo and labelbox
  std::string name;               // image filename to attach when the format has none
  ParseMode mode = ParseMode::strict;
};

struct ParsedAnnotation {
  AnnotatedImage image;
  std::vector<std::string> warnings;
};

ParsedAnnotation parse_annotation(std::string_view bytes, FormatId fmt,
                                  const ParseOptions& options = {});

/// Throws CapabilityError for labelbox and for masks outside supervisely_like.
std::string write_annotation(const AnnotatedImage& img, FormatId fmt);

/// The directed conversions offered by the toolkit.
const std::vector<std::pair<FormatId, FormatId>>& supported_conversions();

/// write_annotation(parse_annotation(src)). Throws CapabilityError for other pairs.
std::string convert(std::string_view src_bytes, FormatId src_fmt, FormatId dst_fmt,
                    std::optional<ImageDims> img_dims = {});

// ---------------------------------------------------------------------------
// Dataset layout: <root>/<team-id>/{img,ann}/...

struct LayoutOptions {
  std::string image_dir = "img";
  std::string annotation_dir = "ann";
};

enum class LayoutRule { bad_layout, bad_filename, orphan_image, orphan_annotation, duplicate_id };

std::string_view layout_rule_name(LayoutRule rule);

struct LayoutFinding {
  LayoutRule rule;
  std::string path;  // relative to root, '/'-separated
  std::string message;

  bool operator==(const LayoutFinding&) const = default;
};

struct TeamEntry {
  std::string team_id;
  std::vector<std::string> images;       // filenames in the image directory, sorted
  std::vector<std::string> annotations;  // filenames in the annotation directory, sorted
};

struct DatasetLayout {
  std::filesystem::path root;
  std::vector<TeamEntry> teams;  // sorted by team id
};

struct LayoutReport {
  DatasetLayout layout;
  std::vector<LayoutFinding> findings;  // sorted by (path, rule)
};

/// Read-only traversal. Throws IoError when `root` is missing or unreadable.
LayoutReport validate_layout(const std::filesystem::path& root,
                             const LayoutOptions& options = {});

}  // namespace conekit

#endif  // CONEKIT_FORMATS_HPP
