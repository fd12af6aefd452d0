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

#ifndef CONEKIT_IMAGING_HPP
#define CONEKIT_IMAGING_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "conekit/core.hpp"

namespace conekit {

/// 8-bit RGB, rows top to bottom, no padding.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(int w, int h, std::array<std::uint8_t, 3> fill = {0, 0, 0});

  std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  ImageDims dims() const { return {width, height}; }
  bool operator==(const RasterImage&) const = default;
};

/// PNG or JPEG, detected from the file signature. Throws DecodeError / IoError.
RasterImage read_image(const std::filesystem::path& path);
RasterImage decode_image(const std::vector<std::uint8_t>& bytes);
/// Header-only read where the codec allows it.
ImageDims read_image_dims(const std::filesystem::path& path);

void write_png(const RasterImage& img, const std::filesystem::path& path);
void write_jpeg(const RasterImage& img, const std::filesystem::path& path, int quality = 95);
/// Picks PNG or JPEG from the extension.
void write_image(const RasterImage& img, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Watermark removal

inline constexpr int kWatermarkBorder = 140;

/// Interior region after removing `border` pixels on every side.
RasterImage crop_watermark(const RasterImage& img, int border = kWatermarkBorder);

struct CroppedAnnotation {
  AnnotatedImage image;
  std::vector<std::size_t> clipped;  // indices into image.objects that were clipped
  std::size_t dropped = 0;           // objects entirely inside the border
};

/// Translates by (-border, -border), clips to the interior, drops objects left
/// without area.
CroppedAnnotation crop_annotation(const AnnotatedImage& ann, int border = kWatermarkBorder);

// ---------------------------------------------------------------------------
// Visualization

struct RenderStyle {
  int line_width = 2;
  double mask_alpha = 0.4;
  bool draw_masks = true;
};

std::array<std::uint8_t, 3> class_color(ConeClass cls);

RasterImage render_annotations(const RasterImage& img, const AnnotatedImage& ann,
                               const RenderStyle& style = {});

}  // namespace conekit

#endif  // CONEKIT_IMAGING_HPP
