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

#include "conekit/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "conekit/error.hpp"

namespace conekit {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_png(const std::vector<std::uint8_t>& bytes) {
  static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

bool is_jpeg(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff;
}

RasterImage decode_png(const std::vector<std::uint8_t>& bytes, bool header_only) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw DecodeError(std::string("PNG: ") + image.message);
  }
  RasterImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  if (header_only) {
    png_image_free(&image);
    return out;
  }
  image.format = PNG_FORMAT_RGB;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    throw DecodeError(std::string("PNG: ") + image.message);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, mgr->message);
  std::longjmp(mgr->jump, 1);
}

RasterImage decode_jpeg(const std::vector<std::uint8_t>& bytes, bool header_only) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  RasterImage out;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError(std::string("JPEG: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  out.width = static_cast<int>(cinfo.image_width);
  out.height = static_cast<int>(cinfo.image_height);
  if (header_only) {
    jpeg_destroy_decompress(&cinfo);
    return out;
  }
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

RasterImage decode(const std::vector<std::uint8_t>& bytes, bool header_only) {
  if (is_png(bytes)) return decode_png(bytes, header_only);
  if (is_jpeg(bytes)) return decode_jpeg(bytes, header_only);
  throw DecodeError("unrecognized image signature (expected PNG or JPEG)");
}

void fill_span(RasterImage& img, int y, int x0, int x1, const std::array<std::uint8_t, 3>& color,
               double alpha) {
  for (int x = x0; x <= x1; ++x) {
    auto* px = img.at(x, y);
    for (int c = 0; c < 3; ++c) {
      px[c] = static_cast<std::uint8_t>(std::lround(px[c] * (1.0 - alpha) + color[c] * alpha));
    }
  }
}

// Even-odd fill over all rings, sampling pixel centres.
void fill_polygon(RasterImage& img, const PolygonMask& mask,
                  const std::array<std::uint8_t, 3>& color, double alpha) {
  std::vector<const std::vector<Point>*> rings{&mask.exterior};
  for (const auto& h : mask.holes) rings.push_back(&h);
  const BoundingBox hull = mask.hull();
  const int y_begin = std::max(0, static_cast<int>(std::floor(hull.y_min)));
  const int y_end = std::min(img.height - 1, static_cast<int>(std::ceil(hull.y_max)));
  std::vector<double> xs;
  for (int y = y_begin; y <= y_end; ++y) {
    const double yc = y + 0.5;
    xs.clear();
    for (const auto* ring : rings) {
      const std::size_t n = ring->size();
      for (std::size_t i = 0; i < n; ++i) {
        const Point& a = (*ring)[i];
        const Point& b = (*ring)[(i + 1) % n];
        if ((a.y <= yc) != (b.y <= yc)) {
          xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
        }
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      // pixel x is inside when xs[i] <= x + 0.5 < xs[i+1]
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
      const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(xs[i + 1] - 0.5)) - 1);
      if (x0 <= x1) fill_span(img, y, x0, x1, color, alpha);
    }
  }
}

void draw_outline(RasterImage& img, const BoundingBox& box, int line_width,
                  const std::array<std::uint8_t, 3>& color) {
  const int x0 = std::max(0, static_cast<int>(std::floor(box.x_min)));
  const int y0 = std::max(0, static_cast<int>(std::floor(box.y_min)));
  const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(box.x_max)) - 1);
  const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(box.y_max)) - 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (x < x0 + line_width || x > x1 - line_width || y < y0 + line_width ||
          y > y1 - line_width) {
        auto* px = img.at(x, y);
        px[0] = color[0];
        px[1] = color[1];
        px[2] = color[2];
      }
    }
  }
}

}  // namespace

RasterImage::RasterImage(int w, int h, std::array<std::uint8_t, 3> fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

RasterImage decode_image(const std::vector<std::uint8_t>& bytes) { return decode(bytes, false); }

RasterImage read_image(const std::filesystem::path& path) {
  try {
    return decode(read_file(path), false);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

ImageDims read_image_dims(const std::filesystem::path& path) {
  try {
    return decode(read_file(path), true).dims();
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

void write_png(const RasterImage& img, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.pixels.data(), 0,
                               nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

void write_jpeg(const RasterImage& img, const std::filesystem::path& path, int quality) {
  std::unique_ptr<std::FILE, decltype(&std::fclose)> file(std::fopen(path.string().c_str(), "wb"),
                                                          &std::fclose);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    throw IoError(std::string("JPEG encode: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, file.get());
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPROW>(img.pixels.data() +
                                     static_cast<std::size_t>(cinfo.next_scanline) * img.width * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

void write_image(const RasterImage& img, const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".jpg" || ext == ".jpeg") {
    write_jpeg(img, path);
  } else {
    write_png(img, path);
  }
}

RasterImage crop_watermark(const RasterImage& img, int border) {
  if (border < 0) throw ContractError("crop border must be non-negative");
  if (img.width <= 2 * border || img.height <= 2 * border) {
    throw ContractError("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                        " too small for a " + std::to_string(border) +
                        " px border; minimum is " + std::to_string(2 * border + 1) + "x" +
                        std::to_string(2 * border + 1));
  }
  RasterImage out;
  out.width = img.width - 2 * border;
  out.height = img.height - 2 * border;
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  const std::size_t row_bytes = static_cast<std::size_t>(out.width) * 3;
  for (int y = 0; y < out.height; ++y) {
    std::memcpy(out.at(0, y), img.at(border, y + border), row_bytes);
  }
  return out;
}

CroppedAnnotation crop_annotation(const AnnotatedImage& ann, int border) {
  if (border < 0) throw ContractError("crop border must be non-negative");
  if (ann.width <= 2 * border || ann.height <= 2 * border) {
    throw ContractError("annotation size " + std::to_string(ann.width) + "x" +
                        std::to_string(ann.height) + " too small for a " +
                        std::to_string(border) + " px border");
  }
  CroppedAnnotation out;
  out.image.name = ann.name;
  out.image.scene_meta = ann.scene_meta;
  out.image.width = ann.width - 2 * border;
  out.image.height = ann.height - 2 * border;
  const double w = out.image.width, h = out.image.height;
  for (const auto& obj : ann.objects) {
    LabeledObject moved = obj;
    const BoundingBox shifted{obj.box.x_min - border, obj.box.y_min - border,
                              obj.box.x_max - border, obj.box.y_max - border};
    moved.box = {std::max(0.0, shifted.x_min), std::max(0.0, shifted.y_min),
                 std::min(w, shifted.x_max), std::min(h, shifted.y_max)};
    if (!moved.box.is_valid()) {
      ++out.dropped;
      continue;
    }
    if (moved.mask) {
      auto shift = [&](std::vector<Point>& ring) {
        for (auto& p : ring) {
          p.x = std::clamp(p.x - border, 0.0, w);
          p.y = std::clamp(p.y - border, 0.0, h);
        }
      };
      shift(moved.mask->exterior);
      for (auto& hole : moved.mask->holes) shift(hole);
    }
    if (moved.box != shifted) out.clipped.push_back(out.image.objects.size());
    out.image.objects.push_back(std::move(moved));
  }
  return out;
}

std::array<std::uint8_t, 3> class_color(ConeClass cls) {
  switch (cls) {
    case ConeClass::blue: return {0, 0, 255};
    case ConeClass::yellow: return {255, 255, 0};
    case ConeClass::small_orange: return {255, 140, 0};
    case ConeClass::large_orange: return {200, 80, 0};
    case ConeClass::other: return {128, 128, 128};
  }
  return {128, 128, 128};
}

RasterImage render_annotations(const RasterImage& img, const AnnotatedImage& ann,
                               const RenderStyle& style) {
  if (img.dims() != ann.dims()) {
    throw ContractError("annotation size " + std::to_string(ann.width) + "x" +
                        std::to_string(ann.height) + " does not match image " +
                        std::to_string(img.width) + "x" + std::to_string(img.height));
  }
  RasterImage out = img;
  if (style.draw_masks) {
    for (const auto& obj : ann.objects) {
      if (obj.mask) fill_polygon(out, *obj.mask, class_color(obj.cls), style.mask_alpha);
    }
  }
  for (const auto& obj : ann.objects) {
    if (obj.box.is_valid()) draw_outline(out, obj.box, style.line_width, class_color(obj.cls));
  }
  return out;
}

}  // namespace conekit
