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

#include "conekit/error.hpp"
#include "conekit/imaging.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace conekit;

namespace {

bool same_pixel(const std::uint8_t* a, const std::uint8_t* b) {
  return a[0] == b[0] && a[1] == b[1] && a[2] == b[2];
}

bool same_pixel(const std::uint8_t* a, const std::array<std::uint8_t, 3>& c) {
  return a[0] == c[0] && a[1] == c[1] && a[2] == c[2];
}

LabeledObject object(ConeClass cls, BoundingBox box) {
  LabeledObject obj;
  obj.cls = cls;
  obj.box = box;
  return obj;
}

}  // namespace

TEST_CASE("watermark crop keeps the exact interior") {
  const auto img = testing::test_pattern(1000, 800, 3);
  const auto out = crop_watermark(img);
  REQUIRE(out.width == 720);
  REQUIRE(out.height == 520);
  bool all_equal = true;
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) all_equal &= same_pixel(out.at(x, y), img.at(x + 140, y + 140));
  }
  CHECK(all_equal);
  CHECK_THROWS_AS(crop_watermark(testing::test_pattern(280, 280)), ContractError);
  CHECK_THROWS_AS(crop_watermark(testing::test_pattern(1000, 280)), ContractError);
  CHECK(crop_watermark(testing::test_pattern(281, 281)).dims() == ImageDims{1, 1});
  CHECK_THROWS_AS(crop_watermark(img, -1), ContractError);
  CHECK(crop_watermark(img, 0) == img);
}

TEST_CASE("crop composition: two crops equal one crop of the summed border") {
  const auto img = testing::test_pattern(500, 400, 9);
  CHECK(crop_watermark(crop_watermark(img, 30), 50) == crop_watermark(img, 80));

  AnnotatedImage ann;
  ann.width = 500;
  ann.height = 400;
  ann.objects = {object(ConeClass::blue, {20, 20, 200, 300}), object(ConeClass::yellow, {5, 5, 60, 60}),
                 object(ConeClass::small_orange, {100, 90, 480, 395})};
  const auto twice = crop_annotation(crop_annotation(ann, 30).image, 50);
  const auto once = crop_annotation(ann, 80);
  CHECK(twice.image == once.image);
}

TEST_CASE("annotation crop translates, clips and drops") {
  AnnotatedImage ann;
  ann.name = "a_00001.png";
  ann.width = 1000;
  ann.height = 800;
  ann.objects = {object(ConeClass::blue, {130, 130, 200, 200}),    // clipped
                 object(ConeClass::yellow, {300, 300, 340, 360}),  // inside
                 object(ConeClass::blue, {10, 10, 100, 100})};     // in the border
  const auto c = crop_annotation(ann);
  CHECK(c.image.dims() == ImageDims{720, 520});
  REQUIRE(c.image.objects.size() == 2);
  CHECK(c.image.objects[0].box == BoundingBox{0, 0, 60, 60});
  CHECK(c.image.objects[1].box == BoundingBox{160, 160, 200, 220});
  CHECK(c.clipped == std::vector<std::size_t>{0});
  CHECK(c.dropped == 1);

  ann.objects[0].mask = PolygonMask{{{130, 130}, {200, 130}, {200, 200}, {130, 200}}, {}};
  const auto m = crop_annotation(ann);
  REQUIRE(m.image.objects[0].mask.has_value());
  CHECK(m.image.objects[0].mask->hull() == BoundingBox{0, 0, 60, 60});
  CHECK_THROWS_AS(crop_annotation(ann, 400), ContractError);
}

TEST_CASE("rendering without objects is the identity") {
  const auto img = testing::test_pattern(64, 48);
  AnnotatedImage ann;
  ann.width = 64;
  ann.height = 48;
  CHECK(render_annotations(img, ann) == img);
  ann.width = 65;
  CHECK_THROWS_AS(render_annotations(img, ann), ContractError);
}

TEST_CASE("box outline touches exactly the expected pixels") {
  const RasterImage img(40, 30, {10, 10, 10});
  AnnotatedImage ann;
  ann.width = 40;
  ann.height = 30;
  ann.objects = {object(ConeClass::yellow, {5, 6, 15, 20})};
  const auto out = render_annotations(img, ann);
  const auto color = class_color(ConeClass::yellow);
  int changed = 0;
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const bool inside = x >= 5 && x <= 14 && y >= 6 && y <= 19;
      const bool ring = inside && (x <= 6 || x >= 13 || y <= 7 || y >= 18);
      if (ring) {
        CHECK(same_pixel(out.at(x, y), color));
      } else {
        CHECK(same_pixel(out.at(x, y), img.at(x, y)));
      }
      changed += !same_pixel(out.at(x, y), img.at(x, y));
    }
  }
  CHECK(changed == 10 * 14 - 6 * 10);
}

TEST_CASE("mask fill stays inside the polygon hull") {
  const RasterImage img(60, 60, {0, 0, 0});
  AnnotatedImage ann;
  ann.width = 60;
  ann.height = 60;
  auto obj = object(ConeClass::blue, {10, 10, 40, 50});
  obj.mask = PolygonMask{{{10, 10}, {40, 10}, {25, 50}}, {}};
  ann.objects = {obj};
  RenderStyle no_outline;
  no_outline.line_width = 0;
  const auto out = render_annotations(img, ann, no_outline);
  int filled = 0;
  for (int y = 0; y < 60; ++y) {
    for (int x = 0; x < 60; ++x) {
      if (same_pixel(out.at(x, y), img.at(x, y))) continue;
      ++filled;
      CHECK(x >= 10);
      CHECK(x < 40);
      CHECK(y >= 10);
      CHECK(y < 50);
    }
  }
  // Triangle area is 600 px^2; pixel-centre sampling lands close to it.
  CHECK(filled > 550);
  CHECK(filled < 650);
  CHECK(out.at(25, 20)[2] == 102);  // 0.4 * 255 blended over black

  RenderStyle skip;
  skip.draw_masks = false;
  skip.line_width = 0;
  CHECK(render_annotations(img, ann, skip) == img);
}

TEST_CASE("png and jpeg io") {
  testing::TempDir dir;
  const auto img = testing::test_pattern(33, 21, 4);
  write_image(img, dir / "a.png");
  CHECK(read_image(dir / "a.png") == img);
  CHECK(read_image_dims(dir / "a.png") == ImageDims{33, 21});
  write_image(img, dir / "a.jpg");
  const auto jpg = read_image(dir / "a.jpg");
  CHECK(jpg.dims() == img.dims());
  CHECK(read_image_dims(dir / "a.jpg") == ImageDims{33, 21});
  write_text_file(dir / "bad.png", "not an image");
  CHECK_THROWS_AS(read_image(dir / "bad.png"), DecodeError);
  CHECK_THROWS_AS(read_image(dir / "missing.png"), IoError);
}
