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

#include <algorithm>
#include <random>

#include "conekit/dataset.hpp"
#include "conekit/error.hpp"
#include "conekit/formats.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace conekit;
namespace fs = std::filesystem;

namespace {

const fs::path kData = CONEKIT_TEST_DATA_DIR;

ParseOptions with_dims(int w, int h) {
  ParseOptions o;
  o.dims = ImageDims{w, h};
  return o;
}

std::vector<std::string> rules_of(const LayoutReport& r) {
  std::vector<std::string> out;
  for (const auto& f : r.findings) out.emplace_back(layout_rule_name(f.rule));
  return out;
}

}  // namespace

TEST_CASE("yolo parse of a full-image box") {
  const auto parsed = parse_annotation("0 0.5 0.5 1.0 1.0\n", FormatId::darknet_yolo, with_dims(100, 80));
  REQUIRE(parsed.image.objects.size() == 1);
  CHECK(parsed.image.objects[0].box == BoundingBox{0, 0, 100, 80});
  CHECK(parsed.image.objects[0].cls == ConeClass::blue);
}

TEST_CASE("yolo parse errors") {
  CHECK_THROWS_AS(parse_annotation("0 0.5 0.5 1.2 1.0", FormatId::darknet_yolo, with_dims(100, 80)),
                  ValidationError);
  CHECK_THROWS_AS(parse_annotation("0 0.5 0.5 1.0 1.0", FormatId::darknet_yolo), ContractError);
  CHECK_THROWS_AS(parse_annotation("0 0.9 0.5 0.4 0.2", FormatId::darknet_yolo, with_dims(100, 80)),
                  ValidationError);
  try {
    parse_annotation("0 0.5 0.5 0.1 0.1\n\n1 0.5 zz 0.1 0.1\n", FormatId::darknet_yolo,
                     with_dims(100, 80));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 3u);
  }
  CHECK_THROWS_AS(parse_annotation("0 0.5 0.5 0.1", FormatId::darknet_yolo, with_dims(10, 10)),
                  ParseError);
}

TEST_CASE("yolo unknown class index maps to other with a warning") {
  const auto parsed =
      parse_annotation("7 0.5 0.5 0.2 0.2\n", FormatId::darknet_yolo, with_dims(100, 100));
  CHECK(parsed.image.objects[0].cls == ConeClass::other);
  CHECK(parsed.image.objects[0].unmapped_class == "7");
  CHECK(parsed.warnings.size() == 1);
}

TEST_CASE("yolo writer formatting") {
  AnnotatedImage img;
  img.width = 100;
  img.height = 80;
  LabeledObject obj;
  obj.cls = ConeClass::blue;
  obj.box = {0, 0, 100, 80};
  img.objects.push_back(obj);
  CHECK(write_annotation(img, FormatId::darknet_yolo) == "0 0.500000 0.500000 1.000000 1.000000\n");

  img.objects[0].tags = {ObjectTag::truncated, ObjectTag::knocked_over};
  CHECK(write_annotation(img, FormatId::darknet_yolo) ==
        "0 0.500000 0.500000 1.000000 1.000000 knocked_over truncated\n");
  const auto back = parse_annotation(write_annotation(img, FormatId::darknet_yolo),
                                     FormatId::darknet_yolo, with_dims(100, 80));
  CHECK(back.image.objects[0].tags == img.objects[0].tags);
}

TEST_CASE("supervisely golden file") {
  ParseOptions o;
  o.name = "team-a_00001.png";
  const auto parsed =
      parse_annotation(read_text_file(kData / "sly_one_blue.json"), FormatId::supervisely_like, o);
  REQUIRE(parsed.image.objects.size() == 1);
  CHECK(parsed.image.name == "team-a_00001.png");
  CHECK(parsed.image.width == 100);
  CHECK(parsed.image.objects[0].cls == ConeClass::blue);
  CHECK(parsed.image.objects[0].box == BoundingBox{10, 20, 30, 60});
  CHECK(parsed.warnings.empty());
}

TEST_CASE("supervisely polygons, unknown classes and scene metadata") {
  const auto parsed =
      parse_annotation(read_text_file(kData / "sly_polygon.json"), FormatId::supervisely_like);
  const auto& img = parsed.image;
  REQUIRE(img.objects.size() == 2);
  REQUIRE(img.objects[0].mask.has_value());
  CHECK(img.objects[0].mask->holes.size() == 1);
  CHECK(img.objects[0].box == BoundingBox{15, 10, 45, 50});
  CHECK(img.objects[0].tags == TagSet{ObjectTag::knocked_over});
  CHECK(img.objects[1].cls == ConeClass::other);
  CHECK(img.objects[1].unmapped_class == "traffic_barrel");
  CHECK(parsed.warnings.size() == 1);
  CHECK(img.onboard() == false);
  CHECK(img.scene_meta.at("weather") == "rain");

  // masks survive supervisely_like passes
  const auto again = parse_annotation(write_annotation(img, FormatId::supervisely_like),
                                      FormatId::supervisely_like);
  CHECK(again.image.objects[0].mask == img.objects[0].mask);
  CHECK(again.image.scene_meta == img.scene_meta);

  // and are refused by box-only writers
  CHECK_THROWS_AS(write_annotation(img, FormatId::darknet_yolo), CapabilityError);
  CHECK_THROWS_AS(write_annotation(img, FormatId::pascal_voc), CapabilityError);
}

TEST_CASE("supervisely errors") {
  CHECK_THROWS_AS(parse_annotation("{\"size\": ", FormatId::supervisely_like), ParseError);
  CHECK_THROWS_AS(parse_annotation("{\"objects\": []}", FormatId::supervisely_like), ParseError);
  const std::string off_image = R"({"size":{"width":50,"height":50},"objects":[
      {"classTitle":"blue_cone","geometryType":"rectangle","points":{"exterior":[[10,10],[60,20]]}}]})";
  try {
    parse_annotation(off_image, FormatId::supervisely_like);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("object 0") != std::string::npos);
  }
  ParseOptions lenient;
  lenient.mode = ParseMode::lenient;
  CHECK(parse_annotation(off_image, FormatId::supervisely_like, lenient).image.objects.size() == 1);

  // embedded size is cross-checked against the real image
  CHECK_THROWS_AS(parse_annotation(read_text_file(kData / "sly_one_blue.json"),
                                   FormatId::supervisely_like, with_dims(101, 80)),
                  ValidationError);
}

TEST_CASE("voc writer uses 1-based inclusive corners") {
  AnnotatedImage img;
  img.name = "team-a_00001.png";
  img.width = 100;
  img.height = 80;
  LabeledObject obj;
  obj.cls = ConeClass::yellow;
  obj.box = {10, 20, 30, 60};
  obj.tags = {ObjectTag::truncated};
  img.objects.push_back(obj);
  const auto xml = write_annotation(img, FormatId::pascal_voc);
  CHECK(xml.find("<xmin>11</xmin>") != std::string::npos);
  CHECK(xml.find("<ymin>21</ymin>") != std::string::npos);
  CHECK(xml.find("<xmax>30</xmax>") != std::string::npos);
  CHECK(xml.find("<ymax>60</ymax>") != std::string::npos);
  CHECK(xml.find("<truncated>1</truncated>") != std::string::npos);

  const auto back = parse_annotation(xml, FormatId::pascal_voc);
  CHECK(back.image.objects[0].box == obj.box);
  CHECK(back.image.objects[0].tags == obj.tags);
  CHECK(back.image.name == img.name);
}

TEST_CASE("voc parse errors") {
  CHECK_THROWS_AS(parse_annotation("<annotation><size>", FormatId::pascal_voc), ParseError);
  CHECK_THROWS_AS(parse_annotation("<foo/>", FormatId::pascal_voc), ParseError);
}

TEST_CASE("empty object lists round trip in every writable format") {
  AnnotatedImage img;
  img.name = "x_00001.png";
  img.width = 10;
  img.height = 10;
  for (auto fmt : {FormatId::supervisely_like, FormatId::darknet_yolo, FormatId::pascal_voc}) {
    const auto bytes = write_annotation(img, fmt);
    const auto back = parse_annotation(bytes, fmt, with_dims(10, 10));
    CHECK(back.image.objects.empty());
  }
  CHECK(write_annotation(img, FormatId::darknet_yolo).empty());
  CHECK_THROWS_AS(write_annotation(img, FormatId::labelbox), CapabilityError);
}

TEST_CASE("round trip fidelity on random annotations") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto img = testing::random_annotation(rng, testing::sample_name(i));
    for (auto fmt : {FormatId::supervisely_like, FormatId::darknet_yolo, FormatId::pascal_voc}) {
      const auto back =
          parse_annotation(write_annotation(img, fmt), fmt, with_dims(img.width, img.height));
      REQUIRE(back.image.objects.size() == img.objects.size());
      for (std::size_t k = 0; k < img.objects.size(); ++k) {
        const auto& a = img.objects[k];
        const auto& b = back.image.objects[k];
        CHECK(a.cls == b.cls);
        CHECK(a.tags == b.tags);
        CHECK(std::abs(a.box.x_min - b.box.x_min) <= 0.5);
        CHECK(std::abs(a.box.y_min - b.box.y_min) <= 0.5);
        CHECK(std::abs(a.box.x_max - b.box.x_max) <= 0.5);
        CHECK(std::abs(a.box.y_max - b.box.y_max) <= 0.5);
      }
    }
  }
}

TEST_CASE("labelbox to supervisely conversion") {
  const auto out = convert(read_text_file(kData / "labelbox_sample.json"), FormatId::labelbox,
                           FormatId::supervisely_like, ImageDims{100, 80});
  const auto parsed = parse_annotation(out, FormatId::supervisely_like);
  REQUIRE(parsed.image.objects.size() == 1);
  CHECK(parsed.image.objects[0].box == BoundingBox{10, 20, 30, 60});
  CHECK(parsed.image.objects[0].cls == ConeClass::blue);
  CHECK(parsed.image.objects[0].tags == TagSet{ObjectTag::truncated});
}

TEST_CASE("conversion capability matrix") {
  const std::string sly = read_text_file(kData / "sly_one_blue.json");
  const auto& pairs = supported_conversions();
  CHECK(pairs.size() == 4);
  const FormatId all[] = {FormatId::supervisely_like, FormatId::darknet_yolo, FormatId::pascal_voc,
                          FormatId::labelbox};
  for (auto a : all) {
    for (auto b : all) {
      const bool ok = std::find(pairs.begin(), pairs.end(), std::make_pair(a, b)) != pairs.end();
      if (!ok) CHECK_THROWS_AS(convert(sly, a, b, ImageDims{100, 80}), CapabilityError);
    }
  }
  CHECK_THROWS_AS(convert(sly, FormatId::supervisely_like, FormatId::labelbox), CapabilityError);
}

TEST_CASE("convert equals write(parse(src))") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto img = testing::random_annotation(rng, testing::sample_name(i));
    const auto sly = write_annotation(img, FormatId::supervisely_like);
    const auto yolo = convert(sly, FormatId::supervisely_like, FormatId::darknet_yolo);
    CHECK(yolo == write_annotation(parse_annotation(sly, FormatId::supervisely_like).image,
                                   FormatId::darknet_yolo));
    const ImageDims dims{img.width, img.height};
    ParseOptions o;
    o.dims = dims;
    CHECK(convert(yolo, FormatId::darknet_yolo, FormatId::supervisely_like, dims) ==
          write_annotation(parse_annotation(yolo, FormatId::darknet_yolo, o).image,
                           FormatId::supervisely_like));
  }
}

TEST_CASE("yolo to supervisely to yolo keeps normalized coordinates within 1e-4") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const double cx = u(rng), cy = u(rng);
    const double w = std::min(2 * std::min(cx, 1 - cx), u(rng) / 4);
    const double h = std::min(2 * std::min(cy, 1 - cy), u(rng) / 4);
    char line[128];
    std::snprintf(line, sizeof line, "%d %.6f %.6f %.6f %.6f\n", i % 5, cx, cy, w, h);
    const ImageDims dims{640 + i, 480 + i};
    const auto sly = convert(line, FormatId::darknet_yolo, FormatId::supervisely_like, dims);
    const auto yolo = convert(sly, FormatId::supervisely_like, FormatId::darknet_yolo, dims);
    int c2;
    double v2[4];
    REQUIRE(std::sscanf(yolo.c_str(), "%d %lf %lf %lf %lf", &c2, &v2[0], &v2[1], &v2[2], &v2[3]) == 5);
    CHECK(c2 == i % 5);
    double v1[4];
    std::sscanf(line, "%*d %lf %lf %lf %lf", &v1[0], &v1[1], &v1[2], &v1[3]);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(v1[k] - v2[k]) <= 1e-4);
  }
}

TEST_CASE("validate_layout on the golden tree") {
  testing::TempDir dir;
  testing::write_golden_tree(dir.path());
  const auto report = validate_layout(dir.path());
  CHECK(report.findings.empty());
  REQUIRE(report.layout.teams.size() == 2);
  CHECK(report.layout.teams[0].team_id == "team-a");
  CHECK(report.layout.teams[0].images.size() == 2);
}

TEST_CASE("validate_layout findings") {
  testing::TempDir dir;
  testing::write_golden_tree(dir.path());
  const auto& root = dir.path();

  SUBCASE("orphan image") {
    fs::remove(root / "team-a/ann/team-a_00002.png.json");
    CHECK(rules_of(validate_layout(root)) == std::vector<std::string>{"orphan_image"});
  }
  SUBCASE("orphan annotation") {
    fs::remove(root / "team-a/img/team-a_00002.png");
    CHECK(rules_of(validate_layout(root)) == std::vector<std::string>{"orphan_annotation"});
  }
  SUBCASE("bad filename") {
    write_text_file(root / "team-a/img/notes.txt", "hello");
    const auto r = validate_layout(root);
    CHECK(rules_of(r) == std::vector<std::string>{"bad_filename"});
    CHECK(r.findings[0].path == "team-a/img/notes.txt");
  }
  SUBCASE("foreign team id") {
    fs::copy_file(root / "team-a/img/team-a_00001.png", root / "team-b/img/team-a_00009.png");
    CHECK(rules_of(validate_layout(root)) == std::vector<std::string>{"bad_filename"});
  }
  SUBCASE("duplicate number") {
    fs::copy_file(root / "team-a/img/team-a_00001.png", root / "team-a/img/team-a_00001.jpg");
    fs::copy_file(root / "team-a/ann/team-a_00001.png.json", root / "team-a/ann/team-a_00001.jpg.json");
    const auto r = validate_layout(root);
    CHECK(rules_of(r) == std::vector<std::string>{"duplicate_id"});
    CHECK(r.findings[0].path == "team-a/img/team-a_00001.png");
  }
  SUBCASE("extra directory") {
    fs::create_directories(root / "team-b/masks");
    CHECK(rules_of(validate_layout(root)) == std::vector<std::string>{"bad_layout"});
  }
  SUBCASE("missing root") {
    CHECK_THROWS_AS(validate_layout(root / "nope"), IoError);
  }
}

TEST_CASE("validate_layout honours directory name options") {
  testing::TempDir dir;
  testing::write_golden_tree(dir.path());
  fs::rename(dir / "team-a/img", dir / "team-a/images");
  fs::rename(dir / "team-a/ann", dir / "team-a/labels");
  fs::rename(dir / "team-b/img", dir / "team-b/images");
  fs::rename(dir / "team-b/ann", dir / "team-b/labels");
  CHECK_FALSE(validate_layout(dir.path()).findings.empty());
  CHECK(validate_layout(dir.path(), {"images", "labels"}).findings.empty());
}

TEST_CASE("load_dataset accepts roots, team folders and flat folders") {
  testing::TempDir dir;
  const auto written = testing::write_golden_tree(dir.path());
  const auto all = load_dataset(dir.path());
  CHECK(all.images.size() == 3);
  CHECK(all.inventory.size() == 3);
  const auto team = load_dataset(dir / "team-a", {}, ParseMode::strict, true);
  CHECK(team.images.size() == 2);
  CHECK(team.inventory.at("team-a_00001.png") == ImageDims{64, 48});
  const auto flat = load_dataset(dir / "team-b/ann");
  REQUIRE(flat.images.size() == 1);
  CHECK(flat.images[0] == written[2]);
}
