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

#include "conekit/formats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include "json.hpp"

#include "conekit/error.hpp"

namespace conekit {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 4> kFormatNames = {
    "supervisely_like", "darknet_yolo", "pascal_voc", "labelbox"};

std::string object_ref(std::size_t index) { return "object " + std::to_string(index); }

// Strict-mode checks shared by all parsers.
void check_object(const LabeledObject& obj, std::size_t index, const ImageDims& dims,
                  ParseMode mode) {
  if (mode == ParseMode::lenient) return;
  if (!obj.box.is_valid()) {
    throw ValidationError(object_ref(index) + ": box has zero or negative extent");
  }
  const auto& b = obj.box;
  if (b.x_min < 0 || b.y_min < 0 || b.x_max > dims.width || b.y_max > dims.height) {
    throw ValidationError(object_ref(index) + ": box lies outside the " +
                          std::to_string(dims.width) + "x" + std::to_string(dims.height) +
                          " image");
  }
  if (obj.mask) {
    for (const auto& p : obj.mask->exterior) {
      if (p.x < 0 || p.y < 0 || p.x > dims.width || p.y > dims.height) {
        throw ValidationError(object_ref(index) + ": polygon vertex outside the image");
      }
    }
  }
}

void check_dims(const ImageDims& embedded, const std::optional<ImageDims>& given,
                ParseMode mode) {
  if (embedded.width <= 0 || embedded.height <= 0) {
    throw ValidationError("image size must be positive");
  }
  if (given && *given != embedded && mode == ParseMode::strict) {
    throw ValidationError("embedded image size " + std::to_string(embedded.width) + "x" +
                          std::to_string(embedded.height) + " does not match actual " +
                          std::to_string(given->width) + "x" +
                          std::to_string(given->height));
  }
}

ImageDims require_dims(const ParseOptions& options, FormatId fmt) {
  if (!options.dims || options.dims->width <= 0 || options.dims->height <= 0) {
    throw ContractError(std::string(format_name(fmt)) +
                        " annotations need positive image dimensions");
  }
  return *options.dims;
}

ConeClass map_class(std::string_view label, LabeledObject& obj, std::size_t index,
                    std::vector<std::string>& warnings) {
  if (auto cls = class_from_label(label)) return *cls;
  obj.unmapped_class = std::string(label);
  warnings.push_back(object_ref(index) + ": unknown class '" + std::string(label) +
                     "' mapped to other_cone");
  return ConeClass::other;
}

void add_tag(std::string_view label, LabeledObject& obj, std::size_t index,
             std::vector<std::string>& warnings) {
  if (auto tag = tag_from_label(label)) {
    obj.tags.insert(*tag);
  } else {
    warnings.push_back(object_ref(index) + ": unknown tag '" + std::string(label) +
                       "' ignored");
  }
}

void require_no_masks(const AnnotatedImage& img, FormatId fmt) {
  for (std::size_t i = 0; i < img.objects.size(); ++i) {
    if (img.objects[i].mask) {
      throw CapabilityError(std::string(format_name(fmt)) +
                            " holds bounding boxes only; " + object_ref(i) +
                            " carries a segmentation mask");
    }
  }
}

json parse_json(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
}

// ---------------------------------------------------------------------------
// supervisely_like

Point json_point(const json& p) {
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
    throw ParseError("point must be a [x, y] pair");
  }
  return {p[0].get<double>(), p[1].get<double>()};
}

std::vector<Point> json_ring(const json& ring) {
  if (!ring.is_array()) throw ParseError("point list must be an array");
  std::vector<Point> out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back(json_point(p));
  return out;
}

ParsedAnnotation parse_supervisely(std::string_view bytes, const ParseOptions& options) {
  const json doc = parse_json(bytes);
  ParsedAnnotation result;
  auto& img = result.image;
  img.name = options.name;
  try {
    const auto& size = doc.at("size");
    img.width = size.at("width").get<int>();
    img.height = size.at("height").get<int>();
    check_dims(img.dims(), options.dims, options.mode);

    if (auto it = doc.find("sceneMeta"); it != doc.end()) {
      for (const auto& [key, value] : it->items()) {
        if (value.is_string()) {
          img.scene_meta[key] = value.get<std::string>();
        } else {
          img.scene_meta[key] = value.dump();
        }
      }
    }

    const auto& objects = doc.at("objects");
    if (!objects.is_array()) throw ParseError("'objects' must be an array");
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const auto& o = objects[i];
      LabeledObject obj;
      obj.cls = map_class(o.at("classTitle").get<std::string>(), obj, i, result.warnings);
      const auto geometry = o.at("geometryType").get<std::string>();
      const auto& points = o.at("points");
      auto exterior = json_ring(points.at("exterior"));
      if (geometry == "rectangle") {
        if (exterior.size() != 2) {
          throw ParseError(object_ref(i) + ": rectangle needs exactly two corner points");
        }
        obj.box = {std::min(exterior[0].x, exterior[1].x),
                   std::min(exterior[0].y, exterior[1].y),
                   std::max(exterior[0].x, exterior[1].x),
                   std::max(exterior[0].y, exterior[1].y)};
      } else if (geometry == "polygon") {
        if (exterior.size() < 3) {
          throw ParseError(object_ref(i) + ": polygon needs at least three vertices");
        }
        PolygonMask mask;
        mask.exterior = std::move(exterior);
        if (auto it = points.find("interior"); it != points.end()) {
          for (const auto& hole : *it) mask.holes.push_back(json_ring(hole));
        }
        obj.box = mask.hull();
        obj.mask = std::move(mask);
      } else {
        throw ParseError(object_ref(i) + ": unsupported geometryType '" + geometry + "'");
      }
      if (auto it = o.find("tags"); it != o.end()) {
        for (const auto& t : *it) {
          if (t.is_string()) {
            add_tag(t.get<std::string>(), obj, i, result.warnings);
          } else {
            add_tag(t.at("name").get<std::string>(), obj, i, result.warnings);
          }
        }
      }
      check_object(obj, i, img.dims(), options.mode);
      img.objects.push_back(std::move(obj));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("supervisely_like schema violation: ") + e.what());
  }
  return result;
}

json json_ring_out(const std::vector<Point>& ring) {
  json out = json::array();
  for (const auto& p : ring) out.push_back({p.x, p.y});
  return out;
}

std::string write_supervisely(const AnnotatedImage& img) {
  json doc;
  doc["size"] = {{"width", img.width}, {"height", img.height}};
  json objects = json::array();
  for (const auto& obj : img.objects) {
    json o;
    o["classTitle"] = class_label(obj.cls);
    json points;
    if (obj.mask) {
      o["geometryType"] = "polygon";
      points["exterior"] = json_ring_out(obj.mask->exterior);
      json holes = json::array();
      for (const auto& h : obj.mask->holes) holes.push_back(json_ring_out(h));
      points["interior"] = std::move(holes);
    } else {
      o["geometryType"] = "rectangle";
      points["exterior"] = json_ring_out({{obj.box.x_min, obj.box.y_min},
                                          {obj.box.x_max, obj.box.y_max}});
      points["interior"] = json::array();
    }
    o["points"] = std::move(points);
    json tags = json::array();
    for (auto t : obj.tags) tags.push_back(tag_label(t));
    o["tags"] = std::move(tags);
    objects.push_back(std::move(o));
  }
  doc["objects"] = std::move(objects);
  if (!img.scene_meta.empty()) {
    json meta = json::object();
    for (const auto& [key, value] : img.scene_meta) {
      if (key == "onboard" && (value == "true" || value == "false")) {
        meta[key] = value == "true";
      } else {
        meta[key] = value;
      }
    }
    doc["sceneMeta"] = std::move(meta);
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// darknet_yolo

constexpr double kYoloSlack = 1e-6;

ParsedAnnotation parse_yolo(std::string_view bytes, const ParseOptions& options) {
  const ImageDims dims = require_dims(options, FormatId::darknet_yolo);
  ParsedAnnotation result;
  auto& img = result.image;
  img.name = options.name;
  img.width = dims.width;
  img.height = dims.height;

  std::istringstream in{std::string(bytes)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first)) continue;  // blank line
    const std::size_t index = img.objects.size();
    const std::string where = "line " + std::to_string(line_no);

    int cls_index = 0;
    double v[4];
    try {
      std::size_t used = 0;
      cls_index = std::stoi(first, &used);
      if (used != first.size()) throw std::invalid_argument("class");
    } catch (const std::exception&) {
      throw ParseError(where + ": class index must be an integer", line_no);
    }
    for (double& x : v) {
      std::string tok;
      if (!(tokens >> tok)) throw ParseError(where + ": expected 5 fields", line_no);
      try {
        std::size_t used = 0;
        x = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("number");
      } catch (const std::exception&) {
        throw ParseError(where + ": '" + tok + "' is not a number", line_no);
      }
    }

    LabeledObject obj;
    if (auto cls = class_from_index(cls_index)) {
      obj.cls = *cls;
    } else {
      obj.cls = ConeClass::other;
      obj.unmapped_class = first;
      result.warnings.push_back(object_ref(index) + " (" + where + "): unknown class index " +
                                first + " mapped to other_cone");
    }
    std::string tag;
    while (tokens >> tag) add_tag(tag, obj, index, result.warnings);

    const double cx = v[0], cy = v[1], w = v[2], h = v[3];
    double x0 = cx - w / 2, x1 = cx + w / 2, y0 = cy - h / 2, y1 = cy + h / 2;
    if (options.mode == ParseMode::strict) {
      for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) {
          throw ValidationError(object_ref(index) + " (" + where +
                                "): normalized value outside [0,1]");
        }
      }
      if (x0 < -kYoloSlack || y0 < -kYoloSlack || x1 > 1 + kYoloSlack ||
          y1 > 1 + kYoloSlack) {
        throw ValidationError(object_ref(index) + " (" + where +
                              "): box extends past the image border");
      }
      x0 = std::clamp(x0, 0.0, 1.0);
      y0 = std::clamp(y0, 0.0, 1.0);
      x1 = std::clamp(x1, 0.0, 1.0);
      y1 = std::clamp(y1, 0.0, 1.0);
    }
    obj.box = {x0 * dims.width, y0 * dims.height, x1 * dims.width, y1 * dims.height};
    if (options.mode == ParseMode::strict && !obj.box.is_valid()) {
      throw ValidationError(object_ref(index) + " (" + where + "): zero-area box");
    }
    img.objects.push_back(std::move(obj));
  }
  return result;
}

std::string write_yolo(const AnnotatedImage& img) {
  require_no_masks(img, FormatId::darknet_yolo);
  if (img.width <= 0 || img.height <= 0) {
    throw ContractError("darknet_yolo output needs positive image dimensions");
  }
  std::string out;
  for (const auto& obj : img.objects) {
    const double w = img.width, h = img.height;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f", class_index(obj.cls),
                  (obj.box.x_min + obj.box.x_max) / 2 / w,
                  (obj.box.y_min + obj.box.y_max) / 2 / h, obj.box.width() / w,
                  obj.box.height() / h);
    out += buf;
    for (auto t : obj.tags) {
      out += ' ';
      out += tag_label(t);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// pascal_voc

namespace pt = boost::property_tree;

double voc_number(const pt::ptree& node, const char* key, std::size_t index) {
  const auto value = node.get_optional<std::string>(key);
  if (!value) throw ParseError(object_ref(index) + ": missing <" + key + ">");
  try {
    return std::stod(*value);
  } catch (const std::exception&) {
    throw ParseError(object_ref(index) + ": <" + key + "> is not a number");
  }
}

ParsedAnnotation parse_voc(std::string_view bytes, const ParseOptions& options) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(bytes)};
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed XML: " + e.message(), e.line());
  }
  const auto root = tree.get_child_optional("annotation");
  if (!root) throw ParseError("missing <annotation> root element");

  ParsedAnnotation result;
  auto& img = result.image;
  img.name = root->get<std::string>("filename", options.name);
  if (img.name.empty()) img.name = options.name;
  if (auto size = root->get_child_optional("size")) {
    img.width = size->get<int>("width", 0);
    img.height = size->get<int>("height", 0);
    check_dims(img.dims(), options.dims, options.mode);
  } else {
    const ImageDims dims = require_dims(options, FormatId::pascal_voc);
    img.width = dims.width;
    img.height = dims.height;
  }

  for (const auto& [key, node] : *root) {
    if (key != "object") continue;
    const std::size_t index = img.objects.size();
    LabeledObject obj;
    obj.cls = map_class(node.get<std::string>("name", ""), obj, index, result.warnings);
    const auto bnd = node.get_child_optional("bndbox");
    if (!bnd) throw ParseError(object_ref(index) + ": missing <bndbox>");
    // 1-based inclusive pixel corners.
    obj.box = {voc_number(*bnd, "xmin", index) - 1, voc_number(*bnd, "ymin", index) - 1,
               voc_number(*bnd, "xmax", index), voc_number(*bnd, "ymax", index)};
    if (node.get<int>("truncated", 0) != 0) obj.tags.insert(ObjectTag::truncated);
    for (const auto& [child_key, child] : node) {
      if (child_key == "tag") add_tag(child.data(), obj, index, result.warnings);
    }
    check_object(obj, index, img.dims(), options.mode);
    img.objects.push_back(std::move(obj));
  }
  return result;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string write_voc(const AnnotatedImage& img) {
  require_no_masks(img, FormatId::pascal_voc);
  std::string out = "<annotation>\n";
  out += "  <filename>" + xml_escape(img.name) + "</filename>\n";
  out += "  <size>\n";
  out += "    <width>" + std::to_string(img.width) + "</width>\n";
  out += "    <height>" + std::to_string(img.height) + "</height>\n";
  out += "    <depth>3</depth>\n";
  out += "  </size>\n";
  for (const auto& obj : img.objects) {
    long xmin = std::lround(obj.box.x_min) + 1;
    long ymin = std::lround(obj.box.y_min) + 1;
    long xmax = std::max(std::lround(obj.box.x_max), xmin);
    long ymax = std::max(std::lround(obj.box.y_max), ymin);
    out += "  <object>\n";
    out += "    <name>" + std::string(class_label(obj.cls)) + "</name>\n";
    out += "    <pose>Unspecified</pose>\n";
    out += "    <truncated>" +
           std::string(obj.tags.count(ObjectTag::truncated) ? "1" : "0") + "</truncated>\n";
    out += "    <difficult>0</difficult>\n";
    out += "    <bndbox>\n";
    out += "      <xmin>" + std::to_string(xmin) + "</xmin>\n";
    out += "      <ymin>" + std::to_string(ymin) + "</ymin>\n";
    out += "      <xmax>" + std::to_string(xmax) + "</xmax>\n";
    out += "      <ymax>" + std::to_string(ymax) + "</ymax>\n";
    out += "    </bndbox>\n";
    for (auto t : obj.tags) out += "    <tag>" + std::string(tag_label(t)) + "</tag>\n";
    out += "  </object>\n";
  }
  out += "</annotation>\n";
  return out;
}

// ---------------------------------------------------------------------------
// labelbox (parse only)

ParsedAnnotation parse_labelbox(std::string_view bytes, const ParseOptions& options) {
  const ImageDims dims = require_dims(options, FormatId::labelbox);
  json doc = parse_json(bytes);
  if (doc.is_array()) {
    if (doc.size() != 1) throw ParseError("labelbox export must hold exactly one data row");
    doc = doc[0];
  }
  ParsedAnnotation result;
  auto& img = result.image;
  img.width = dims.width;
  img.height = dims.height;
  try {
    img.name = doc.value("External ID", options.name);
    const auto& objects = doc.at("Label").at("objects");
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const auto& o = objects[i];
      LabeledObject obj;
      const std::string cls =
          o.contains("value") ? o.at("value").get<std::string>() : o.at("title").get<std::string>();
      obj.cls = map_class(cls, obj, i, result.warnings);
      const auto& bb = o.at("bbox");
      const double left = bb.at("left").get<double>();
      const double top = bb.at("top").get<double>();
      obj.box = {left, top, left + bb.at("width").get<double>(),
                 top + bb.at("height").get<double>()};
      if (auto it = o.find("classifications"); it != o.end()) {
        for (const auto& c : *it) add_tag(c.at("value").get<std::string>(), obj, i, result.warnings);
      }
      check_object(obj, i, img.dims(), options.mode);
      img.objects.push_back(std::move(obj));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("labelbox schema violation: ") + e.what());
  }
  return result;
}

// ---------------------------------------------------------------------------
// layout

struct TeamScan {
  TeamEntry entry;
  std::vector<LayoutFinding> findings;
};

std::vector<std::filesystem::directory_entry> list_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot read directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::directory_entry> out;
  for (const auto& e : it) out.push_back(e);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.path().filename() < b.path().filename(); });
  return out;
}

}  // namespace

std::string_view format_name(FormatId fmt) { return kFormatNames[static_cast<std::size_t>(fmt)]; }

std::optional<FormatId> format_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFormatNames.size(); ++i) {
    if (kFormatNames[i] == name) return static_cast<FormatId>(i);
  }
  if (name == "supervisely") return FormatId::supervisely_like;
  if (name == "yolo" || name == "darknet") return FormatId::darknet_yolo;
  if (name == "voc") return FormatId::pascal_voc;
  return std::nullopt;
}

ParsedAnnotation parse_annotation(std::string_view bytes, FormatId fmt,
                                  const ParseOptions& options) {
  switch (fmt) {
    case FormatId::supervisely_like: return parse_supervisely(bytes, options);
    case FormatId::darknet_yolo: return parse_yolo(bytes, options);
    case FormatId::pascal_voc: return parse_voc(bytes, options);
    case FormatId::labelbox: return parse_labelbox(bytes, options);
  }
  throw ContractError("unknown format");
}

std::string write_annotation(const AnnotatedImage& img, FormatId fmt) {
  switch (fmt) {
    case FormatId::supervisely_like: return write_supervisely(img);
    case FormatId::darknet_yolo: return write_yolo(img);
    case FormatId::pascal_voc: return write_voc(img);
    case FormatId::labelbox:
      throw CapabilityError("labelbox is an input-only format");
  }
  throw ContractError("unknown format");
}

const std::vector<std::pair<FormatId, FormatId>>& supported_conversions() {
  static const std::vector<std::pair<FormatId, FormatId>> pairs = {
      {FormatId::darknet_yolo, FormatId::supervisely_like},
      {FormatId::labelbox, FormatId::supervisely_like},
      {FormatId::supervisely_like, FormatId::darknet_yolo},
      {FormatId::supervisely_like, FormatId::pascal_voc},
  };
  return pairs;
}

std::string convert(std::string_view src_bytes, FormatId src_fmt, FormatId dst_fmt,
                    std::optional<ImageDims> img_dims) {
  const auto& pairs = supported_conversions();
  if (std::find(pairs.begin(), pairs.end(), std::make_pair(src_fmt, dst_fmt)) == pairs.end()) {
    std::string msg = "conversion " + std::string(format_name(src_fmt)) + " -> " +
                      std::string(format_name(dst_fmt)) + " is not supported; supported:";
    for (const auto& [a, b] : pairs) {
      msg += " " + std::string(format_name(a)) + "->" + std::string(format_name(b));
    }
    throw CapabilityError(msg);
  }
  ParseOptions options;
  options.dims = img_dims;
  return write_annotation(parse_annotation(src_bytes, src_fmt, options).image, dst_fmt);
}

std::string_view layout_rule_name(LayoutRule rule) {
  switch (rule) {
    case LayoutRule::bad_layout: return "bad_layout";
    case LayoutRule::bad_filename: return "bad_filename";
    case LayoutRule::orphan_image: return "orphan_image";
    case LayoutRule::orphan_annotation: return "orphan_annotation";
    case LayoutRule::duplicate_id: return "duplicate_id";
  }
  return "?";
}

LayoutReport validate_layout(const std::filesystem::path& root, const LayoutOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw IoError("dataset root " + root.string() + " is not a readable directory");
  }
  LayoutReport report;
  report.layout.root = root;
  auto& findings = report.findings;
  auto add = [&](LayoutRule rule, std::string path, std::string message) {
    findings.push_back({rule, std::move(path), std::move(message)});
  };

  // (team, number) -> relative paths of images using it
  std::map<std::pair<std::string, int>, std::vector<std::string>> ids;

  for (const auto& team_dir : list_dir(root)) {
    const std::string team = team_dir.path().filename().string();
    if (!team_dir.is_directory()) {
      add(LayoutRule::bad_layout, team, "unexpected file at dataset root");
      continue;
    }
    TeamEntry entry;
    entry.team_id = team;
    bool have_img = false, have_ann = false;
    for (const auto& sub : list_dir(team_dir.path())) {
      const std::string name = sub.path().filename().string();
      const std::string rel = team + "/" + name;
      if (sub.is_directory() && name == options.image_dir) {
        have_img = true;
      } else if (sub.is_directory() && name == options.annotation_dir) {
        have_ann = true;
      } else {
        add(LayoutRule::bad_layout, rel,
            "team folder may only contain '" + options.image_dir + "/' and '" +
                options.annotation_dir + "/'");
      }
    }
    if (!have_img) {
      add(LayoutRule::bad_layout, team + "/" + options.image_dir, "missing image directory");
    }
    if (!have_ann) {
      add(LayoutRule::bad_layout, team + "/" + options.annotation_dir,
          "missing annotation directory");
    }

    std::vector<std::string> images, annotations;
    if (have_img) {
      const std::string prefix = team + "/" + options.image_dir + "/";
      for (const auto& f : list_dir(team_dir.path() / options.image_dir)) {
        const std::string name = f.path().filename().string();
        if (f.is_directory()) {
          add(LayoutRule::bad_layout, prefix + name, "nested directory in image folder");
          continue;
        }
        std::string reason;
        auto parsed = try_parse_image_name(name, &reason);
        if (!parsed) {
          add(LayoutRule::bad_filename, prefix + name, reason);
          continue;
        }
        if (parsed->team_id != team) {
          add(LayoutRule::bad_filename, prefix + name,
              "team id '" + parsed->team_id + "' differs from folder '" + team + "'");
          continue;
        }
        images.push_back(name);
        ids[{parsed->team_id, parsed->number}].push_back(prefix + name);
      }
    }
    if (have_ann) {
      const std::string prefix = team + "/" + options.annotation_dir + "/";
      for (const auto& f : list_dir(team_dir.path() / options.annotation_dir)) {
        const std::string name = f.path().filename().string();
        if (f.is_directory()) {
          add(LayoutRule::bad_layout, prefix + name, "nested directory in annotation folder");
          continue;
        }
        constexpr std::string_view suffix = ".json";
        std::string reason = "annotation must be named <image-name>.json";
        std::optional<ImageName> parsed;
        if (name.size() > suffix.size() && name.ends_with(suffix)) {
          parsed = try_parse_image_name(name.substr(0, name.size() - suffix.size()), &reason);
        }
        if (!parsed) {
          add(LayoutRule::bad_filename, prefix + name, reason);
          continue;
        }
        if (parsed->team_id != team) {
          add(LayoutRule::bad_filename, prefix + name,
              "team id '" + parsed->team_id + "' differs from folder '" + team + "'");
          continue;
        }
        annotations.push_back(name);
      }
    }
    if (have_img && have_ann) {
      for (const auto& img : images) {
        if (!std::binary_search(annotations.begin(), annotations.end(), img + ".json")) {
          add(LayoutRule::orphan_image, team + "/" + options.image_dir + "/" + img,
              "no annotation " + img + ".json");
        }
      }
      for (const auto& ann : annotations) {
        const std::string img = ann.substr(0, ann.size() - 5);
        if (!std::binary_search(images.begin(), images.end(), img)) {
          add(LayoutRule::orphan_annotation, team + "/" + options.annotation_dir + "/" + ann,
              "no image " + img);
        }
      }
    }
    entry.images = std::move(images);
    entry.annotations = std::move(annotations);
    report.layout.teams.push_back(std::move(entry));
  }

  for (auto& [id, paths] : ids) {
    std::sort(paths.begin(), paths.end());
    for (std::size_t i = 1; i < paths.size(); ++i) {
      add(LayoutRule::duplicate_id, paths[i], "image number already used by " + paths[0]);
    }
  }
  std::sort(findings.begin(), findings.end(), [](const auto& a, const auto& b) {
    return std::tie(a.path, a.rule) < std::tie(b.path, b.rule);
  });
  return report;
}

}  // namespace conekit
