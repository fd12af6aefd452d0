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

#include "conekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "conekit/error.hpp"
#include "conekit/parallel.hpp"
#include "json.hpp"

namespace conekit {

namespace {

// Detection indices ordered by descending confidence, ties by input order.
std::vector<std::size_t> rank_by_confidence(std::span<const Detection> dets,
                                            std::vector<std::size_t> ids) {
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });
  return ids;
}

std::vector<std::size_t> all_ids(std::size_t n) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

std::string_view eval_mode_name(EvalMode mode) {
  return mode == EvalMode::per_class ? "per_class" : "class_agnostic";
}

std::vector<bool> match_detections(std::span<const Detection> dets,
                                   std::span<const AnnotatedImage> gts, double iou_thr,
                                   EvalMode mode, unsigned jobs) {
  std::map<std::string, std::size_t> image_index;
  for (std::size_t i = 0; i < gts.size(); ++i) image_index.emplace(gts[i].name, i);

  std::vector<std::vector<std::size_t>> by_image(gts.size());
  for (std::size_t d = 0; d < dets.size(); ++d) {
    const auto& det = dets[d];
    auto it = image_index.find(det.image_ref);
    if (it == image_index.end()) {
      throw ContractError("detection " + std::to_string(d) + " references unknown image '" +
                          det.image_ref + "'");
    }
    require_valid(det.box, "detection box");
    if (!std::isfinite(det.confidence)) {
      throw ContractError("detection " + std::to_string(d) + " has a non-finite confidence");
    }
    by_image[it->second].push_back(d);
  }

  // Stored as char so workers never share a bit-packed word.
  std::vector<char> flags(dets.size(), 0);
  parallel_for(gts.size(), jobs, [&](std::size_t g) {
    const auto& objects = gts[g].objects;
    std::vector<bool> used(objects.size(), false);
    for (std::size_t d : rank_by_confidence(dets, by_image[g])) {
      double best = 0.0;
      std::size_t best_gt = objects.size();
      for (std::size_t o = 0; o < objects.size(); ++o) {
        if (used[o] || !objects[o].box.is_valid()) continue;
        if (mode == EvalMode::per_class && objects[o].cls != dets[d].cls) continue;
        const double v = iou(dets[d].box, objects[o].box);
        if (v > best) {
          best = v;
          best_gt = o;
        }
      }
      if (best_gt < objects.size() && best >= iou_thr) {
        used[best_gt] = true;
        flags[d] = 1;
      }
    }
  });
  return {flags.begin(), flags.end()};
}

std::vector<PrPoint> precision_recall_curve(const std::vector<bool>& ranked_flags, std::size_t n_gt) {
  if (n_gt == 0) throw ContractError("recall is undefined without ground-truth objects");
  std::vector<PrPoint> curve;
  curve.reserve(ranked_flags.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < ranked_flags.size(); ++i) {
    if (ranked_flags[i]) ++tp;
    curve.push_back({static_cast<double>(tp) / static_cast<double>(i + 1),
                     static_cast<double>(tp) / static_cast<double>(n_gt)});
  }
  return curve;
}

double average_precision(const std::vector<bool>& ranked_flags, std::size_t n_gt) {
  const auto curve = precision_recall_curve(ranked_flags, n_gt);
  double envelope = 0.0;
  double ap = 0.0;
  // Recall only grows at true positives, each by 1/n_gt.
  for (std::size_t i = curve.size(); i-- > 0;) {
    envelope = std::max(envelope, curve[i].precision);
    if (ranked_flags[i]) ap += envelope;
  }
  return std::clamp(ap / static_cast<double>(n_gt), 0.0, 1.0);
}

std::vector<double> default_iou_thresholds() {
  std::vector<double> out;
  for (int k = 50; k <= 90; k += 5) out.push_back(k / 100.0);
  return out;
}

EvalReport ap_sweep(std::span<const Detection> dets, std::span<const AnnotatedImage> gts,
                    std::span<const double> thresholds, EvalMode mode, unsigned jobs) {
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw ContractError("IoU threshold must lie in (0, 1], got " + std::to_string(t));
    }
  }
  EvalReport report;
  report.mode = mode;
  report.n_detections = dets.size();
  std::map<ConeClass, std::size_t> gt_per_class;
  for (const auto& img : gts) {
    report.n_gt += img.objects.size();
    for (const auto& obj : img.objects) ++gt_per_class[obj.cls];
  }
  const auto ranked = rank_by_confidence(dets, all_ids(dets.size()));

  for (double t : thresholds) {
    const auto flags = match_detections(dets, gts, t, mode, jobs);
    std::vector<bool> ranked_flags;
    ranked_flags.reserve(ranked.size());
    for (auto d : ranked) ranked_flags.push_back(flags[d]);

    ThresholdResult r;
    r.ap = average_precision(ranked_flags, report.n_gt);
    r.curve = precision_recall_curve(ranked_flags, report.n_gt);
    r.tp = static_cast<std::size_t>(std::count(ranked_flags.begin(), ranked_flags.end(), true));
    r.fp = ranked_flags.size() - r.tp;
    r.fn = report.n_gt - r.tp;
    if (mode == EvalMode::per_class) {
      for (const auto& [cls, count] : gt_per_class) {
        std::vector<bool> class_flags;
        for (auto d : ranked) {
          if (dets[d].cls == cls) class_flags.push_back(flags[d]);
        }
        r.per_class_ap[std::string(class_short_name(cls))] = average_precision(class_flags, count);
      }
    }
    report.per_threshold[t] = std::move(r);
  }
  return report;
}

std::string pr_curve_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "iou_threshold,rank,precision,recall\n";
  for (const auto& [t, r] : report.per_threshold) {
    for (std::size_t i = 0; i < r.curve.size(); ++i) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.2f,%zu,%.6f,%.6f\n", t, i + 1, r.curve[i].precision,
                    r.curve[i].recall);
      out << buf;
    }
  }
  return out.str();
}

std::vector<Detection> parse_darknet_results(std::string_view text,
                                             std::span<const AnnotatedImage> gts) {
  std::map<std::string, ImageDims> dims;
  for (const auto& img : gts) dims[img.name] = img.dims();
  std::vector<Detection> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    Detection det;
    int cls = 0;
    double cx, cy, w, h;
    if (!(tokens >> det.image_ref)) continue;
    if (!(tokens >> cls >> det.confidence >> cx >> cy >> w >> h)) {
      throw ParseError("line " + std::to_string(line_no) +
                           ": expected 'image class confidence cx cy w h'",
                       line_no);
    }
    auto it = dims.find(det.image_ref);
    if (it == dims.end()) {
      throw ContractError("line " + std::to_string(line_no) + ": unknown image '" +
                          det.image_ref + "'");
    }
    det.cls = class_from_index(cls).value_or(ConeClass::other);
    const double W = it->second.width, H = it->second.height;
    det.box = {(cx - w / 2) * W, (cy - h / 2) * H, (cx + w / 2) * W, (cy + h / 2) * H};
    out.push_back(std::move(det));
  }
  return out;
}

std::vector<Detection> parse_detections_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed detections JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_array()) throw ParseError("detections JSON must be a list");
  std::vector<Detection> out;
  try {
    for (const auto& d : doc) {
      Detection det;
      det.image_ref = d.at("image").get<std::string>();
      det.confidence = d.at("confidence").get<double>();
      const auto& cls = d.at("class");
      if (cls.is_number_integer()) {
        det.cls = class_from_index(cls.get<int>()).value_or(ConeClass::other);
      } else {
        det.cls = class_from_label(cls.get<std::string>()).value_or(ConeClass::other);
      }
      const auto& b = d.at("box");
      det.box = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                 b.at(3).get<double>()};
      out.push_back(std::move(det));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("detections JSON schema violation: ") + e.what());
  }
  return out;
}

}  // namespace conekit
