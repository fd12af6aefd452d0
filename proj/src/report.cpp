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

#include "conekit/report.hpp"

#include <cstdio>

namespace conekit {

using nlohmann::json;

std::string threshold_key(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

json to_json(const LayoutReport& report) {
  json teams = json::array();
  for (const auto& t : report.layout.teams) {
    teams.push_back({{"team_id", t.team_id},
                     {"n_images", t.images.size()},
                     {"n_annotations", t.annotations.size()}});
  }
  json findings = json::array();
  for (const auto& f : report.findings) {
    findings.push_back({{"rule", layout_rule_name(f.rule)}, {"path", f.path}, {"message", f.message}});
  }
  return {{"teams", std::move(teams)}, {"findings", std::move(findings)}};
}

json to_json(std::span<const SanityFinding> findings) {
  json out = json::array();
  for (const auto& f : findings) {
    out.push_back({{"image", f.image_ref},
                   {"object_index", f.object_index ? json(*f.object_index) : json(nullptr)},
                   {"rule", sanity_rule_name(f.rule)},
                   {"severity", severity_name(f.severity)},
                   {"message", f.message}});
  }
  return out;
}

json to_json(const ExamReport& report) {
  auto pairs = [](const std::vector<MatchedPair>& ps) {
    json out = json::array();
    for (const auto& p : ps) out.push_back({{"gt", p.gt}, {"pred", p.pred}, {"iou", p.iou}});
    return out;
  };
  json images = json::array();
  for (const auto& img : report.per_image) {
    json findings = json::array();
    for (const auto& f : img.findings) {
      findings.push_back({{"kind", exam_finding_name(f.kind)},
                          {"gt", f.gt ? json(*f.gt) : json(nullptr)},
                          {"pred", f.pred ? json(*f.pred) : json(nullptr)},
                          {"message", f.message}});
    }
    images.push_back({{"image", img.image_ref},
                      {"matched", pairs(img.matched)},
                      {"missed", img.missed},
                      {"spurious", img.spurious},
                      {"misclassified", img.misclassified},
                      {"tag_mismatch", img.tag_mismatch},
                      {"mislocalized", pairs(img.mislocalized)},
                      {"findings", std::move(findings)}});
  }
  return {{"aggregates",
           {{"n_gt", report.n_gt},
            {"n_pred", report.n_pred},
            {"recall", report.recall},
            {"precision", report.precision},
            {"mean_iou", report.mean_iou}}},
          {"verdict", report.passed ? "pass" : "fail"},
          {"reasons", report.reasons},
          {"per_image", std::move(images)}};
}

json to_json(const ContributionReport& report) {
  json reqs = json::array();
  for (const auto& r : report.requirements) {
    reqs.push_back({{"rule", r.rule}, {"threshold", r.threshold}, {"observed", r.observed},
                    {"pass", r.passed}});
  }
  return {{"onboard_ratio", report.onboard_ratio},
          {"local_dup_score", report.local_dup_score},
          {"requirements", std::move(reqs)},
          {"pass", report.passed()}};
}

json to_json(const StatsReport& report) {
  auto buckets = [](const std::vector<HistogramBucket>& bs) {
    json out = json::array();
    for (const auto& b : bs) out.push_back({{"bucket", b.label}, {"count", b.count}});
    return out;
  };
  json distinct = json::object();
  for (const auto& [k, v] : report.distinct_classes_hist) distinct[std::to_string(k)] = v;
  return {{"n_images", report.n_images},
          {"n_cones", report.n_cones},
          {"cones_per_image", report.cones_per_image},
          {"distinct_classes_hist", std::move(distinct)},
          {"objects_per_image_hist", buckets(report.objects_per_image_hist)},
          {"class_combination_counts", report.class_combination_counts},
          {"relative_box_area_hist", buckets(report.relative_box_area_hist)},
          {"tag_counts", report.tag_counts},
          {"class_counts", report.class_counts}};
}

json to_json(const EvalReport& report) {
  json per = json::object();
  for (const auto& [t, r] : report.per_threshold) {
    json curve = json::array();
    for (const auto& p : r.curve) curve.push_back({p.precision, p.recall});
    json entry = {{"ap", r.ap}, {"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn},
                  {"precision_recall_curve", std::move(curve)}};
    if (report.mode == EvalMode::per_class) entry["per_class_ap"] = r.per_class_ap;
    per[threshold_key(t)] = std::move(entry);
  }
  return {{"mode", eval_mode_name(report.mode)},
          {"n_gt", report.n_gt},
          {"n_detections", report.n_detections},
          {"per_threshold", std::move(per)}};
}

json to_json(const ScoreReport& report) {
  auto entry = [](const ScoreEntry& e) {
    json scores = json::object();
    for (const auto& [t, s] : e.scores) scores[threshold_key(t)] = s;
    return json{{"n_images", e.n_images}, {"scores", std::move(scores)}};
  };
  json local = json::object();
  for (const auto& [id, e] : report.per_dataset) local[id] = entry(e);
  return {{"thresholds", report.thresholds}, {"per_dataset", std::move(local)},
          {"global", entry(report.global)}};
}

}  // namespace conekit
