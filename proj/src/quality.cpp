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

#include "conekit/quality.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "conekit/error.hpp"
#include "conekit/parallel.hpp"

namespace conekit {

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double safe_iou(const BoundingBox& a, const BoundingBox& b) {
  if (!a.is_valid() || !b.is_valid()) return 0.0;
  return iou(a, b);
}

// Greedy one-to-one assignment by descending IoU; ties by (gt, pred) index.
std::vector<MatchedPair> greedy_match(const std::vector<const BoundingBox*>& gts,
                                      const std::vector<std::size_t>& gt_ids,
                                      const std::vector<const BoundingBox*>& preds,
                                      const std::vector<std::size_t>& pred_ids, double min_iou) {
  std::vector<MatchedPair> candidates;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    for (std::size_t p = 0; p < preds.size(); ++p) {
      const double v = safe_iou(*gts[g], *preds[p]);
      if (v >= min_iou && v > 0.0) candidates.push_back({gt_ids[g], pred_ids[p], v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    return std::tie(a.gt, a.pred) < std::tie(b.gt, b.pred);
  });
  std::set<std::size_t> used_gt, used_pred;
  std::vector<MatchedPair> out;
  for (const auto& c : candidates) {
    if (used_gt.count(c.gt) || used_pred.count(c.pred)) continue;
    used_gt.insert(c.gt);
    used_pred.insert(c.pred);
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.gt < b.gt; });
  return out;
}

std::string tags_text(const TagSet& tags) {
  if (tags.empty()) return "{}";
  std::string out = "{";
  for (auto t : tags) {
    if (out.size() > 1) out += ",";
    out += tag_label(t);
  }
  return out + "}";
}

}  // namespace

std::string_view sanity_rule_name(SanityRule rule) {
  switch (rule) {
    case SanityRule::dim_mismatch: return "dim_mismatch";
    case SanityRule::duplicate_object: return "duplicate_object";
    case SanityRule::orphan_pair: return "orphan_pair";
    case SanityRule::out_of_bounds: return "out_of_bounds";
    case SanityRule::tiny_box: return "tiny_box";
    case SanityRule::unknown_class: return "unknown_class";
    case SanityRule::zero_area: return "zero_area";
  }
  return "?";
}

std::string_view severity_name(Severity severity) {
  return severity == Severity::error ? "error" : "warning";
}

std::vector<SanityFinding> sanity_check(std::span<const AnnotatedImage> dataset,
                                        const SanityConfig& config,
                                        const ImageInventory* inventory) {
  std::vector<SanityFinding> findings;
  auto add = [&](const std::string& image, std::optional<std::size_t> index, SanityRule rule,
                 Severity severity, std::string message) {
    findings.push_back({image, index, rule, severity, std::move(message)});
  };

  std::set<std::string> annotated;
  for (const auto& img : dataset) {
    annotated.insert(img.name);
    if (inventory) {
      auto it = inventory->find(img.name);
      if (it == inventory->end()) {
        add(img.name, std::nullopt, SanityRule::orphan_pair, Severity::error,
            "annotation has no image file");
      } else if (it->second && *it->second != img.dims()) {
        add(img.name, std::nullopt, SanityRule::dim_mismatch, Severity::error,
            "annotation size " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                " differs from image " + std::to_string(it->second->width) + "x" +
                std::to_string(it->second->height));
      }
    }

    for (std::size_t i = 0; i < img.objects.size(); ++i) {
      const auto& obj = img.objects[i];
      const auto& b = obj.box;
      if (obj.unmapped_class) {
        add(img.name, i, SanityRule::unknown_class, Severity::warning,
            "class '" + *obj.unmapped_class + "' is not part of the taxonomy");
      }
      if (!b.is_valid()) {
        add(img.name, i, SanityRule::zero_area, Severity::error, "box has no area");
        continue;
      }
      if (b.x_min < 0 || b.y_min < 0 || b.x_max > img.width || b.y_max > img.height) {
        add(img.name, i, SanityRule::out_of_bounds, Severity::error,
            "box exceeds the image rectangle");
      }
      if (b.area() < config.min_box_area || b.width() < config.min_box_side ||
          b.height() < config.min_box_side) {
        add(img.name, i, SanityRule::tiny_box, Severity::warning,
            "box " + fixed(b.width(), 1) + "x" + fixed(b.height(), 1) + " px is below the minimum size");
      }
    }
    for (std::size_t i = 0; i < img.objects.size(); ++i) {
      for (std::size_t j = i + 1; j < img.objects.size(); ++j) {
        const auto& a = img.objects[i];
        const auto& b = img.objects[j];
        if (a.cls != b.cls) continue;
        const double v = safe_iou(a.box, b.box);
        if (v > config.duplicate_iou) {
          add(img.name, j, SanityRule::duplicate_object, Severity::warning,
              "overlaps object " + std::to_string(i) + " of the same class (IoU " + fixed(v, 3) + ")");
        }
      }
    }
  }
  if (inventory) {
    for (const auto& [name, dims] : *inventory) {
      if (!annotated.count(name)) {
        add(name, std::nullopt, SanityRule::orphan_pair, Severity::error,
            "image file has no annotation");
      }
    }
  }
  std::stable_sort(findings.begin(), findings.end(), [](const auto& a, const auto& b) {
    return std::tie(a.image_ref, a.object_index, a.rule) <
           std::tie(b.image_ref, b.object_index, b.rule);
  });
  return findings;
}

std::string_view exam_finding_name(ExamFindingKind kind) {
  switch (kind) {
    case ExamFindingKind::missed: return "missed";
    case ExamFindingKind::spurious: return "spurious";
    case ExamFindingKind::mislocalized: return "mislocalized";
    case ExamFindingKind::misclassified: return "misclassified";
    case ExamFindingKind::tag_mismatch: return "tag_mismatch";
  }
  return "?";
}

std::size_t ExamReport::count(ExamFindingKind kind) const {
  std::size_t n = 0;
  for (const auto& img : per_image) {
    n += static_cast<std::size_t>(std::count_if(img.findings.begin(), img.findings.end(),
                                                [&](const auto& f) { return f.kind == kind; }));
  }
  return n;
}

ImageExamResult grade_image(const AnnotatedImage& submission, const AnnotatedImage& ground_truth,
                            const ExamConfig& config) {
  ImageExamResult r;
  r.image_ref = ground_truth.name;
  const auto& gt = ground_truth.objects;
  const auto& pred = submission.objects;

  auto boxes = [](const std::vector<LabeledObject>& objs, const std::vector<std::size_t>& ids) {
    std::vector<const BoundingBox*> out;
    for (auto i : ids) out.push_back(&objs[i].box);
    return out;
  };
  std::vector<std::size_t> gt_ids(gt.size()), pred_ids(pred.size());
  for (std::size_t i = 0; i < gt.size(); ++i) gt_ids[i] = i;
  for (std::size_t i = 0; i < pred.size(); ++i) pred_ids[i] = i;

  r.matched = greedy_match(boxes(gt, gt_ids), gt_ids, boxes(pred, pred_ids), pred_ids,
                           config.match_iou);
  std::vector<bool> gt_used(gt.size()), pred_used(pred.size());
  for (const auto& m : r.matched) {
    gt_used[m.gt] = true;
    pred_used[m.pred] = true;
    if (gt[m.gt].cls != pred[m.pred].cls) r.misclassified.emplace_back(m.gt, m.pred);
    if (gt[m.gt].tags != pred[m.pred].tags) r.tag_mismatch.emplace_back(m.gt, m.pred);
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt_used[i]) r.missed.push_back(i);
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred_used[i]) r.spurious.push_back(i);
  }
  r.mislocalized = greedy_match(boxes(gt, r.missed), r.missed, boxes(pred, r.spurious),
                                r.spurious, config.localization_iou);

  std::set<std::size_t> loc_gt, loc_pred;
  for (const auto& m : r.mislocalized) {
    loc_gt.insert(m.gt);
    loc_pred.insert(m.pred);
  }
  for (auto g : r.missed) {
    if (!loc_gt.count(g)) {
      r.findings.push_back({ExamFindingKind::missed, g, std::nullopt,
                            "ground-truth object " + std::to_string(g) + " (" +
                                std::string(class_label(gt[g].cls)) + ") was not labeled"});
    }
  }
  for (auto p : r.spurious) {
    if (!loc_pred.count(p)) {
      r.findings.push_back({ExamFindingKind::spurious, std::nullopt, p,
                            "labeled object " + std::to_string(p) +
                                " does not correspond to any cone"});
    }
  }
  for (const auto& m : r.mislocalized) {
    r.findings.push_back({ExamFindingKind::mislocalized, m.gt, m.pred,
                          "object " + std::to_string(m.gt) + " box is misplaced (IoU " +
                              fixed(m.iou, 3) + " < " + fixed(config.match_iou, 2) + ")"});
  }
  for (const auto& [g, p] : r.misclassified) {
    r.findings.push_back({ExamFindingKind::misclassified, g, p,
                          "object " + std::to_string(g) + " labeled " +
                              std::string(class_label(pred[p].cls)) + ", expected " +
                              std::string(class_label(gt[g].cls))});
  }
  for (const auto& [g, p] : r.tag_mismatch) {
    r.findings.push_back({ExamFindingKind::tag_mismatch, g, p,
                          "object " + std::to_string(g) + " tags " + tags_text(pred[p].tags) +
                              ", expected " + tags_text(gt[g].tags)});
  }
  return r;
}

ExamReport grade_exam(std::span<const AnnotatedImage> submission,
                      std::span<const AnnotatedImage> ground_truth, const ExamConfig& config,
                      unsigned jobs) {
  std::map<std::string, const AnnotatedImage*> sub, gt;
  for (const auto& img : submission) {
    if (!sub.emplace(img.name, &img).second) {
      throw ContractError("submission lists image '" + img.name + "' twice");
    }
  }
  for (const auto& img : ground_truth) {
    if (!gt.emplace(img.name, &img).second) {
      throw ContractError("ground truth lists image '" + img.name + "' twice");
    }
  }
  std::string diff;
  for (const auto& [name, _] : gt) {
    if (!sub.count(name)) diff += " missing:" + name;
  }
  for (const auto& [name, _] : sub) {
    if (!gt.count(name)) diff += " unexpected:" + name;
  }
  if (!diff.empty()) throw ContractError("submission and ground truth image sets differ:" + diff);

  std::vector<const AnnotatedImage*> gt_list, sub_list;
  for (const auto& [name, img] : gt) {
    gt_list.push_back(img);
    sub_list.push_back(sub.at(name));
  }
  ExamReport report;
  report.per_image.resize(gt_list.size());
  parallel_for(gt_list.size(), jobs, [&](std::size_t i) {
    report.per_image[i] = grade_image(*sub_list[i], *gt_list[i], config);
  });

  std::size_t matched = 0;
  double iou_sum = 0;
  for (std::size_t i = 0; i < gt_list.size(); ++i) {
    report.n_gt += gt_list[i]->objects.size();
    report.n_pred += sub_list[i]->objects.size();
    matched += report.per_image[i].matched.size();
    for (const auto& m : report.per_image[i].matched) iou_sum += m.iou;
  }
  report.recall = report.n_gt ? static_cast<double>(matched) / report.n_gt : 1.0;
  report.precision = report.n_pred ? static_cast<double>(matched) / report.n_pred : 1.0;
  if (matched) {
    report.mean_iou = iou_sum / matched;
  } else {
    report.mean_iou = (report.n_gt == 0 && report.n_pred == 0) ? 1.0 : 0.0;
  }
  if (report.recall < config.min_recall) {
    report.reasons.push_back("recall " + fixed(report.recall) + " < " + fixed(config.min_recall));
  }
  if (report.precision < config.min_precision) {
    report.reasons.push_back("precision " + fixed(report.precision) + " < " +
                             fixed(config.min_precision));
  }
  if (report.mean_iou < config.min_mean_iou) {
    report.reasons.push_back("mean IoU " + fixed(report.mean_iou) + " < " +
                             fixed(config.min_mean_iou));
  }
  report.passed = report.reasons.empty();
  return report;
}

std::string exam_feedback_text(const ExamReport& report) {
  std::ostringstream out;
  out << "verdict: " << (report.passed ? "PASS" : "FAIL") << "\n";
  out << "recall: " << fixed(report.recall) << "  precision: " << fixed(report.precision)
      << "  mean IoU: " << fixed(report.mean_iou) << "\n";
  for (const auto& reason : report.reasons) out << "  failed: " << reason << "\n";
  for (const auto& img : report.per_image) {
    if (img.findings.empty()) continue;
    out << img.image_ref << ":\n";
    for (const auto& f : img.findings) {
      out << "  [" << exam_finding_name(f.kind) << "] " << f.message << "\n";
    }
  }
  return out.str();
}

bool ContributionReport::passed() const {
  return std::all_of(requirements.begin(), requirements.end(),
                     [](const auto& r) { return r.passed; });
}

ContributionReport check_contribution(std::span<const AnnotatedImage> dataset,
                                      std::span<const FeatureVector> features,
                                      const ContributionConfig& config,
                                      const SimilarityOptions& similarity) {
  if (dataset.empty()) throw ContractError("contribution holds no images");
  std::string missing_meta;
  std::size_t onboard = 0;
  for (const auto& img : dataset) {
    const auto flag = img.onboard();
    if (!flag) {
      missing_meta += " " + img.name;
    } else if (*flag) {
      ++onboard;
    }
  }
  if (!missing_meta.empty()) {
    throw ContractError("images without sceneMeta.onboard:" + missing_meta);
  }

  std::map<std::string, const FeatureVector*> by_name;
  for (const auto& f : features) by_name[f.image_ref] = &f;
  std::vector<FeatureVector> subset;
  std::string missing_features;
  for (const auto& img : dataset) {
    auto it = by_name.find(img.name);
    if (it == by_name.end()) {
      missing_features += " " + img.name;
    } else {
      subset.push_back(*it->second);
    }
  }
  if (!missing_features.empty()) {
    throw ContractError("images without feature vectors:" + missing_features);
  }

  ContributionReport report;
  report.onboard_ratio = static_cast<double>(onboard) / static_cast<double>(dataset.size());
  const double threshold[] = {config.similarity_threshold};
  report.local_dup_score = duplicate_scores(subset, threshold, similarity).front();
  report.requirements.push_back({"min_onboard_ratio", config.min_onboard_ratio,
                                 report.onboard_ratio,
                                 report.onboard_ratio >= config.min_onboard_ratio});
  if (config.max_similarity_score) {
    report.requirements.push_back({"max_similarity_score", *config.max_similarity_score,
                                   report.local_dup_score,
                                   report.local_dup_score <= *config.max_similarity_score});
  }
  return report;
}

}  // namespace conekit
