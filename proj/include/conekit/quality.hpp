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

#ifndef CONEKIT_QUALITY_HPP
#define CONEKIT_QUALITY_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conekit/core.hpp"
#include "conekit/similarity.hpp"

namespace conekit {

// ---------------------------------------------------------------------------
// Sanity checks

// Alphabetical, so enum order and name order agree when sorting findings.
enum class SanityRule {
  dim_mismatch,
  duplicate_object,
  orphan_pair,
  out_of_bounds,
  tiny_box,
  unknown_class,
  zero_area,
};

std::string_view sanity_rule_name(SanityRule rule);

enum class Severity { error, warning };

std::string_view severity_name(Severity severity);

struct SanityFinding {
  std::string image_ref;
  std::optional<std::size_t> object_index;
  SanityRule rule;
  Severity severity;
  std::string message;

  bool operator==(const SanityFinding&) const = default;
};

struct SanityConfig {
  double min_box_area = 25.0;  // px^2, tiny below this
  double min_box_side = 3.0;   // px, tiny below this
  double duplicate_iou = 0.9;  // same class and IoU above this
};

/// Image files that exist next to the annotations, with their decoded size
/// when known. Enables the orphan_pair and dim_mismatch rules.
using ImageInventory = std::map<std::string, std::optional<ImageDims>>;

/// Sorted by (image_ref, object_index, rule). Empty iff every rule passes.
std::vector<SanityFinding> sanity_check(std::span<const AnnotatedImage> dataset,
                                        const SanityConfig& config = {},
                                        const ImageInventory* inventory = nullptr);

// ---------------------------------------------------------------------------
// Labeling exam

struct ExamConfig {
  double match_iou = 0.7;
  // Unmatched pairs overlapping at least this much are reported as one
  // misplaced box instead of a miss plus a spurious box.
  double localization_iou = 0.3;
  double min_recall = 0.98;
  double min_precision = 0.98;
  double min_mean_iou = 0.85;
};

struct MatchedPair {
  std::size_t gt = 0;
  std::size_t pred = 0;
  double iou = 0;
};

enum class ExamFindingKind { missed, spurious, mislocalized, misclassified, tag_mismatch };

std::string_view exam_finding_name(ExamFindingKind kind);

struct ExamFinding {
  ExamFindingKind kind;
  std::optional<std::size_t> gt;
  std::optional<std::size_t> pred;
  std::string message;
};

struct ImageExamResult {
  std::string image_ref;
  std::vector<MatchedPair> matched;
  std::vector<std::size_t> missed;
  std::vector<std::size_t> spurious;
  std::vector<std::pair<std::size_t, std::size_t>> misclassified;  // (gt, pred)
  std::vector<std::pair<std::size_t, std::size_t>> tag_mismatch;   // (gt, pred)
  std::vector<MatchedPair> mislocalized;  // subset of missed x spurious
  std::vector<ExamFinding> findings;      // object-level feedback
};

struct ExamReport {
  std::vector<ImageExamResult> per_image;  // sorted by image name
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;
  double recall = 0;
  double precision = 0;
  double mean_iou = 0;
  bool passed = false;
  std::vector<std::string> reasons;  // failed bars, empty when passed

  std::size_t count(ExamFindingKind kind) const;
};

/// Greedy one-to-one matching by descending IoU per image.
ImageExamResult grade_image(const AnnotatedImage& submission, const AnnotatedImage& ground_truth,
                            const ExamConfig& config = {});

/// Throws ContractError when the two name sets differ.
ExamReport grade_exam(std::span<const AnnotatedImage> submission,
                      std::span<const AnnotatedImage> ground_truth, const ExamConfig& config = {},
                      unsigned jobs = 1);

/// Human-readable per-object feedback.
std::string exam_feedback_text(const ExamReport& report);

// ---------------------------------------------------------------------------
// Contribution requirements

struct ContributionConfig {
  double min_onboard_ratio = 0.5;
  double similarity_threshold = 0.99;
  std::optional<double> max_similarity_score;  // no default; rule skipped when unset
};

struct RequirementResult {
  std::string rule;
  double threshold = 0;
  double observed = 0;
  bool passed = false;
};

struct ContributionReport {
  double onboard_ratio = 0;
  double local_dup_score = 0;  // at config.similarity_threshold
  std::vector<RequirementResult> requirements;

  bool passed() const;
};

ContributionReport check_contribution(std::span<const AnnotatedImage> dataset,
                                      std::span<const FeatureVector> features,
                                      const ContributionConfig& config = {},
                                      const SimilarityOptions& similarity = {});

}  // namespace conekit

#endif  // CONEKIT_QUALITY_HPP
