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

#ifndef CONEKIT_EVAL_HPP
#define CONEKIT_EVAL_HPP

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conekit/core.hpp"

/**
 * @file eval.hpp
 * @brief Detection evaluation: greedy IoU matching and all-points AP.
 */

namespace conekit {

struct Detection {
  std::string image_ref;
  BoundingBox box;
  ConeClass cls = ConeClass::other;
  double confidence = 0;
};

enum class EvalMode { class_agnostic, per_class };

std::string_view eval_mode_name(EvalMode mode);

/**
 * TP/FP flag per detection, aligned with `dets`.
 *
 * Within an image detections are visited by descending confidence (ties by
 * input order). A detection is a true positive iff its best-IoU unmatched
 * ground truth (same class in per_class mode) reaches `iou_thr`; that ground
 * truth is then consumed.
 */
std::vector<bool> match_detections(std::span<const Detection> dets,
                                   std::span<const AnnotatedImage> gts, double iou_thr,
                                   EvalMode mode = EvalMode::class_agnostic, unsigned jobs = 1);

struct PrPoint {
  double precision = 0;
  double recall = 0;
};

/// Cumulative precision/recall after each ranked detection.
std::vector<PrPoint> precision_recall_curve(const std::vector<bool>& ranked_flags, std::size_t n_gt);

/// Area under the monotone precision envelope. `ranked_flags` must already be
/// sorted by descending confidence. Throws ContractError when n_gt == 0.
double average_precision(const std::vector<bool>& ranked_flags, std::size_t n_gt);

struct ThresholdResult {
  double ap = 0;
  std::vector<PrPoint> curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::map<std::string, double> per_class_ap;  // per_class mode only
};

struct EvalReport {
  EvalMode mode = EvalMode::class_agnostic;
  std::size_t n_gt = 0;
  std::size_t n_detections = 0;
  std::map<double, ThresholdResult> per_threshold;
};

std::vector<double> default_iou_thresholds();  // 0.50 to 0.90, step 0.05

EvalReport ap_sweep(std::span<const Detection> dets, std::span<const AnnotatedImage> gts,
                    std::span<const double> thresholds,
                    EvalMode mode = EvalMode::class_agnostic, unsigned jobs = 1);

/// CSV with header `iou_threshold,rank,precision,recall`.
std::string pr_curve_csv(const EvalReport& report);

/// Darknet results text: `image class confidence cx cy w h` per line, box
/// normalized to the image size found in `gts`.
std::vector<Detection> parse_darknet_results(std::string_view text,
                                             std::span<const AnnotatedImage> gts);

/// JSON list of `{image, class, confidence, box:[x_min,y_min,x_max,y_max]}`;
/// `class` may be a class label or a darknet index.
std::vector<Detection> parse_detections_json(std::string_view text);

}  // namespace conekit

#endif  // CONEKIT_EVAL_HPP
