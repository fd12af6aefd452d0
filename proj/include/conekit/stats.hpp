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

#ifndef CONEKIT_STATS_HPP
#define CONEKIT_STATS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "conekit/core.hpp"

namespace conekit {

struct StatsConfig {
  bool include_other = false;
  // Class combinations seen in fewer than this fraction of images fold into "other".
  double min_combination_fraction = 0.01;
};

struct HistogramBucket {
  std::string label;
  std::uint64_t count = 0;
};

struct StatsReport {
  std::uint64_t n_images = 0;
  std::uint64_t n_cones = 0;
  double cones_per_image = 0;
  std::map<int, std::uint64_t> distinct_classes_hist;  // k distinct classes -> images
  std::vector<HistogramBucket> objects_per_image_hist;  // 0-4, 5-9, ..., 95-99, 100+
  std::map<std::string, std::uint64_t> class_combination_counts;
  std::vector<HistogramBucket> relative_box_area_hist;  // decades from 1e-5 to 1
  std::map<std::string, std::uint64_t> tag_counts;
  std::map<std::string, std::uint64_t> class_counts;
};

/**
 * Partial aggregate over a slice of images. Merging is associative, so
 * slices can be folded in parallel and combined in a fixed order.
 */
class StatsAccumulator {
 public:
  explicit StatsAccumulator(StatsConfig config = {});

  void add(const AnnotatedImage& img);
  void merge(const StatsAccumulator& other);
  StatsReport finish() const;

 private:
  StatsConfig config_;
  std::uint64_t n_images_ = 0;
  std::uint64_t n_cones_ = 0;
  std::map<int, std::uint64_t> distinct_;
  std::vector<std::uint64_t> objects_;
  std::map<std::string, std::uint64_t> combos_;
  std::vector<std::uint64_t> areas_;
  std::map<std::string, std::uint64_t> tags_;
  std::map<std::string, std::uint64_t> classes_;
};

/// Throws ContractError for an empty dataset.
StatsReport compute_stats(std::span<const AnnotatedImage> dataset, const StatsConfig& config = {},
                          unsigned jobs = 1);

/// Index of the relative-area bucket for `ratio`.
std::size_t relative_area_bucket(double ratio);
/// Index of the objects-per-image bucket for `count`.
std::size_t objects_bucket(std::uint64_t count);

/// CSV with header `histogram,bucket,count`.
std::string stats_csv(const StatsReport& report);

}  // namespace conekit

#endif  // CONEKIT_STATS_HPP
