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

#include "conekit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "conekit/error.hpp"
#include "conekit/parallel.hpp"

namespace conekit {

namespace {

constexpr std::size_t kObjectBuckets = 21;  // 20 of width 5, then overflow
// Upper edges of the relative-area buckets; the last bucket is [0.1, 1].
constexpr double kAreaEdges[] = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
constexpr std::size_t kAreaBuckets = std::size(kAreaEdges) + 1;

std::string object_bucket_label(std::size_t i) {
  if (i + 1 == kObjectBuckets) return "100+";
  return std::to_string(i * 5) + "-" + std::to_string(i * 5 + 4);
}

std::string area_bucket_label(std::size_t i) {
  static const char* labels[] = {"<1e-5", "1e-5..1e-4", "1e-4..1e-3",
                                 "1e-3..1e-2", "1e-2..1e-1", "1e-1..1"};
  return labels[i];
}

}  // namespace

std::size_t relative_area_bucket(double ratio) {
  std::size_t i = 0;
  while (i < std::size(kAreaEdges) && ratio >= kAreaEdges[i]) ++i;
  return i;
}

std::size_t objects_bucket(std::uint64_t count) {
  return std::min<std::uint64_t>(count / 5, kObjectBuckets - 1);
}

StatsAccumulator::StatsAccumulator(StatsConfig config)
    : config_(config), objects_(kObjectBuckets), areas_(kAreaBuckets) {}

void StatsAccumulator::add(const AnnotatedImage& img) {
  ++n_images_;
  std::set<ConeClass> present;
  std::uint64_t counted = 0;
  const double frame = static_cast<double>(img.width) * img.height;
  for (const auto& obj : img.objects) {
    if (obj.cls == ConeClass::other && !config_.include_other) continue;
    ++counted;
    present.insert(obj.cls);
    ++classes_[std::string(class_short_name(obj.cls))];
    for (auto t : obj.tags) ++tags_[std::string(tag_label(t))];
    if (frame > 0 && obj.box.is_valid()) ++areas_[relative_area_bucket(obj.box.area() / frame)];
  }
  n_cones_ += counted;
  ++distinct_[static_cast<int>(present.size())];
  ++objects_[objects_bucket(counted)];
  std::string key;
  for (auto cls : present) {
    if (!key.empty()) key += "+";
    key += class_short_name(cls);
  }
  ++combos_[key.empty() ? "none" : key];
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  n_images_ += other.n_images_;
  n_cones_ += other.n_cones_;
  for (const auto& [k, v] : other.distinct_) distinct_[k] += v;
  for (std::size_t i = 0; i < objects_.size(); ++i) objects_[i] += other.objects_[i];
  for (const auto& [k, v] : other.combos_) combos_[k] += v;
  for (std::size_t i = 0; i < areas_.size(); ++i) areas_[i] += other.areas_[i];
  for (const auto& [k, v] : other.tags_) tags_[k] += v;
  for (const auto& [k, v] : other.classes_) classes_[k] += v;
}

StatsReport StatsAccumulator::finish() const {
  StatsReport r;
  r.n_images = n_images_;
  r.n_cones = n_cones_;
  r.cones_per_image = n_images_ ? static_cast<double>(n_cones_) / n_images_ : 0.0;
  r.distinct_classes_hist = distinct_;
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    r.objects_per_image_hist.push_back({object_bucket_label(i), objects_[i]});
  }
  for (std::size_t i = 0; i < areas_.size(); ++i) {
    r.relative_box_area_hist.push_back({area_bucket_label(i), areas_[i]});
  }
  const double min_count = config_.min_combination_fraction * static_cast<double>(n_images_);
  for (const auto& [k, v] : combos_) {
    if (static_cast<double>(v) < min_count) {
      r.class_combination_counts["other"] += v;
    } else {
      r.class_combination_counts[k] += v;
    }
  }
  r.tag_counts = tags_;
  r.class_counts = classes_;
  return r;
}

StatsReport compute_stats(std::span<const AnnotatedImage> dataset, const StatsConfig& config,
                          unsigned jobs) {
  if (dataset.empty()) throw ContractError("statistics of an empty dataset");
  // Fixed chunking keeps the merge order independent of the worker count.
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (dataset.size() + kChunk - 1) / kChunk;
  std::vector<StatsAccumulator> partial(chunks, StatsAccumulator(config));
  parallel_for(chunks, jobs, [&](std::size_t c) {
    const std::size_t end = std::min(dataset.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) partial[c].add(dataset[i]);
  });
  StatsAccumulator total(config);
  for (const auto& p : partial) total.merge(p);
  return total.finish();
}

std::string stats_csv(const StatsReport& report) {
  std::ostringstream out;
  out << "histogram,bucket,count\n";
  for (const auto& [k, v] : report.distinct_classes_hist) out << "distinct_classes," << k << "," << v << "\n";
  for (const auto& b : report.objects_per_image_hist) out << "objects_per_image," << b.label << "," << b.count << "\n";
  for (const auto& [k, v] : report.class_combination_counts) out << "class_combination," << k << "," << v << "\n";
  for (const auto& b : report.relative_box_area_hist) out << "relative_box_area," << b.label << "," << b.count << "\n";
  for (const auto& [k, v] : report.tag_counts) out << "tag," << k << "," << v << "\n";
  for (const auto& [k, v] : report.class_counts) out << "class," << k << "," << v << "\n";
  return out.str();
}

}  // namespace conekit
