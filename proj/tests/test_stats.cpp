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

#include <numeric>
#include <random>

#include "conekit/error.hpp"
#include "conekit/stats.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace conekit;

namespace {

AnnotatedImage with_classes(const std::string& name, std::vector<ConeClass> classes) {
  AnnotatedImage img;
  img.name = name;
  img.width = 1000;
  img.height = 1000;
  double x = 0;
  for (auto c : classes) {
    LabeledObject obj;
    obj.cls = c;
    obj.box = {x, 0, x + 10, 10};
    x += 20;
    img.objects.push_back(obj);
  }
  return img;
}

template <class Buckets>
std::uint64_t total(const Buckets& bs) {
  std::uint64_t s = 0;
  for (const auto& b : bs) s += b.count;
  return s;
}

}  // namespace

TEST_CASE("stats of three blue and two yellow cones in one image") {
  using C = ConeClass;
  const std::vector imgs{with_classes("a_00001.png", {C::blue, C::blue, C::blue, C::yellow, C::yellow})};
  const auto r = compute_stats(imgs);
  CHECK(r.n_images == 1);
  CHECK(r.n_cones == 5);
  CHECK(r.cones_per_image == 5.0);
  CHECK(r.distinct_classes_hist.at(2) == 1);
  CHECK(r.class_counts.at("blue") == 3);
  CHECK(r.class_counts.at("yellow") == 2);
  CHECK(r.class_combination_counts.at("blue+yellow") == 1);
  CHECK(r.objects_per_image_hist[objects_bucket(5)].label == "5-9");
  CHECK(r.objects_per_image_hist[1].count == 1);
  // 100 px^2 over 1e6 px^2 = 1e-4
  CHECK(r.relative_box_area_hist[relative_area_bucket(1e-4)].count == 5);
}

TEST_CASE("bucket boundaries") {
  CHECK(relative_area_bucket(1.0) == 5);
  CHECK(relative_area_bucket(0.1) == 5);
  CHECK(relative_area_bucket(0.0999) == 4);
  CHECK(relative_area_bucket(1e-6) == 0);
  CHECK(objects_bucket(0) == 0);
  CHECK(objects_bucket(4) == 0);
  CHECK(objects_bucket(99) == 19);
  CHECK(objects_bucket(100) == 20);
  CHECK(objects_bucket(5000) == 20);

  AnnotatedImage full = with_classes("a_00001.png", {ConeClass::blue});
  full.objects[0].box = {0, 0, 1000, 1000};
  const auto r = compute_stats(std::vector{full});
  CHECK(r.relative_box_area_hist.back().count == 1);
  CHECK(r.relative_box_area_hist.back().label == "1e-1..1");
}

TEST_CASE("other-class handling and empty images") {
  using C = ConeClass;
  const std::vector imgs{with_classes("a_00001.png", {C::other, C::blue}),
                         with_classes("a_00002.png", {})};
  const auto r = compute_stats(imgs);
  CHECK(r.n_cones == 1);
  CHECK(r.class_combination_counts.at("none") == 1);
  CHECK(r.distinct_classes_hist.at(0) == 1);
  StatsConfig with_other;
  with_other.include_other = true;
  CHECK(compute_stats(imgs, with_other).n_cones == 2);
  CHECK_THROWS_AS(compute_stats(std::vector<AnnotatedImage>{}), ContractError);
}

TEST_CASE("rare combinations fold into other") {
  using C = ConeClass;
  std::vector<AnnotatedImage> imgs;
  for (int i = 1; i <= 99; ++i) imgs.push_back(with_classes(testing::sample_name(i), {C::blue}));
  imgs.push_back(with_classes(testing::sample_name(100), {C::yellow, C::large_orange}));
  StatsConfig cfg;
  cfg.min_combination_fraction = 0.05;
  const auto r = compute_stats(imgs, cfg);
  CHECK(r.class_combination_counts.at("blue") == 99);
  CHECK(r.class_combination_counts.at("other") == 1);
  CHECK(r.class_combination_counts.count("large_orange+yellow") == 0);
}

TEST_CASE("histograms conserve mass") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<AnnotatedImage> imgs;
    const int n = 1 + trial * 7;
    for (int i = 1; i <= n; ++i) imgs.push_back(testing::random_annotation(rng, testing::sample_name(i), 12));
    StatsConfig cfg;
    cfg.include_other = true;
    const auto r = compute_stats(imgs, cfg);
    CHECK(total(r.objects_per_image_hist) == r.n_images);
    CHECK(total(r.relative_box_area_hist) == r.n_cones);
    std::uint64_t distinct = 0, combos = 0, classes = 0;
    for (const auto& [k, v] : r.distinct_classes_hist) distinct += v;
    for (const auto& [k, v] : r.class_combination_counts) combos += v;
    for (const auto& [k, v] : r.class_counts) classes += v;
    CHECK(distinct == r.n_images);
    CHECK(combos == r.n_images);
    CHECK(classes == r.n_cones);
  }
}

TEST_CASE("merging accumulators equals one pass") {
  std::mt19937_64 rng(45);
  std::vector<AnnotatedImage> imgs;
  for (int i = 1; i <= 300; ++i) imgs.push_back(testing::random_annotation(rng, testing::sample_name(i)));
  StatsAccumulator whole, left, right;
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    whole.add(imgs[i]);
    (i < 123 ? left : right).add(imgs[i]);
  }
  left.merge(right);
  CHECK(stats_csv(left.finish()) == stats_csv(whole.finish()));
  CHECK(stats_csv(compute_stats(imgs, {}, 4)) == stats_csv(whole.finish()));
}

TEST_CASE("stats csv layout") {
  const auto csv = stats_csv(compute_stats(std::vector{with_classes("a_00001.png", {ConeClass::blue})}));
  CHECK(csv.rfind("histogram,bucket,count\n", 0) == 0);
  CHECK(csv.find("class,blue,1\n") != std::string::npos);
}
