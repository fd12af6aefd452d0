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

#ifndef CONEKIT_TESTS_TEST_SUPPORT_HPP
#define CONEKIT_TESTS_TEST_SUPPORT_HPP

// Shared fixtures, random generators and brute-force oracles for the test
// binaries. Oracles here never call into the code paths they check.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "conekit/core.hpp"
#include "conekit/dataset.hpp"
#include "conekit/formats.hpp"
#include "conekit/imaging.hpp"
#include "conekit/similarity.hpp"

namespace conekit::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("conekit-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string sample_name(int i, const std::string& team = "team-a") {
  return ImageName{team, i, "png"}.render();
}

inline BoundingBox random_box(std::mt19937_64& rng, int width, int height, double min_side = 1.0) {
  std::uniform_real_distribution<double> ux(0.0, width - min_side);
  std::uniform_real_distribution<double> uy(0.0, height - min_side);
  const double x0 = ux(rng), y0 = uy(rng);
  std::uniform_real_distribution<double> uw(min_side, std::min<double>(width - x0, 200.0));
  std::uniform_real_distribution<double> uh(min_side, std::min<double>(height - y0, 200.0));
  return {x0, y0, std::min<double>(width, x0 + uw(rng)), std::min<double>(height, y0 + uh(rng))};
}

inline AnnotatedImage random_annotation(std::mt19937_64& rng, const std::string& name,
                                        int max_objects = 8) {
  AnnotatedImage img;
  img.name = name;
  std::uniform_int_distribution<int> dim(64, 2048);
  img.width = dim(rng);
  img.height = dim(rng);
  std::uniform_int_distribution<int> count(0, max_objects);
  std::uniform_int_distribution<int> cls(0, 4);
  std::bernoulli_distribution coin(0.3);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    LabeledObject obj;
    obj.cls = *class_from_index(cls(rng));
    obj.box = random_box(rng, img.width, img.height);
    for (auto t : kAllTags) {
      if (coin(rng)) obj.tags.insert(t);
    }
    img.objects.push_back(obj);
  }
  return img;
}

inline std::vector<float> random_unit_values(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(n(rng));
  return v;
}

inline FeatureVector make_feature(const std::string& name, std::vector<float> values) {
  return FeatureVector{name, std::move(values)};
}

// Brute-force cosine: plain scalar loops in long double.
inline double oracle_cosine(const std::vector<float>& a, const std::vector<float>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += static_cast<long double>(a[k]) * b[k];
    na += static_cast<long double>(a[k]) * a[k];
    nb += static_cast<long double>(b[k]) * b[k];
  }
  return static_cast<double>(dot / std::sqrt(na * nb));
}

// Mean count of other vectors at cosine >= t, from the oracle cosine.
inline double oracle_duplicate_score(const std::vector<FeatureVector>& fs, double t) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = 0; j < fs.size(); ++j) {
      if (i != j && oracle_cosine(fs[i].values, fs[j].values) >= t) ++total;
    }
  }
  return static_cast<double>(total) / static_cast<double>(fs.size());
}

/**
 * Reference AP: walks the PR curve point by point, collects each distinct
 * recall level and, for each, the best precision achieved at any recall at or
 * above it. AP = sum over recall levels of (r_k - r_{k-1}) * that precision.
 */
inline double oracle_average_precision(const std::vector<bool>& ranked, std::size_t n_gt) {
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  std::size_t tp = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    tp += ranked[i] ? 1 : 0;
    points.emplace_back(static_cast<double>(tp) / n_gt, static_cast<double>(tp) / (i + 1));
  }
  std::vector<double> levels;
  for (const auto& p : points) levels.push_back(p.first);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double ap = 0, prev = 0;
  for (double r : levels) {
    if (r == 0) continue;
    double best = 0;
    for (const auto& p : points) {
      if (p.first >= r) best = std::max(best, p.second);
    }
    ap += (r - prev) * best;
    prev = r;
  }
  return ap;
}

// Deterministic textured test picture (not rotation-symmetric).
inline RasterImage test_pattern(int w, int h, int seed = 0) {
  RasterImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto* px = img.at(x, y);
      px[0] = static_cast<std::uint8_t>((x * 7 + seed * 13) % 256);
      px[1] = static_cast<std::uint8_t>((y * 3 + x / 4) % 256);
      px[2] = static_cast<std::uint8_t>(x < w / 3 ? 220 : (y < h / 2 ? 40 : 120));
    }
  }
  return img;
}

inline AnnotatedImage golden_annotation(const std::string& name, int w, int h) {
  AnnotatedImage img;
  img.name = name;
  img.width = w;
  img.height = h;
  img.set_onboard(true);
  LabeledObject blue;
  blue.cls = ConeClass::blue;
  blue.box = {10, 12, 22, 30};
  LabeledObject yellow;
  yellow.cls = ConeClass::yellow;
  yellow.box = {40, 10, 52, 28};
  yellow.tags = {ObjectTag::truncated};
  img.objects = {blue, yellow};
  return img;
}

/// Writes a clean `<root>/<team>/{img,ann}` tree with two teams and returns
/// the annotations written.
inline std::vector<AnnotatedImage> write_golden_tree(const std::filesystem::path& root) {
  std::vector<AnnotatedImage> written;
  const int w = 64, h = 48;
  struct Entry {
    std::string team;
    int number;
    std::string ext;
  };
  const std::vector<Entry> entries = {
      {"team-a", 1, "png"}, {"team-a", 2, "png"}, {"team-b", 1, "jpg"}};
  for (const auto& e : entries) {
    const auto name = ImageName{e.team, e.number, e.ext}.render();
    std::filesystem::create_directories(root / e.team / "img");
    std::filesystem::create_directories(root / e.team / "ann");
    write_image(test_pattern(w, h, e.number), root / e.team / "img" / name);
    auto ann = golden_annotation(name, w, h);
    write_text_file(root / e.team / "ann" / (name + ".json"),
                    write_annotation(ann, FormatId::supervisely_like));
    written.push_back(ann);
  }
  return written;
}

}  // namespace conekit::testing

#endif  // CONEKIT_TESTS_TEST_SUPPORT_HPP
