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

#ifndef CONEKIT_SIMILARITY_HPP
#define CONEKIT_SIMILARITY_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "conekit/imaging.hpp"

/**
 * @file similarity.hpp
 * @brief Image feature vectors, pairwise cosine similarity and duplicate scores.
 *
 * The cosine-T score of a set is the mean, over all images, of the number of
 * other images whose cosine similarity is at least T. A score of 5 at T = 0.99
 * means every image has on average five near-copies in the set.
 */

namespace conekit {

inline constexpr std::size_t kFeatureDim = 4096;

struct FeatureVector {
  std::string image_ref;
  std::vector<float> values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const FeatureVector&) const = default;
};

/// Throws ContractError for non-finite entries or zero norm.
void require_usable(const FeatureVector& v);

double cosine(const FeatureVector& x, const FeatureVector& y);

// ---------------------------------------------------------------------------
// Built-in extractor

struct ExtractorConfig {
  int resize = 128;  // square working resolution
  int tile = 8;      // tile edge in pixels
  int orientation_bins = 12;
};

/**
 * Deterministic tiled descriptor: bilinear resize, then per tile
 * [mean R, mean G, mean B, intensity stddev, magnitude-weighted orientation
 * histogram], concatenated and L2-normalized. The default config yields
 * 16 x 16 tiles x 16 values = 4096 entries.
 */
FeatureVector extract_features(const RasterImage& img, const ExtractorConfig& config = {},
                               std::string image_ref = {});

// ---------------------------------------------------------------------------
// FSFV container: "FSFV", u32 version = 1, u32 count, u32 dim, then per record
// u32 name length + UTF-8 name + dim little-endian float32. All integers LE.

std::vector<std::uint8_t> encode_features(std::span<const FeatureVector> features);
std::vector<FeatureVector> decode_features(std::span<const std::uint8_t> bytes);
void save_features(std::span<const FeatureVector> features, const std::filesystem::path& path);
std::vector<FeatureVector> load_features(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Matrix and scores

class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::vector<std::string> order, std::vector<double> entries);

  std::size_t size() const { return order_.size(); }
  double at(std::size_t i, std::size_t j) const { return entries_[i * order_.size() + j]; }
  const std::vector<std::string>& order() const { return order_; }

 private:
  std::vector<std::string> order_;
  std::vector<double> entries_;  // row-major n x n
};

struct SimilarityOptions {
  unsigned jobs = 1;
  std::uint64_t matrix_memory_cap = 2ull << 30;  // bytes
};

SimilarityMatrix similarity_matrix(std::span<const FeatureVector> features,
                                   const SimilarityOptions& options = {});

/// (1/n) * sum_i |{ j != i : entry(i,j) >= threshold }|
double duplicate_score(const SimilarityMatrix& matrix, double threshold);

/// Scores for several thresholds, materializing the matrix only when it fits
/// under `options.matrix_memory_cap`. Same result either way.
std::vector<double> duplicate_scores(std::span<const FeatureVector> features,
                                     std::span<const double> thresholds,
                                     const SimilarityOptions& options = {});

inline const std::vector<double> kDefaultScoreThresholds = {0.95, 0.98, 0.99};

struct ScoreEntry {
  std::size_t n_images = 0;
  std::map<double, double> scores;  // threshold -> mean duplicate count
};

struct ScoreReport {
  std::vector<double> thresholds;
  std::map<std::string, ScoreEntry> per_dataset;
  ScoreEntry global;
};

/// Local scores per dataset plus the global score over the union.
ScoreReport score_report(const std::map<std::string, std::vector<FeatureVector>>& datasets,
                         std::span<const double> thresholds = kDefaultScoreThresholds,
                         const SimilarityOptions& options = {});

/// CSV with header `scope,dataset_id,threshold,score,n_images`.
std::string score_report_csv(const ScoreReport& report);

/**
 * Greedy thresholded sampling in lexicographic image_ref order: an image is
 * kept iff its cosine to every previously kept image is below `threshold`.
 * Returns kept indices into `features`, in visiting order.
 */
std::vector<std::size_t> sample_diverse(std::span<const FeatureVector> features,
                                        double threshold);

}  // namespace conekit

#endif  // CONEKIT_SIMILARITY_HPP
