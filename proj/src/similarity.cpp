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

#include "conekit/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <sstream>

#include "conekit/error.hpp"
#include "conekit/parallel.hpp"

namespace conekit {

namespace {

// Squared L2 norm. Kept squared so that identical vectors divide by
// sqrt(s * s) == s exactly and score a cosine of exactly 1.
double norm_of(const std::vector<float>& v) {
  double sum = 0;
  for (float x : v) sum += static_cast<double>(x) * x;
  return sum;
}

double dot_of(const std::vector<float>& a, const std::vector<float>& b) {
  double sum = 0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += static_cast<double>(a[k]) * b[k];
  return sum;
}

double cosine_from(double dot, double sq_nx, double sq_ny) {
  return std::clamp(dot / std::sqrt(sq_nx * sq_ny), -1.0, 1.0);
}

void require_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ContractError("similarity threshold must lie in (0, 1], got " +
                        std::to_string(threshold));
  }
}

// Validates a feature set and returns per-vector squared norms.
std::vector<double> checked_norms(std::span<const FeatureVector> features) {
  if (features.empty()) throw ContractError("feature set is empty");
  const std::size_t dim = features.front().dim();
  std::vector<double> norms;
  norms.reserve(features.size());
  for (const auto& f : features) {
    if (f.dim() != dim) {
      throw ContractError("feature '" + f.image_ref + "' has dimension " +
                          std::to_string(f.dim()) + ", expected " + std::to_string(dim));
    }
    require_usable(f);
    norms.push_back(norm_of(f.values));
  }
  return norms;
}

// Counts of j != i with cosine >= threshold, row by row, without storing the matrix.
std::vector<std::vector<std::uint64_t>> streaming_counts(std::span<const FeatureVector> features,
                                                         const std::vector<double>& norms,
                                                         std::span<const double> thresholds,
                                                         unsigned jobs) {
  const std::size_t n = features.size();
  std::vector<std::vector<std::uint64_t>> rows(n, std::vector<std::uint64_t>(thresholds.size()));
  parallel_for(n, jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double c =
          cosine_from(dot_of(features[i].values, features[j].values), norms[i], norms[j]);
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        if (c >= thresholds[t]) ++rows[i][t];
      }
    }
  });
  return rows;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string str(std::size_t len, const char* what) {
    need(len, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void need(std::size_t len, const char* what) const {
    if (remaining() < len) throw FormatError(std::string("truncated FSFV file: ") + what, pos_);
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

constexpr char kMagic[4] = {'F', 'S', 'F', 'V'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void require_usable(const FeatureVector& v) {
  for (float x : v.values) {
    if (!std::isfinite(x)) {
      throw ContractError("feature '" + v.image_ref + "' has a non-finite entry");
    }
  }
  if (norm_of(v.values) == 0.0) {
    throw ContractError("feature '" + v.image_ref + "' has zero norm");
  }
}

double cosine(const FeatureVector& x, const FeatureVector& y) {
  if (x.dim() != y.dim()) {
    throw ContractError("dimension mismatch: " + std::to_string(x.dim()) + " vs " +
                        std::to_string(y.dim()));
  }
  require_usable(x);
  require_usable(y);
  return cosine_from(dot_of(x.values, y.values), norm_of(x.values), norm_of(y.values));
}

FeatureVector extract_features(const RasterImage& img, const ExtractorConfig& config,
                               std::string image_ref) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * 3) {
    throw DecodeError("raster '" + image_ref + "' has no decodable pixel data");
  }
  if (config.resize <= 0 || config.tile <= 0 || config.resize % config.tile != 0 ||
      config.orientation_bins <= 0) {
    throw ContractError("extractor resize must be a positive multiple of the tile size");
  }
  const int side = config.resize;
  const std::size_t area = static_cast<std::size_t>(side) * side;

  // Bilinear resize with half-pixel centres; channels scaled to [0, 1].
  std::vector<double> rgb(area * 3);
  auto sample_axis = [](int dst, int dst_size, int src_size, int& lo, int& hi, double& frac) {
    double s = (dst + 0.5) * src_size / dst_size - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src_size - 1));
    lo = static_cast<int>(std::floor(s));
    hi = std::min(lo + 1, src_size - 1);
    frac = s - lo;
  };
  for (int y = 0; y < side; ++y) {
    int y0, y1;
    double fy;
    sample_axis(y, side, img.height, y0, y1, fy);
    for (int x = 0; x < side; ++x) {
      int x0, x1;
      double fx;
      sample_axis(x, side, img.width, x0, x1, fx);
      for (int c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0)[c] * (1 - fx) + img.at(x1, y0)[c] * fx;
        const double bottom = img.at(x0, y1)[c] * (1 - fx) + img.at(x1, y1)[c] * fx;
        rgb[(static_cast<std::size_t>(y) * side + x) * 3 + c] = (top * (1 - fy) + bottom * fy) / 255.0;
      }
    }
  }

  std::vector<double> intensity(area);
  for (std::size_t i = 0; i < area; ++i) {
    intensity[i] = 0.299 * rgb[i * 3] + 0.587 * rgb[i * 3 + 1] + 0.114 * rgb[i * 3 + 2];
  }
  auto I = [&](int x, int y) {
    x = std::clamp(x, 0, side - 1);
    y = std::clamp(y, 0, side - 1);
    return intensity[static_cast<std::size_t>(y) * side + x];
  };

  const int tiles = side / config.tile;
  const int bins = config.orientation_bins;
  const int per_tile = 4 + bins;
  const double bin_width = 2 * std::numbers::pi / bins;
  std::vector<double> out(static_cast<std::size_t>(tiles) * tiles * per_tile, 0.0);
  const double count = static_cast<double>(config.tile) * config.tile;

  for (int ty = 0; ty < tiles; ++ty) {
    for (int tx = 0; tx < tiles; ++tx) {
      double* cell = out.data() + (static_cast<std::size_t>(ty) * tiles + tx) * per_tile;
      double sum_i = 0, sum_i2 = 0;
      for (int y = ty * config.tile; y < (ty + 1) * config.tile; ++y) {
        for (int x = tx * config.tile; x < (tx + 1) * config.tile; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * side + x;
          cell[0] += rgb[p * 3];
          cell[1] += rgb[p * 3 + 1];
          cell[2] += rgb[p * 3 + 2];
          sum_i += intensity[p];
          sum_i2 += intensity[p] * intensity[p];
          const double gx = (I(x + 1, y) - I(x - 1, y)) / 2;
          const double gy = (I(x, y + 1) - I(x, y - 1)) / 2;
          const double mag = std::hypot(gx, gy);
          if (mag == 0.0) continue;
          double angle = std::atan2(gy, gx);
          if (angle < 0) angle += 2 * std::numbers::pi;
          const int bin = std::min(static_cast<int>(angle / bin_width), bins - 1);
          cell[4 + bin] += mag;
        }
      }
      cell[0] /= count;
      cell[1] /= count;
      cell[2] /= count;
      const double mean = sum_i / count;
      cell[3] = std::sqrt(std::max(0.0, sum_i2 / count - mean * mean));
    }
  }

  double norm = 0;
  for (double v : out) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    throw ContractError("image '" + image_ref + "' yields an all-zero feature vector");
  }
  FeatureVector fv;
  fv.image_ref = std::move(image_ref);
  fv.values.reserve(out.size());
  for (double v : out) fv.values.push_back(static_cast<float>(v / norm));
  return fv;
}

std::vector<std::uint8_t> encode_features(std::span<const FeatureVector> features) {
  const std::size_t dim = features.empty() ? 0 : features.front().dim();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(features.size()));
  put_u32(out, static_cast<std::uint32_t>(dim));
  for (const auto& f : features) {
    if (f.dim() != dim) throw ContractError("FSFV requires a uniform dimension");
    put_u32(out, static_cast<std::uint32_t>(f.image_ref.size()));
    out.insert(out.end(), f.image_ref.begin(), f.image_ref.end());
    for (float v : f.values) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put_u32(out, bits);
    }
  }
  return out;
}

std::vector<FeatureVector> decode_features(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad FSFV magic", 0);
  in.str(4, "magic");
  const std::size_t version_at = in.pos();
  if (in.u32("version") != kVersion) throw FormatError("unsupported FSFV version", version_at);
  const std::uint32_t count = in.u32("count");
  const std::uint32_t dim = in.u32("dim");
  std::vector<FeatureVector> out;
  for (std::uint32_t r = 0; r < count; ++r) {
    FeatureVector f;
    const std::uint32_t len = in.u32("name length");
    f.image_ref = in.str(len, "name");
    in.need(static_cast<std::size_t>(dim) * 4, "vector values");
    f.values.resize(dim);
    for (std::uint32_t k = 0; k < dim; ++k) {
      const std::uint32_t bits = in.u32("value");
      std::memcpy(&f.values[k], &bits, 4);
    }
    out.push_back(std::move(f));
  }
  if (in.remaining() != 0) throw FormatError("trailing bytes after last FSFV record", in.pos());
  return out;
}

void save_features(std::span<const FeatureVector> features, const std::filesystem::path& path) {
  const auto bytes = encode_features(features);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<FeatureVector> load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  return decode_features(bytes);
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> order, std::vector<double> entries)
    : order_(std::move(order)), entries_(std::move(entries)) {
  if (entries_.size() != order_.size() * order_.size()) {
    throw ContractError("similarity matrix entry count does not match its order");
  }
}

SimilarityMatrix similarity_matrix(std::span<const FeatureVector> features,
                                   const SimilarityOptions& options) {
  const auto norms = checked_norms(features);
  const std::size_t n = features.size();
  if (static_cast<double>(n) * n * sizeof(double) > static_cast<double>(options.matrix_memory_cap)) {
    throw ContractError("a " + std::to_string(n) + "x" + std::to_string(n) +
                        " matrix exceeds the configured memory cap");
  }
  std::vector<double> entries(n * n);
  parallel_for(n, options.jobs, [&](std::size_t i) {
    entries[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      entries[i * n + j] =
          cosine_from(dot_of(features[i].values, features[j].values), norms[i], norms[j]);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) entries[i * n + j] = entries[j * n + i];
  }
  std::vector<std::string> order;
  order.reserve(n);
  for (const auto& f : features) order.push_back(f.image_ref);
  return {std::move(order), std::move(entries)};
}

double duplicate_score(const SimilarityMatrix& matrix, double threshold) {
  require_threshold(threshold);
  const std::size_t n = matrix.size();
  if (n == 0) throw ContractError("duplicate score of an empty matrix");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && matrix.at(i, j) >= threshold) ++total;
    }
  }
  return static_cast<double>(total) / static_cast<double>(n);
}

std::vector<double> duplicate_scores(std::span<const FeatureVector> features,
                                     std::span<const double> thresholds,
                                     const SimilarityOptions& options) {
  for (double t : thresholds) require_threshold(t);
  const auto norms = checked_norms(features);
  const std::size_t n = features.size();
  std::vector<double> scores;
  if (static_cast<double>(n) * n * sizeof(double) <= static_cast<double>(options.matrix_memory_cap)) {
    const auto matrix = similarity_matrix(features, options);
    for (double t : thresholds) scores.push_back(duplicate_score(matrix, t));
    return scores;
  }
  const auto rows = streaming_counts(features, norms, thresholds, options.jobs);
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    std::uint64_t total = 0;
    for (const auto& row : rows) total += row[t];
    scores.push_back(static_cast<double>(total) / static_cast<double>(n));
  }
  return scores;
}

ScoreReport score_report(const std::map<std::string, std::vector<FeatureVector>>& datasets,
                         std::span<const double> thresholds, const SimilarityOptions& options) {
  if (datasets.empty()) throw ContractError("no datasets to score");
  ScoreReport report;
  report.thresholds.assign(thresholds.begin(), thresholds.end());
  std::vector<FeatureVector> all;
  for (const auto& [id, features] : datasets) {
    if (features.empty()) throw ContractError("dataset '" + id + "' is empty");
    ScoreEntry entry;
    entry.n_images = features.size();
    const auto scores = duplicate_scores(features, thresholds, options);
    for (std::size_t t = 0; t < thresholds.size(); ++t) entry.scores[thresholds[t]] = scores[t];
    report.per_dataset[id] = std::move(entry);
    all.insert(all.end(), features.begin(), features.end());
  }
  report.global.n_images = all.size();
  const auto scores = duplicate_scores(all, thresholds, options);
  for (std::size_t t = 0; t < thresholds.size(); ++t) report.global.scores[thresholds[t]] = scores[t];
  return report;
}

std::string score_report_csv(const ScoreReport& report) {
  std::ostringstream out;
  out << "scope,dataset_id,threshold,score,n_images\n";
  auto rows = [&](const char* scope, const std::string& id, const ScoreEntry& e) {
    for (const auto& [t, s] : e.scores) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s,%s,%.4f,%.6f,%zu\n", scope, id.c_str(), t, s, e.n_images);
      out << buf;
    }
  };
  for (const auto& [id, entry] : report.per_dataset) rows("local", id, entry);
  rows("global", "", report.global);
  return out.str();
}

std::vector<std::size_t> sample_diverse(std::span<const FeatureVector> features,
                                        double threshold) {
  require_threshold(threshold);
  if (features.empty()) return {};
  const auto norms = checked_norms(features);
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return features[a].image_ref < features[b].image_ref;
  });
  std::vector<std::size_t> kept;
  for (std::size_t candidate : order) {
    const bool novel = std::none_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return cosine_from(dot_of(features[candidate].values, features[k].values), norms[candidate],
                         norms[k]) >= threshold;
    });
    if (novel) kept.push_back(candidate);
  }
  return kept;
}

}  // namespace conekit
