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

#ifndef CONEKIT_CONFIG_HPP
#define CONEKIT_CONFIG_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conekit/eval.hpp"
#include "conekit/formats.hpp"
#include "conekit/quality.hpp"
#include "conekit/similarity.hpp"
#include "conekit/stats.hpp"
#include "json.hpp"

namespace conekit {

inline constexpr const char* kEnvPrefix = "CONEKIT_";

/**
 * Effective tool configuration.
 *
 * Layers, later wins: built-in defaults, JSON config file, environment
 * variables `CONEKIT_<SECTION>__<KEY>` and `--set section.key=value`.
 * Values are parsed as JSON and fall back to plain strings. Keys that do not
 * exist in the defaults are rejected.
 */
class ToolConfig {
 public:
  ToolConfig();

  static const nlohmann::json& defaults();

  static ToolConfig load(const std::optional<std::filesystem::path>& file,
                         const std::map<std::string, std::string>& env,
                         const std::vector<std::string>& overrides);

  /// Sets a dotted key, e.g. "sanity.min_box_area". Throws ContractError.
  void set(const std::string& dotted_key, const nlohmann::json& value);
  void set_from_text(const std::string& dotted_key, const std::string& text);

  const nlohmann::json& doc() const { return doc_; }
  const nlohmann::json& at(const std::string& dotted_key) const;

  LayoutOptions layout() const;
  SanityConfig sanity() const;
  Severity sanity_fail_on() const;
  ExamConfig exam() const;
  ContributionConfig contribution() const;
  StatsConfig stats() const;
  SimilarityOptions similarity_options() const;
  std::vector<double> score_thresholds() const;
  double sample_threshold() const;
  std::vector<double> eval_thresholds() const;
  EvalMode eval_mode() const;
  int crop_border() const;
  unsigned jobs() const;
  bool timestamp() const;

 private:
  nlohmann::json doc_;
};

}  // namespace conekit

#endif  // CONEKIT_CONFIG_HPP
