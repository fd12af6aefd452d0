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

#include "conekit/config.hpp"

#include <algorithm>
#include <cctype>

#include "conekit/dataset.hpp"
#include "conekit/error.hpp"

namespace conekit {

using nlohmann::json;

namespace {

std::vector<std::string> split_key(const std::string& dotted) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    parts.push_back(dotted.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return parts;
}

bool compatible(const json& def, const json& value) {
  if (def.is_null()) return value.is_null() || value.is_number();
  if (def.is_number()) return value.is_number();
  if (def.is_array()) {
    return value.is_array() &&
           std::all_of(value.begin(), value.end(), [](const json& v) { return v.is_number(); });
  }
  return def.type() == value.type();
}

void merge_into(json& target, const json& patch, const json& defaults, const std::string& prefix) {
  if (!patch.is_object()) throw ContractError("config section '" + prefix + "' must be an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) throw ContractError("unknown config key '" + path + "'");
    const json& def = defaults.at(key);
    if (def.is_object()) {
      merge_into(target[key], value, def, path);
    } else if (!compatible(def, value)) {
      throw ContractError("config key '" + path + "' expects " + std::string(def.type_name()) +
                          ", got " + std::string(value.type_name()));
    } else {
      target[key] = value;
    }
  }
}

}  // namespace

const json& ToolConfig::defaults() {
  static const json d = {
      {"jobs", 1},
      {"layout", {{"image_dir", "img"}, {"annotation_dir", "ann"}}},
      {"similarity",
       {{"thresholds", {0.95, 0.98, 0.99}},
        {"sample_threshold", 0.99},
        {"matrix_memory_cap_bytes", 2147483648.0}}},
      {"sanity",
       {{"min_box_area", 25.0},
        {"min_box_side", 3.0},
        {"duplicate_iou", 0.9},
        {"fail_on", "warning"}}},
      {"exam",
       {{"match_iou", 0.7},
        {"localization_iou", 0.3},
        {"min_recall", 0.98},
        {"min_precision", 0.98},
        {"min_mean_iou", 0.85}}},
      {"contribution",
       {{"min_onboard_ratio", 0.5},
        {"similarity_threshold", 0.99},
        {"max_similarity_score", nullptr}}},
      {"stats", {{"include_other", false}, {"min_combination_fraction", 0.01}}},
      {"eval",
       {{"thresholds", {0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9}},
        {"mode", "class_agnostic"}}},
      {"crop", {{"border", 140}}},
      {"report", {{"timestamp", false}}},
  };
  return d;
}

ToolConfig::ToolConfig() : doc_(defaults()) {}

ToolConfig ToolConfig::load(const std::optional<std::filesystem::path>& file,
                            const std::map<std::string, std::string>& env,
                            const std::vector<std::string>& overrides) {
  ToolConfig cfg;
  if (file) {
    json patch;
    try {
      patch = json::parse(read_text_file(*file));
    } catch (const json::parse_error& e) {
      throw ParseError(file->string() + ": malformed config: " + e.what(), e.byte);
    }
    merge_into(cfg.doc_, patch, defaults(), "");
  }
  const std::string prefix = kEnvPrefix;
  for (const auto& [name, value] : env) {
    if (name.rfind(prefix, 0) != 0) continue;
    std::string key = name.substr(prefix.size());
    std::string dotted;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] == '_' && i + 1 < key.size() && key[i + 1] == '_') {
        dotted += '.';
        ++i;
      } else {
        dotted += static_cast<char>(std::tolower(static_cast<unsigned char>(key[i])));
      }
    }
    cfg.set_from_text(dotted, value);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ContractError("--set expects key=value, got '" + o + "'");
    cfg.set_from_text(o.substr(0, eq), o.substr(eq + 1));
  }
  return cfg;
}

void ToolConfig::set(const std::string& dotted_key, const json& value) {
  json patch = value;
  const auto parts = split_key(dotted_key);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  merge_into(doc_, patch, defaults(), "");
}

void ToolConfig::set_from_text(const std::string& dotted_key, const std::string& text) {
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  set(dotted_key, value);
}

const json& ToolConfig::at(const std::string& dotted_key) const {
  const json* node = &doc_;
  for (const auto& part : split_key(dotted_key)) node = &node->at(part);
  return *node;
}

LayoutOptions ToolConfig::layout() const {
  return {at("layout.image_dir").get<std::string>(), at("layout.annotation_dir").get<std::string>()};
}

SanityConfig ToolConfig::sanity() const {
  return {at("sanity.min_box_area").get<double>(), at("sanity.min_box_side").get<double>(),
          at("sanity.duplicate_iou").get<double>()};
}

Severity ToolConfig::sanity_fail_on() const {
  const auto v = at("sanity.fail_on").get<std::string>();
  if (v == "error") return Severity::error;
  if (v == "warning") return Severity::warning;
  throw ContractError("sanity.fail_on must be 'error' or 'warning'");
}

ExamConfig ToolConfig::exam() const {
  return {at("exam.match_iou").get<double>(), at("exam.localization_iou").get<double>(),
          at("exam.min_recall").get<double>(), at("exam.min_precision").get<double>(),
          at("exam.min_mean_iou").get<double>()};
}

ContributionConfig ToolConfig::contribution() const {
  ContributionConfig c;
  c.min_onboard_ratio = at("contribution.min_onboard_ratio").get<double>();
  c.similarity_threshold = at("contribution.similarity_threshold").get<double>();
  const auto& cap = at("contribution.max_similarity_score");
  if (!cap.is_null()) c.max_similarity_score = cap.get<double>();
  return c;
}

StatsConfig ToolConfig::stats() const {
  return {at("stats.include_other").get<bool>(), at("stats.min_combination_fraction").get<double>()};
}

SimilarityOptions ToolConfig::similarity_options() const {
  SimilarityOptions o;
  o.jobs = jobs();
  o.matrix_memory_cap = static_cast<std::uint64_t>(at("similarity.matrix_memory_cap_bytes").get<double>());
  return o;
}

std::vector<double> ToolConfig::score_thresholds() const {
  return at("similarity.thresholds").get<std::vector<double>>();
}

double ToolConfig::sample_threshold() const { return at("similarity.sample_threshold").get<double>(); }

std::vector<double> ToolConfig::eval_thresholds() const {
  return at("eval.thresholds").get<std::vector<double>>();
}

EvalMode ToolConfig::eval_mode() const {
  const auto v = at("eval.mode").get<std::string>();
  if (v == "class_agnostic") return EvalMode::class_agnostic;
  if (v == "per_class") return EvalMode::per_class;
  throw ContractError("eval.mode must be 'class_agnostic' or 'per_class'");
}

int ToolConfig::crop_border() const { return at("crop.border").get<int>(); }

unsigned ToolConfig::jobs() const {
  const int j = at("jobs").get<int>();
  if (j < 1) throw ContractError("jobs must be at least 1");
  return static_cast<unsigned>(j);
}

bool ToolConfig::timestamp() const { return at("report.timestamp").get<bool>(); }

}  // namespace conekit
