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

#ifndef CONEKIT_REPORT_HPP
#define CONEKIT_REPORT_HPP

#include <span>
#include <string>

#include "conekit/eval.hpp"
#include "conekit/formats.hpp"
#include "conekit/quality.hpp"
#include "conekit/similarity.hpp"
#include "conekit/stats.hpp"
#include "json.hpp"

// Machine-readable JSON forms of every report. Output is a pure function of
// the report value, so identical inputs serialize to identical bytes.

namespace conekit {

/// Threshold rendered as a JSON key, e.g. "0.95".
std::string threshold_key(double t);

nlohmann::json to_json(const LayoutReport& report);
nlohmann::json to_json(std::span<const SanityFinding> findings);
nlohmann::json to_json(const ExamReport& report);
nlohmann::json to_json(const ContributionReport& report);
nlohmann::json to_json(const StatsReport& report);
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const ScoreReport& report);

}  // namespace conekit

#endif  // CONEKIT_REPORT_HPP
