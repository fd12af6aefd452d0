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

#ifndef CONEKIT_DATASET_HPP
#define CONEKIT_DATASET_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "conekit/formats.hpp"
#include "conekit/quality.hpp"

namespace conekit {

struct LoadedDataset {
  std::vector<AnnotatedImage> images;  // sorted by name
  ImageInventory inventory;            // image files found next to the annotations
  std::map<std::string, std::filesystem::path> image_paths;
  std::vector<std::string> warnings;
};

/**
 * Loads supervisely_like annotations from any of:
 *  - a dataset root (`<root>/<team>/{img,ann}`),
 *  - a single team folder (`<team>/{img,ann}`),
 *  - a flat directory of `*.json` annotation files.
 * Image sizes are read from file headers when `read_dims` is set.
 */
LoadedDataset load_dataset(const std::filesystem::path& path, const LayoutOptions& layout = {},
                           ParseMode mode = ParseMode::strict, bool read_dims = false);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace conekit

#endif  // CONEKIT_DATASET_HPP
