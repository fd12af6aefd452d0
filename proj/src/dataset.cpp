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

#include "conekit/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "conekit/error.hpp"
#include "conekit/imaging.hpp"

namespace conekit {

namespace fs = std::filesystem;

namespace {

bool is_team_dir(const fs::path& dir, const LayoutOptions& layout) {
  return fs::is_directory(dir / layout.annotation_dir) || fs::is_directory(dir / layout.image_dir);
}

std::vector<fs::path> sorted_files(const fs::path& dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.is_regular_file()) out.push_back(e.path());
  }
  if (ec) throw IoError("cannot read directory " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

void load_annotation_files(const fs::path& dir, ParseMode mode, LoadedDataset& out) {
  for (const auto& file : sorted_files(dir)) {
    const std::string fname = file.filename().string();
    if (file.extension() != ".json") continue;
    ParseOptions options;
    options.name = fname.substr(0, fname.size() - 5);
    options.mode = mode;
    try {
      auto parsed = parse_annotation(read_text_file(file), FormatId::supervisely_like, options);
      for (auto& w : parsed.warnings) out.warnings.push_back(options.name + ": " + w);
      out.images.push_back(std::move(parsed.image));
    } catch (const ParseError& e) {
      throw ParseError(file.string() + ": " + e.what(), e.position());
    } catch (const ValidationError& e) {
      throw ValidationError(file.string() + ": " + e.what());
    }
  }
}

void load_images(const fs::path& dir, bool read_dims, LoadedDataset& out) {
  for (const auto& file : sorted_files(dir)) {
    const std::string name = file.filename().string();
    std::optional<ImageDims> dims;
    if (read_dims) {
      try {
        dims = read_image_dims(file);
      } catch (const DecodeError& e) {
        out.warnings.push_back(name + ": " + e.what());
      }
    }
    out.inventory[name] = dims;
    out.image_paths[name] = file;
  }
}

void load_team(const fs::path& dir, const LayoutOptions& layout, ParseMode mode, bool read_dims,
               LoadedDataset& out) {
  if (fs::is_directory(dir / layout.annotation_dir)) {
    load_annotation_files(dir / layout.annotation_dir, mode, out);
  }
  if (fs::is_directory(dir / layout.image_dir)) load_images(dir / layout.image_dir, read_dims, out);
}

}  // namespace

LoadedDataset load_dataset(const fs::path& path, const LayoutOptions& layout, ParseMode mode,
                           bool read_dims) {
  if (!fs::is_directory(path)) throw IoError(path.string() + " is not a directory");
  LoadedDataset out;
  if (is_team_dir(path, layout)) {
    load_team(path, layout, mode, read_dims, out);
  } else {
    std::vector<fs::path> teams;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_directory() && is_team_dir(e.path(), layout)) teams.push_back(e.path());
    }
    std::sort(teams.begin(), teams.end());
    if (teams.empty()) {
      load_annotation_files(path, mode, out);
    } else {
      for (const auto& t : teams) load_team(t, layout, mode, read_dims, out);
    }
  }
  std::stable_sort(out.images.begin(), out.images.end(),
                   [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace conekit
