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

#include "conekit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "conekit/config.hpp"
#include "conekit/dataset.hpp"
#include "conekit/error.hpp"
#include "conekit/imaging.hpp"
#include "conekit/parallel.hpp"
#include "conekit/report.hpp"

namespace conekit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Thrown by command handlers to request a specific exit code.
struct ExitRequest {
  int code;
};

struct GlobalOptions {
  std::string config_file;
  std::vector<std::string> overrides;
  int jobs = 0;  // 0: take from config
  std::string output;
};

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> image_files_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_image_file(e.path())) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Image files under a single file, a flat folder, a team folder or a dataset root.
std::vector<fs::path> collect_images(const fs::path& path, const LayoutOptions& layout) {
  if (fs::is_regular_file(path)) return {path};
  if (!fs::is_directory(path)) throw IoError(path.string() + " does not exist");
  if (fs::is_directory(path / layout.image_dir)) return image_files_in(path / layout.image_dir);
  std::vector<fs::path> out = image_files_in(path);
  std::vector<fs::path> teams;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_directory() && fs::is_directory(e.path() / layout.image_dir)) teams.push_back(e.path());
  }
  std::sort(teams.begin(), teams.end());
  for (const auto& t : teams) {
    auto files = image_files_in(t / layout.image_dir);
    out.insert(out.end(), files.begin(), files.end());
  }
  return out;
}

std::vector<FeatureVector> extract_all(const std::vector<fs::path>& files, unsigned jobs) {
  std::vector<FeatureVector> out(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    out[i] = extract_features(read_image(files[i]), {}, files[i].filename().string());
  });
  return out;
}

std::vector<FeatureVector> features_from(const fs::path& path, const ToolConfig& cfg) {
  if (path.extension() == ".fsfv") return load_features(path);
  return extract_all(collect_images(path, cfg.layout()), cfg.jobs());
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  ToolConfig config;

  void emit(const std::string& command, json result, const std::string& output) {
    json doc;
    doc["tool"] = "conekit";
    doc["command"] = command;
    if (config.timestamp()) {
      const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      doc["generated_at"] = buf;
    }
    // The worker count never changes a result, so it is left out of the echo
    // to keep reports byte-identical across --jobs values.
    json echoed = config.doc();
    echoed.erase("jobs");
    doc["config"] = std::move(echoed);
    doc["result"] = std::move(result);
    write(doc.dump(2) + "\n", output);
  }

  void write(const std::string& text, const std::string& output) {
    if (output.empty() || output == "-") {
      out_ << text;
    } else {
      write_text_file(output, text);
    }
  }

  std::ostream& err() { return err_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

void warn_all(Runner& r, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) r.err() << "warning: " << w << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::map<std::string, std::string>& env) {
  CLI::App app{"conekit: curation and quality tools for cone-annotation datasets", "conekit"};
  app.require_subcommand(1);
  // Lets global options such as --jobs follow the subcommand too.
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_file, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "Override a config key, e.g. --set sanity.min_box_area=30");
  app.add_option("--jobs,-j", g.jobs, "Worker threads (config key: jobs); results do not depend on it")
      ->check(CLI::PositiveNumber);
  app.add_option("--output,-o", g.output, "Report destination (default stdout)");
  app.footer(
      "Config precedence: defaults < --config file < CONEKIT_<SECTION>__<KEY> env < --set.\n"
      "Exit codes: 0 ok, 1 findings or failed gate, 2 usage or input error.");

  Runner runner(out, err);
  std::function<void()> action;

  // convert -------------------------------------------------------------------
  auto* convert_cmd = app.add_subcommand("convert", "Convert one annotation file between formats");
  std::string conv_from, conv_to, conv_in, conv_out, conv_image;
  int conv_w = 0, conv_h = 0;
  convert_cmd->add_option("--from", conv_from, "Source format")->required();
  convert_cmd->add_option("--to", conv_to, "Target format")->required();
  convert_cmd->add_option("--width", conv_w, "Image width (darknet_yolo, labelbox)");
  convert_cmd->add_option("--height", conv_h, "Image height (darknet_yolo, labelbox)");
  convert_cmd->add_option("--image", conv_image, "Read image size from this file");
  convert_cmd->add_option("input", conv_in, "Source annotation file")->required();
  convert_cmd->add_option("output", conv_out, "Destination file (default stdout)");
  convert_cmd->footer(
      "Directions: darknet_yolo->supervisely_like, labelbox->supervisely_like,\n"
      "supervisely_like->darknet_yolo, supervisely_like->pascal_voc.\nConfig keys: none.");
  convert_cmd->callback([&] {
    action = [&] {
      const auto src = format_from_name(conv_from);
      const auto dst = format_from_name(conv_to);
      if (!src || !dst) throw ContractError("unknown format; use supervisely_like, darknet_yolo, pascal_voc or labelbox");
      std::optional<ImageDims> dims;
      if (!conv_image.empty()) {
        dims = read_image_dims(conv_image);
      } else if (conv_w > 0 && conv_h > 0) {
        dims = ImageDims{conv_w, conv_h};
      }
      runner.write(convert(read_text_file(conv_in), *src, *dst, dims), conv_out);
    };
  });

  // validate ------------------------------------------------------------------
  auto* validate_cmd = app.add_subcommand("validate", "Check dataset layout and filenames");
  std::string validate_root;
  validate_cmd->add_option("root", validate_root, "Dataset root")->required();
  validate_cmd->footer("Config keys: layout.image_dir, layout.annotation_dir.");
  validate_cmd->callback([&] {
    action = [&] {
      const auto report = validate_layout(validate_root, runner.config.layout());
      runner.emit("validate", to_json(report), g.output);
      if (!report.findings.empty()) throw ExitRequest{kExitFindings};
    };
  });

  // similarity ----------------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("similarity", "Image similarity tools");
  sim_cmd->require_subcommand(1);
  auto* score_cmd = sim_cmd->add_subcommand("score", "Local and global cosine-T duplicate scores");
  std::vector<std::string> score_inputs;
  std::string score_csv;
  score_cmd->add_option("datasets", score_inputs,
                        "Inputs as ID=PATH or PATH; PATH is an .fsfv file or an image folder")
      ->required();
  score_cmd->add_option("--csv", score_csv, "Also write the CSV table here");
  score_cmd->footer(
      "Config keys: similarity.thresholds, similarity.matrix_memory_cap_bytes, jobs, layout.image_dir.");
  score_cmd->callback([&] {
    action = [&] {
      std::map<std::string, std::vector<FeatureVector>> sets;
      for (const auto& in : score_inputs) {
        const auto eq = in.find('=');
        const std::string id = eq == std::string::npos ? fs::path(in).stem().string() : in.substr(0, eq);
        const std::string path = eq == std::string::npos ? in : in.substr(eq + 1);
        if (sets.count(id)) throw ContractError("dataset id '" + id + "' given twice");
        sets[id] = features_from(path, runner.config);
      }
      const auto thresholds = runner.config.score_thresholds();
      const auto report = score_report(sets, thresholds, runner.config.similarity_options());
      runner.emit("similarity score", to_json(report), g.output);
      if (!score_csv.empty()) write_text_file(score_csv, score_report_csv(report));
    };
  });

  auto* sample_cmd = sim_cmd->add_subcommand("sample", "Greedy thresholded diverse sampling");
  std::string sample_input;
  double sample_threshold = 0;
  sample_cmd->add_option("input", sample_input, ".fsfv file or image folder")->required();
  sample_cmd->add_option("--threshold", sample_threshold, "Cosine threshold (similarity.sample_threshold)");
  sample_cmd->footer("Config keys: similarity.sample_threshold, jobs, layout.image_dir.");
  sample_cmd->callback([&] {
    action = [&] {
      if (sample_threshold > 0) runner.config.set("similarity.sample_threshold", sample_threshold);
      const auto features = features_from(sample_input, runner.config);
      const double t = runner.config.sample_threshold();
      const auto kept = sample_diverse(features, t);
      json names = json::array();
      for (auto k : kept) names.push_back(features[k].image_ref);
      runner.emit("similarity sample",
                  {{"threshold", t}, {"n_input", features.size()}, {"n_kept", kept.size()},
                   {"kept", std::move(names)}},
                  g.output);
    };
  });

  // sanity --------------------------------------------------------------------
  auto* sanity_cmd = app.add_subcommand("sanity", "Rule-based label sanity checks");
  std::string sanity_path;
  sanity_cmd->add_option("path", sanity_path, "Dataset root, team folder or annotation folder")->required();
  sanity_cmd->footer(
      "Config keys: sanity.min_box_area, sanity.min_box_side, sanity.duplicate_iou,\n"
      "sanity.fail_on (warning|error), layout.image_dir, layout.annotation_dir.");
  sanity_cmd->callback([&] {
    action = [&] {
      auto data = load_dataset(sanity_path, runner.config.layout(), ParseMode::lenient, true);
      const bool have_images = !data.inventory.empty();
      const auto findings =
          sanity_check(data.images, runner.config.sanity(), have_images ? &data.inventory : nullptr);
      runner.emit("sanity", {{"n_images", data.images.size()}, {"findings", to_json(findings)}},
                  g.output);
      const Severity gate = runner.config.sanity_fail_on();
      const bool blocked = std::any_of(findings.begin(), findings.end(), [&](const auto& f) {
        return gate == Severity::warning || f.severity == Severity::error;
      });
      if (blocked) throw ExitRequest{kExitFindings};
    };
  });

  // exam ----------------------------------------------------------------------
  auto* exam_cmd = app.add_subcommand("exam", "Labeling exam tools");
  exam_cmd->require_subcommand(1);
  auto* grade_cmd = exam_cmd->add_subcommand("grade", "Compare a submission with ground truth");
  std::string exam_sub, exam_gt, exam_text;
  grade_cmd->add_option("--submission", exam_sub, "Submitted annotations")->required();
  grade_cmd->add_option("--ground-truth", exam_gt, "Ground-truth annotations")->required();
  grade_cmd->add_option("--feedback", exam_text, "Write human-readable feedback here");
  grade_cmd->footer(
      "Config keys: exam.match_iou, exam.localization_iou, exam.min_recall,\n"
      "exam.min_precision, exam.min_mean_iou, jobs, layout.annotation_dir.");
  grade_cmd->callback([&] {
    action = [&] {
      const auto sub = load_dataset(exam_sub, runner.config.layout());
      const auto gt = load_dataset(exam_gt, runner.config.layout());
      const auto report = grade_exam(sub.images, gt.images, runner.config.exam(), runner.config.jobs());
      runner.emit("exam grade", to_json(report), g.output);
      if (!exam_text.empty()) write_text_file(exam_text, exam_feedback_text(report));
      if (!report.passed) throw ExitRequest{kExitFindings};
    };
  });

  // contribution --------------------------------------------------------------
  auto* contrib_cmd = app.add_subcommand("contribution", "Contribution requirement tools");
  contrib_cmd->require_subcommand(1);
  auto* check_cmd = contrib_cmd->add_subcommand("check", "Check onboard ratio and similarity");
  std::string contrib_path, contrib_features;
  check_cmd->add_option("path", contrib_path, "Team folder or dataset root")->required();
  check_cmd->add_option("--features", contrib_features, "Precomputed .fsfv file");
  check_cmd->footer(
      "Config keys: contribution.min_onboard_ratio, contribution.similarity_threshold,\n"
      "contribution.max_similarity_score, similarity.matrix_memory_cap_bytes, jobs, layout.*.");
  check_cmd->callback([&] {
    action = [&] {
      const auto data = load_dataset(contrib_path, runner.config.layout());
      std::vector<FeatureVector> features;
      if (!contrib_features.empty()) {
        features = load_features(contrib_features);
      } else {
        std::vector<fs::path> files;
        for (const auto& [name, p] : data.image_paths) files.push_back(p);
        features = extract_all(files, runner.config.jobs());
      }
      const auto report = check_contribution(data.images, features, runner.config.contribution(),
                                             runner.config.similarity_options());
      runner.emit("contribution check", to_json(report), g.output);
      if (!report.passed()) throw ExitRequest{kExitFindings};
    };
  });

  // stats ---------------------------------------------------------------------
  auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics");
  std::string stats_path, stats_csv_path;
  stats_cmd->add_option("path", stats_path, "Dataset root, team folder or annotation folder")->required();
  stats_cmd->add_option("--csv", stats_csv_path, "Also write histogram tables here");
  stats_cmd->footer(
      "Config keys: stats.include_other, stats.min_combination_fraction, jobs, layout.annotation_dir.");
  stats_cmd->callback([&] {
    action = [&] {
      const auto data = load_dataset(stats_path, runner.config.layout());
      warn_all(runner, data.warnings);
      const auto report = compute_stats(data.images, runner.config.stats(), runner.config.jobs());
      runner.emit("stats", to_json(report), g.output);
      if (!stats_csv_path.empty()) write_text_file(stats_csv_path, stats_csv(report));
    };
  });

  // eval ----------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Detector evaluation");
  eval_cmd->require_subcommand(1);
  auto* ap_cmd = eval_cmd->add_subcommand("ap", "Average precision over an IoU sweep");
  std::string eval_dets, eval_gt, eval_csv, eval_mode;
  ap_cmd->add_option("--detections", eval_dets, "Darknet results text or JSON list")->required();
  ap_cmd->add_option("--ground-truth", eval_gt, "Ground-truth annotations")->required();
  ap_cmd->add_option("--mode", eval_mode, "class_agnostic or per_class (eval.mode)");
  ap_cmd->add_option("--csv", eval_csv, "Also write PR curves here");
  ap_cmd->footer("Config keys: eval.thresholds, eval.mode, jobs, layout.annotation_dir.");
  ap_cmd->callback([&] {
    action = [&] {
      if (!eval_mode.empty()) runner.config.set("eval.mode", eval_mode);
      const auto gt = load_dataset(eval_gt, runner.config.layout());
      const auto text = read_text_file(eval_dets);
      const auto dets = fs::path(eval_dets).extension() == ".json"
                            ? parse_detections_json(text)
                            : parse_darknet_results(text, gt.images);
      const auto thresholds = runner.config.eval_thresholds();
      const auto report =
          ap_sweep(dets, gt.images, thresholds, runner.config.eval_mode(), runner.config.jobs());
      runner.emit("eval ap", to_json(report), g.output);
      if (!eval_csv.empty()) write_text_file(eval_csv, pr_curve_csv(report));
    };
  });

  // crop ----------------------------------------------------------------------
  auto* crop_cmd = app.add_subcommand("crop", "Remove the watermark border");
  std::string crop_in, crop_out, crop_ann, crop_ann_out;
  int crop_border = -1;
  crop_cmd->add_option("input", crop_in, "Input image")->required();
  crop_cmd->add_option("output", crop_out, "Output image (PNG or JPEG by extension)")->required();
  crop_cmd->add_option("--border", crop_border, "Border in pixels (crop.border)");
  crop_cmd->add_option("--annotation", crop_ann, "supervisely_like annotation to translate");
  crop_cmd->add_option("--annotation-out", crop_ann_out, "Where to write the translated annotation");
  crop_cmd->footer("Config keys: crop.border.");
  crop_cmd->callback([&] {
    action = [&] {
      if (crop_border >= 0) runner.config.set("crop.border", crop_border);
      const int border = runner.config.crop_border();
      const auto img = read_image(crop_in);
      const auto cropped = crop_watermark(img, border);
      write_image(cropped, crop_out);
      json result = {{"input", {{"width", img.width}, {"height", img.height}}},
                     {"output", {{"width", cropped.width}, {"height", cropped.height}}},
                     {"border", border}};
      if (!crop_ann.empty()) {
        ParseOptions opts;
        opts.dims = img.dims();
        opts.name = fs::path(crop_in).filename().string();
        const auto ann = parse_annotation(read_text_file(crop_ann), FormatId::supervisely_like, opts);
        const auto moved = crop_annotation(ann.image, border);
        result["annotation"] = {{"objects", moved.image.objects.size()},
                                {"clipped", moved.clipped},
                                {"dropped", moved.dropped}};
        if (!crop_ann_out.empty()) {
          write_text_file(crop_ann_out, write_annotation(moved.image, FormatId::supervisely_like));
        }
      }
      runner.emit("crop", std::move(result), g.output);
    };
  });

  // viz -----------------------------------------------------------------------
  auto* viz_cmd = app.add_subcommand("viz", "Draw annotations onto an image");
  std::string viz_img, viz_ann, viz_out, viz_fmt = "supervisely_like";
  viz_cmd->add_option("image", viz_img, "Input image")->required();
  viz_cmd->add_option("annotation", viz_ann, "Annotation file")->required();
  viz_cmd->add_option("output", viz_out, "Output PNG")->required();
  viz_cmd->add_option("--format", viz_fmt, "Annotation format (supervisely_like or darknet_yolo)");
  viz_cmd->footer("Config keys: none.");
  viz_cmd->callback([&] {
    action = [&] {
      const auto fmt = format_from_name(viz_fmt);
      if (!fmt) throw ContractError("unknown format '" + viz_fmt + "'");
      const auto img = read_image(viz_img);
      ParseOptions opts;
      opts.dims = img.dims();
      opts.mode = ParseMode::lenient;
      const auto ann = parse_annotation(read_text_file(viz_ann), *fmt, opts);
      write_png(render_annotations(img, ann.image), viz_out);
    };
  });

  // features ------------------------------------------------------------------
  auto* feat_cmd = app.add_subcommand("features", "Feature vector tools");
  feat_cmd->require_subcommand(1);
  auto* extract_cmd = feat_cmd->add_subcommand("extract", "Compute 4096-d features into an FSFV file");
  std::string feat_in, feat_out;
  extract_cmd->add_option("input", feat_in, "Image, image folder, team folder or dataset root")->required();
  extract_cmd->add_option("output", feat_out, "Destination .fsfv file")->required();
  extract_cmd->footer("Config keys: jobs, layout.image_dir.");
  extract_cmd->callback([&] {
    action = [&] {
      const auto features = extract_all(collect_images(feat_in, runner.config.layout()),
                                        runner.config.jobs());
      save_features(features, feat_out);
      runner.emit("features extract",
                  {{"n_vectors", features.size()}, {"dim", kFeatureDim}, {"output", feat_out}},
                  g.output);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::optional<fs::path> cfg_file;
    if (!g.config_file.empty()) cfg_file = g.config_file;
    runner.config = ToolConfig::load(cfg_file, env, g.overrides);
    if (g.jobs > 0) runner.config.set("jobs", g.jobs);
    if (action) action();
    return kExitOk;
  } catch (const ExitRequest& e) {
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace conekit
