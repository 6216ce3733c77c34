// Copyright 2026 The pdeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pdeval command line. Exit codes: 0 success, 1 validation failure,
// 2 I/O error.

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdeval/datasets.hpp"
#include "pdeval/io.hpp"
#include "pdeval/runner.hpp"
#include "pdeval/selftest.hpp"

namespace {

using namespace pdeval;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

// Class list given as names or numeric ids, comma separated.
std::vector<Label> ParseClasses(const std::string& text, const LabelSpace& space) {
  std::vector<Label> ids;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    if (tok.empty()) continue;
    bool found = false;
    for (const auto& c : space.classes()) {
      if (c.name == tok) {
        ids.push_back(c.id);
        found = true;
      }
    }
    if (!found) {
      Check(tok.find_first_not_of("0123456789") == std::string::npos,
            "unknown class '" + tok + "' in " + space.name());
      const int id = std::stoi(tok);
      Check(id >= 0 && id < 255 && space.Contains(static_cast<Label>(id)),
            "unknown class id " + tok + " in " + space.name());
      ids.push_back(static_cast<Label>(id));
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

void PrintValidation(const ValidationReport& v) {
  std::cout << "samples: " << v.actual_count;
  if (v.expected_count > 0) std::cout << " (expected " << v.expected_count << ")";
  std::cout << "\n";
  for (const auto& m : v.messages) std::cerr << "warning: " << m << "\n";
  std::cout << "validation: " << (v.ok ? "ok" : "FAILED") << "\n";
}

int Run(int argc, char** argv) {
  CLI::App app{"pdeval: prompt-and-decode evaluation of dense predictions rendered as images"};
  app.require_subcommand(1);

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Ingest an official dataset distribution");
  std::string prepare_dataset;
  std::string prepare_root;
  std::string prepare_out;
  bool prepare_strict = false;
  prepare->add_option("dataset", prepare_dataset,
                      "nyuv2, nyuv2-normals, diode-indoor, diode-outdoor or cityscapes")
      ->required();
  prepare->add_option("--root", prepare_root, "Root of the raw distribution")->required();
  prepare->add_option("--out", prepare_out, "Prepared dataset directory")->required();
  prepare->add_flag("--strict", prepare_strict, "Exit 1 when split validation fails");

  // validate
  auto* validate = app.add_subcommand("validate", "Check a prepared dataset against its split");
  std::string validate_dir;
  std::string validate_id;
  bool validate_files = false;
  validate->add_option("--prepared", validate_dir, "Prepared dataset directory")->required();
  validate->add_option("--dataset", validate_id, "Split to check against (default: manifest id)");
  validate->add_flag("--check-files", validate_files, "Also open every referenced file");

  // prompt
  auto* prompt = app.add_subcommand("prompt", "Print the task prompt");
  std::string prompt_task;
  std::string prompt_classes;
  std::string prompt_palette;
  prompt->add_option("--task", prompt_task, "depth, normals, seg19 or seg7")->required();
  prompt->add_option("--classes", prompt_classes, "Comma-separated class names or ids");
  prompt->add_option("--palette", prompt_palette, "Palette file overriding the built-in one");

  // palette
  auto* palette_cmd = app.add_subcommand("palette", "Print the built-in palette file");
  std::string palette_task = "seg19";
  palette_cmd->add_option("--task", palette_task, "seg19 or seg7");

  // calibrate
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate the normal axis convention");
  std::string cal_task;
  std::string cal_model;
  std::string cal_dataset;
  std::string cal_generated;
  std::string cal_cache;
  bool cal_force = false;
  calibrate_cmd->add_option("--task", cal_task, "Must be normals")->required();
  calibrate_cmd->add_option("--model", cal_model, "Model id")->required();
  calibrate_cmd->add_option("--dataset", cal_dataset, "Prepared dataset directory")->required();
  calibrate_cmd->add_option("--generated", cal_generated, "Directory of generated PNGs")
      ->required();
  calibrate_cmd->add_option("--cache", cal_cache,
                            std::string("Cache directory (default $") + kCacheDirEnv + ")");
  calibrate_cmd->add_flag("--force", cal_force, "Recompute an existing record");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate generated outputs");
  std::string ev_task;
  std::string ev_model;
  std::string ev_dataset;
  std::string ev_generated;
  std::string ev_out;
  std::string ev_format = "json";
  std::size_t ev_jobs = 1;
  std::string ev_crop;
  std::vector<double> ev_cap;
  std::string ev_cache;
  std::string ev_palette;
  evaluate_cmd->add_option("--task", ev_task, "depth, normals, seg19 or seg7")->required();
  evaluate_cmd->add_option("--model", ev_model, "Model id")->required();
  evaluate_cmd->add_option("--dataset", ev_dataset, "Prepared dataset directory")->required();
  evaluate_cmd->add_option("--generated", ev_generated, "Directory of generated PNGs")->required();
  evaluate_cmd->add_option("--out", ev_out, "Report path")->required();
  evaluate_cmd->add_option("--format", ev_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  evaluate_cmd->add_option("--jobs", ev_jobs, "Worker threads")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--crop", ev_crop, "Evaluation crop (eigen)")
      ->check(CLI::IsMember({"eigen"}));
  evaluate_cmd->add_option("--depth-cap", ev_cap, "Valid ground-truth depth range MIN MAX")
      ->expected(2);
  evaluate_cmd->add_option("--cache", ev_cache,
                           std::string("Calibration cache directory (default $") + kCacheDirEnv +
                               ")");
  evaluate_cmd->add_option("--palette", ev_palette, "Palette file for segmentation tasks");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic prepared dataset");
  std::string synth_spec;
  std::string synth_out;
  synth->add_option("--spec", synth_spec, "JSON scene/dataset spec")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Run the end-to-end synthetic oracle");
  std::string selftest_dir;
  std::size_t selftest_jobs = 1;
  selftest->add_option("--dir", selftest_dir, "Working directory (default: a temp dir)");
  selftest->add_option("--jobs", selftest_jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*prepare) {
    IngestResult result;
    const fs::path root = prepare_root;
    const fs::path out = prepare_out;
    if (prepare_dataset == "nyuv2") {
      result = ingest_nyuv2_depth(root, out);
    } else if (prepare_dataset == "nyuv2-normals") {
      result = ingest_nyuv2_normals(root, out);
    } else if (prepare_dataset == "diode-indoor") {
      result = ingest_diode(root, DiodeSplit::kIndoor, out);
    } else if (prepare_dataset == "diode-outdoor") {
      result = ingest_diode(root, DiodeSplit::kOutdoor, out);
    } else if (prepare_dataset == "cityscapes") {
      result = ingest_cityscapes(root, out);
    } else {
      throw ValidationError("unknown dataset '" + prepare_dataset + "'");
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    WriteManifest(out, result.samples);
    const auto v = validate_samples(result.samples, FindDatasetSpec(prepare_dataset));
    PrintValidation(v);
    return (!v.ok && prepare_strict) ? kExitValidation : 0;
  }

  if (*validate) {
    const auto samples = ReadManifest(validate_dir);
    std::string id = validate_id;
    if (id.empty()) {
      Check(!samples.empty(), "manifest is empty; pass --dataset");
      id = samples.front().dataset_id;
    }
    const auto& known = KnownDatasets();
    const bool official = std::any_of(known.begin(), known.end(),
                                      [&](const DatasetSpec& d) { return d.dataset_id == id; });
    ValidationReport v;
    if (official) {
      v = validate_samples(samples, FindDatasetSpec(id));
    } else {
      Check(validate_id.empty(), "unknown dataset '" + id + "'");
      v.ok = true;
      v.actual_count = samples.size();
      std::cout << ("no official split for '" + id + "'; count and resolution not checked\n");
    }
    if (validate_files) {
      for (auto& p : check_sample_files(validate_dir, samples)) {
        v.messages.push_back(std::move(p));
        v.ok = false;
      }
    }
    PrintValidation(v);
    return v.ok ? 0 : kExitValidation;
  }

  if (*prompt) {
    const EvalTask task = EvalTaskFromString(prompt_task);
    std::optional<Palette> palette;
    if (!prompt_palette.empty()) palette = Palette::Parse(io::ReadText(prompt_palette));
    if (IsSegmentation(task)) {
      const LabelSpace& space =
          task == EvalTask::kSeg7 ? CityscapesCategorySpace() : CityscapesSpace();
      Check(!prompt_classes.empty(), "segmentation prompts need --classes");
      const auto ids = ParseClasses(prompt_classes, space);
      std::cout << task_prompt(task, std::span<const Label>(ids), palette ? &*palette : nullptr)
                << "\n";
    } else {
      std::cout << task_prompt(task) << "\n";
    }
    return 0;
  }

  if (*palette_cmd) {
    const EvalTask task = EvalTaskFromString(palette_task);
    Check(IsSegmentation(task), "palettes exist for seg19 and seg7 only");
    std::cout << (task == EvalTask::kSeg7 ? CityscapesCategoryPalette() : CityscapesPalette())
                     .Serialize();
    return 0;
  }

  if (*calibrate_cmd) {
    EvalConfig config;
    config.task = EvalTaskFromString(cal_task);
    config.model_id = cal_model;
    config.prepared_dir = cal_dataset;
    config.generated_dir = cal_generated;
    config.cache_dir = cal_cache.empty() ? DefaultCacheDir() : fs::path(cal_cache);
    config.force_calibration = cal_force;
    const auto outcome = calibrate(config);
    std::cout << (outcome.computed ? "computed" : "cached") << ": "
              << outcome.record.result.convention.ToString() << " mean error "
              << FormatNumber(outcome.record.result.mean_errors[outcome.record.result.convention
                                                                    .Index()])
              << " deg over " << outcome.record.result.sample_ids.size() << " samples\n";
    return 0;
  }

  if (*evaluate_cmd) {
    EvalConfig config;
    config.task = EvalTaskFromString(ev_task);
    config.model_id = ev_model;
    config.prepared_dir = ev_dataset;
    config.generated_dir = ev_generated;
    config.cache_dir = ev_cache.empty() ? DefaultCacheDir() : fs::path(ev_cache);
    config.options.jobs = ev_jobs;
    config.options.eigen_crop = ev_crop == "eigen";
    if (ev_cap.size() == 2) config.options.depth_cap = std::make_pair(ev_cap[0], ev_cap[1]);
    if (!ev_palette.empty()) config.palette = Palette::Parse(io::ReadText(ev_palette));
    const Report report = evaluate(config);
    emit_report(report, ev_format == "csv" ? ReportFormat::kCsv : ReportFormat::kJson, ev_out);
    std::cout << report.task << " " << report.dataset_id << " " << report.model_id << ":";
    if (report.aggregate) {
      for (const auto& m : *report.aggregate) {
        if (m.name.rfind("iou_", 0) == 0) continue;
        std::cout << " " << m.name << "=" << (m.value ? FormatNumber(*m.value) : "null");
      }
    } else {
      std::cout << " no evaluated samples";
    }
    std::cout << " (missing " << report.metadata["missing_count"].get<std::size_t>() << ")\n";
    return 0;
  }

  if (*synth) {
    const auto spec = SynthDatasetSpecFromJson(nlohmann::json::parse(io::ReadText(synth_spec)));
    write_synthetic_dataset(synth_out, spec);
    std::cout << "wrote " << ExpandScenes(spec).size() << " synthetic scenes to " << synth_out
              << "\n";
    return 0;
  }

  if (*selftest) {
    fs::path dir = selftest_dir;
    const bool temporary = dir.empty();
    if (temporary) {
      dir = fs::temp_directory_path() / ("pdeval-selftest-" + std::to_string(::getpid()));
    }
    const auto checks = run_selftest(dir, selftest_jobs);
    bool ok = true;
    for (const auto& c : checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      ok = ok && c.passed;
    }
    if (temporary) fs::remove_all(dir);
    return ok ? 0 : kExitValidation;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const pdeval::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == pdeval::ErrorKind::kIo ? kExitIo : kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
