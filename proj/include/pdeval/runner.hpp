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

// Batch evaluation: pairs generated images with a prepared dataset, decodes
// them with the task codec and aggregates metrics into a report.
//
// Aggregation modes are fixed per task and recorded in the report:
//   depth     per-image metrics averaged uniformly over evaluated samples
//   normals   angular errors pooled over every valid pixel of the dataset
//   seg19/7   one confusion matrix accumulated over the dataset

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "pdeval/core.hpp"
#include "pdeval/datasets.hpp"
#include "pdeval/depth.hpp"
#include "pdeval/io.hpp"
#include "pdeval/normals.hpp"
#include "pdeval/resample.hpp"
#include "pdeval/segmentation.hpp"

namespace pdeval {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCacheDirEnv = "PDEVAL_CACHE_DIR";
inline constexpr std::size_t kCalibrationSamples = 5;

// 8-bit outputs cannot represent the zero vector: mid-gray 127 or 128
// decodes to |v| = sqrt(3)/255. Anything that short is treated as gray.
inline constexpr double kQuantizedZeroNorm = 0.01;

enum class EvalTask { kDepth, kNormals, kSeg19, kSeg7 };

inline std::string ToString(EvalTask task) {
  switch (task) {
    case EvalTask::kDepth: return "depth";
    case EvalTask::kNormals: return "normals";
    case EvalTask::kSeg19: return "seg19";
    case EvalTask::kSeg7: return "seg7";
  }
  return "";
}

inline EvalTask EvalTaskFromString(const std::string& s) {
  if (s == "depth") return EvalTask::kDepth;
  if (s == "normals") return EvalTask::kNormals;
  if (s == "seg19") return EvalTask::kSeg19;
  if (s == "seg7") return EvalTask::kSeg7;
  throw ValidationError("unknown task '" + s + "' (expected depth, normals, seg19 or seg7)");
}

inline bool IsSegmentation(EvalTask t) { return t == EvalTask::kSeg19 || t == EvalTask::kSeg7; }

inline constexpr const char* kDepthPrompt =
    "Convert this image into a grayscale depth map with smooth gradual transitions. "
    "Nearby objects appear bright, distant objects appear dark.";

inline constexpr const char* kNormalsPrompt =
    "Generate a surface normal estimation visualization of this image. Use the standard normal "
    "map color convention: surfaces facing left are pinkish-red, surfaces facing up are light "
    "green, surfaces facing the camera are light blue/purple.";

// Fixed strings for depth and normals; segmentation prompts list the given
// classes (train ids for seg19, category ids for seg7).
inline std::string task_prompt(EvalTask task, std::optional<std::span<const Label>> classes = {},
                               const Palette* palette = nullptr) {
  switch (task) {
    case EvalTask::kDepth: return kDepthPrompt;
    case EvalTask::kNormals: return kNormalsPrompt;
    case EvalTask::kSeg19:
      Check(classes.has_value(), "segmentation prompt needs a class list");
      return build_prompt(*classes, CityscapesSpace(), palette ? *palette : CityscapesPalette(),
                          Granularity::kClasses19);
    case EvalTask::kSeg7:
      Check(classes.has_value(), "segmentation prompt needs a class list");
      return build_prompt(*classes, CityscapesCategorySpace(),
                          palette ? *palette : CityscapesCategoryPalette(),
                          Granularity::kCategories7);
  }
  return "";
}

struct EvalOptions {
  std::optional<std::pair<double, double>> depth_cap;
  bool eigen_crop = false;
  std::size_t jobs = 1;
};

struct EvalConfig {
  EvalTask task = EvalTask::kDepth;
  std::string model_id;
  fs::path generated_dir;
  fs::path prepared_dir;
  fs::path cache_dir;
  EvalOptions options;
  bool force_calibration = false;
  std::optional<Palette> palette;  // overrides the built-in palette of the seg task
};

inline const Palette& PaletteFor(const EvalConfig& config) {
  if (config.palette) return *config.palette;
  return config.task == EvalTask::kSeg7 ? CityscapesCategoryPalette() : CityscapesPalette();
}

inline fs::path DefaultCacheDir() {
  if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') return env;
  return ".pdeval-cache";
}

inline fs::path CalibrationCachePath(const fs::path& cache_dir, const std::string& model_id,
                                     const std::string& dataset_id) {
  return cache_dir / (model_id + "__" + dataset_id + ".calib");
}

// ---------------------------------------------------------------------------
// Report

struct Metric {
  std::string name;
  std::optional<double> value;

  friend bool operator==(const Metric&, const Metric&) = default;
};

struct SampleRow {
  std::string sample_id;
  std::string status;  // ok, degenerate, missing, failed
  std::vector<std::string> flags;
  std::vector<Metric> metrics;

  friend bool operator==(const SampleRow&, const SampleRow&) = default;
};

struct Report {
  std::string task;
  std::string model_id;
  std::string dataset_id;
  std::vector<SampleRow> samples;
  std::optional<std::vector<Metric>> aggregate;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  std::optional<double> Aggregate(const std::string& name) const {
    if (!aggregate) return std::nullopt;
    for (const auto& m : *aggregate) {
      if (m.name == name) return m.value;
    }
    return std::nullopt;
  }
};

inline std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

namespace detail {

inline nlohmann::ordered_json MetricsJson(const std::vector<Metric>& metrics) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& m : metrics) {
    j[m.name] = m.value ? nlohmann::ordered_json(*m.value) : nlohmann::ordered_json(nullptr);
  }
  return j;
}

inline std::vector<Metric> MetricsFromJson(const nlohmann::ordered_json& j) {
  std::vector<Metric> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    out.push_back({it.key(), it->is_null() ? std::nullopt : std::optional<double>(it->get<double>())});
  }
  return out;
}

// Pretty printer with fixed six-decimal floats.
inline void EmitJson(const nlohmann::ordered_json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::ordered_json(it.key()).dump() + ": ";
        EmitJson(*it, out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        EmitJson(v, out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case nlohmann::ordered_json::value_t::number_float:
      out += std::isfinite(j.get<double>()) ? FormatNumber(j.get<double>()) : "null";
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

inline nlohmann::ordered_json ReportToJson(const Report& report) {
  nlohmann::ordered_json j;
  j["tool"] = "pdeval";
  j["version"] = kToolVersion;
  j["task"] = report.task;
  j["model"] = report.model_id;
  j["dataset"] = report.dataset_id;
  j["metadata"] = report.metadata;
  j["aggregate"] = report.aggregate ? detail::MetricsJson(*report.aggregate)
                                    : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.samples) {
    nlohmann::ordered_json r;
    r["sample_id"] = row.sample_id;
    r["status"] = row.status;
    r["flags"] = row.flags;
    r["metrics"] = detail::MetricsJson(row.metrics);
    rows.push_back(std::move(r));
  }
  j["samples"] = std::move(rows);
  return j;
}

inline std::string EmitReportJson(const Report& report) {
  std::string out;
  detail::EmitJson(ReportToJson(report), out, 0);
  out += "\n";
  return out;
}

inline Report ParseReportJson(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  Report r;
  r.task = j.at("task").get<std::string>();
  r.model_id = j.at("model").get<std::string>();
  r.dataset_id = j.at("dataset").get<std::string>();
  r.metadata = j.at("metadata");
  if (!j.at("aggregate").is_null()) r.aggregate = detail::MetricsFromJson(j.at("aggregate"));
  for (const auto& row : j.at("samples")) {
    r.samples.push_back({row.at("sample_id").get<std::string>(),
                         row.at("status").get<std::string>(),
                         row.at("flags").get<std::vector<std::string>>(),
                         detail::MetricsFromJson(row.at("metrics"))});
  }
  return r;
}

// One row per sample, then an "aggregate" row. Missing values are empty.
inline std::string EmitReportCsv(const Report& report) {
  std::vector<std::string> names;
  auto add_names = [&](const std::vector<Metric>& metrics) {
    for (const auto& m : metrics) {
      if (std::find(names.begin(), names.end(), m.name) == names.end()) names.push_back(m.name);
    }
  };
  for (const auto& row : report.samples) add_names(row.metrics);
  if (report.aggregate) add_names(*report.aggregate);

  auto value_of = [](const std::vector<Metric>& metrics, const std::string& name) -> std::string {
    for (const auto& m : metrics) {
      if (m.name == name) return m.value ? FormatNumber(*m.value) : "";
    }
    return "";
  };
  std::string out = "sample_id,status,flags";
  for (const auto& n : names) out += "," + n;
  out += "\n";
  for (const auto& row : report.samples) {
    std::string flags;
    for (std::size_t i = 0; i < row.flags.size(); ++i) flags += (i ? ";" : "") + row.flags[i];
    out += row.sample_id + "," + row.status + ",\"" + flags + "\"";
    for (const auto& n : names) out += "," + value_of(row.metrics, n);
    out += "\n";
  }
  out += "aggregate," + std::string(report.aggregate ? "ok" : "empty") + ",\"\"";
  for (const auto& n : names) out += "," + (report.aggregate ? value_of(*report.aggregate, n) : "");
  out += "\n";
  return out;
}

enum class ReportFormat { kJson, kCsv };

inline void emit_report(const Report& report, ReportFormat format, const fs::path& path) {
  io::WriteAtomic(path, format == ReportFormat::kJson ? EmitReportJson(report)
                                                      : EmitReportCsv(report));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline std::optional<RasterImage> LoadGenerated(const fs::path& dir, const std::string& id) {
  const fs::path path = dir / (id + ".png");
  if (!fs::exists(path)) return std::nullopt;
  return io::ReadPngRgb(path);
}

// Runs fn(i) for i in [0, n) on a bounded pool. fn must only touch slot i.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

inline NormalField DecodeGeneratedNormals(const RasterImage& generated, std::size_t w,
                                          std::size_t h) {
  return decode_normals(resize_bilinear(generated, w, h), kQuantizedZeroNorm);
}

struct SampleOutcome {
  SampleRow row;
  bool evaluated = false;
  // depth
  std::optional<DepthMetrics> depth;
  // normals: per-sample partial sums
  std::vector<float> errors;
  double error_sum = 0.0;
  std::array<std::uint64_t, 3> below{};
  // segmentation
  std::optional<ConfusionMatrix> confusion;
};

inline std::vector<std::size_t> SortedOrder(const std::vector<PreparedSample>& samples) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].sample_id < samples[b].sample_id;
  });
  return order;
}

inline void CheckTaskMatches(EvalTask task, const std::vector<PreparedSample>& samples) {
  for (const auto& s : samples) {
    const Task t = TaskOf(s.gt_kind);
    const bool ok = (task == EvalTask::kDepth && t == Task::kDepth) ||
                    (task == EvalTask::kNormals && t == Task::kNormals) ||
                    (IsSegmentation(task) && t == Task::kSegmentation);
    Check(ok, "task " + ToString(task) + " does not match ground truth kind " +
                  ToString(s.gt_kind) + " of sample " + s.sample_id);
  }
}

inline std::string DatasetIdOf(const std::vector<PreparedSample>& samples) {
  Check(!samples.empty(), "prepared dataset has no samples");
  const std::string id = samples.front().dataset_id;
  for (const auto& s : samples) {
    Check(s.dataset_id == id, "manifest mixes datasets " + id + " and " + s.dataset_id);
  }
  return id;
}

}  // namespace detail

struct CalibrationOutcome {
  CalibrationRecord record;
  bool computed = false;
};

inline std::optional<CalibrationRecord> ReadCalibrationCache(const fs::path& path,
                                                             const std::string& model_id,
                                                             const std::string& dataset_id) {
  if (!fs::exists(path)) return std::nullopt;
  auto record = CalibrationRecord::Parse(io::ReadText(path));
  if (record.model_id != model_id || record.dataset_id != dataset_id) {
    throw IoError("calibration cache conflict: " + path.string() + " holds " + record.model_id +
                  "/" + record.dataset_id + ", expected " + model_id + "/" + dataset_id);
  }
  return record;
}

// Calibrates on the first k samples (sorted by sample_id) that have a
// generated output, and caches the record. An existing record is reused
// unless force is set.
inline CalibrationOutcome calibrate(const EvalConfig& config) {
  Check(config.task == EvalTask::kNormals, "calibration applies to the normals task only");
  auto samples = ReadManifest(config.prepared_dir);
  detail::CheckTaskMatches(config.task, samples);
  const std::string dataset_id = detail::DatasetIdOf(samples);
  const fs::path cache = CalibrationCachePath(config.cache_dir, config.model_id, dataset_id);
  if (!config.force_calibration) {
    if (auto existing = ReadCalibrationCache(cache, config.model_id, dataset_id)) {
      return {std::move(*existing), false};
    }
  }

  SortSamples(samples);
  std::vector<NormalSample> subset;
  for (const auto& s : samples) {
    if (subset.size() == kCalibrationSamples) break;
    auto generated = detail::LoadGenerated(config.generated_dir, s.sample_id);
    if (!generated) continue;
    NormalField gt = LoadNormalGt(config.prepared_dir, s);
    subset.push_back({s.sample_id,
                      detail::DecodeGeneratedNormals(*generated, gt.width(), gt.height()),
                      std::move(gt)});
  }
  Check(!subset.empty(), "calibration needs at least one sample with a generated output");
  CalibrationRecord record{config.model_id, dataset_id,
                           calibrate_convention(subset, kCalibrationSamples)};
  const std::string text = record.Serialize();
  io::WriteAtomic(cache, text);
  // Reports always see the record as stored.
  return {CalibrationRecord::Parse(text), true};
}

inline Report evaluate(const EvalConfig& config) {
  const auto samples = ReadManifest(config.prepared_dir);
  detail::CheckTaskMatches(config.task, samples);
  const std::string dataset_id = detail::DatasetIdOf(samples);

  Report report;
  report.task = ToString(config.task);
  report.model_id = config.model_id;
  report.dataset_id = dataset_id;

  nlohmann::ordered_json config_echo;
  config_echo["task"] = report.task;
  config_echo["model"] = config.model_id;
  config_echo["dataset"] = dataset_id;
  config_echo["eigen_crop"] = config.options.eigen_crop;
  if (config.options.depth_cap) {
    config_echo["depth_cap"] = {config.options.depth_cap->first, config.options.depth_cap->second};
  } else {
    config_echo["depth_cap"] = nullptr;
  }

  std::optional<CalibrationRecord> calibration;
  std::string calibration_error;
  if (config.task == EvalTask::kNormals) {
    try {
      calibration = calibrate(config).record;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kIo) throw;
      calibration_error = e.what();
    }
  }
  const AxisConvention convention = calibration ? calibration->result.convention : AxisConvention{};

  std::vector<detail::SampleOutcome> outcomes(samples.size());
  detail::ParallelFor(samples.size(), config.options.jobs, [&](std::size_t index) {
    const PreparedSample& s = samples[index];
    auto& out = outcomes[index];
    out.row.sample_id = s.sample_id;
    try {
      auto generated = detail::LoadGenerated(config.generated_dir, s.sample_id);
      if (!generated) {
        out.row.status = "missing";
        out.row.flags.push_back("missing_generated_output");
        return;
      }
      switch (config.task) {
        case EvalTask::kDepth: {
          ScalarField gt = LoadDepthGt(config.prepared_dir, s);
          if (config.options.depth_cap) {
            apply_depth_caps(gt, config.options.depth_cap->first, config.options.depth_cap->second);
          }
          if (config.options.eigen_crop) apply_eigen_crop(gt);
          const ScalarField pred =
              decode_luminance(resize_bilinear(*generated, gt.width(), gt.height()));
          try {
            const auto aligned = affine_align(pred, gt);
            out.depth = depth_metrics(aligned.aligned, gt);
            out.row.status = "ok";
            out.row.metrics = {{"delta1", out.depth->delta1},
                               {"absrel", out.depth->absrel},
                               {"rmse", out.depth->rmse},
                               {"fit_scale", aligned.fit.scale},
                               {"fit_offset", aligned.fit.offset},
                               {"fit_residual_rms", aligned.fit.residual_rms}};
          } catch (const DegenerateFitError& e) {
            out.depth = worst_case_depth_metrics(gt);
            out.row.status = "degenerate";
            out.row.flags.push_back("degenerate_fit");
            out.row.metrics = {{"delta1", out.depth->delta1},
                               {"absrel", out.depth->absrel},
                               {"rmse", out.depth->rmse},
                               {"fit_scale", e.fallback().scale},
                               {"fit_offset", e.fallback().offset},
                               {"fit_residual_rms", e.fallback().residual_rms}};
          }
          out.evaluated = true;
          break;
        }
        case EvalTask::kNormals: {
          const NormalField gt = LoadNormalGt(config.prepared_dir, s);
          const NormalField pred = apply_convention(
              detail::DecodeGeneratedNormals(*generated, gt.width(), gt.height()), convention);
          const auto errors = angular_error(pred, gt);
          if (errors.empty()) {
            out.row.status = "failed";
            out.row.flags.push_back("no_decodable_pixels");
            return;
          }
          const NormalMetrics m = normal_metrics(errors);
          out.errors.assign(errors.begin(), errors.end());
          for (double e : errors) {
            out.error_sum += e;
            for (std::size_t t = 0; t < kAngleThresholds.size(); ++t) {
              if (e < kAngleThresholds[t]) ++out.below[t];
            }
          }
          out.row.status = "ok";
          out.row.metrics = {{"mean_deg", m.mean_deg}, {"median_deg", m.median_deg},
                             {"a11", m.a11},           {"a22", m.a22},
                             {"a30", m.a30},           {"pixels", double(errors.size())}};
          out.evaluated = true;
          break;
        }
        case EvalTask::kSeg19:
        case EvalTask::kSeg7: {
          const bool coarse = config.task == EvalTask::kSeg7;
          const LabelSpace& space = coarse ? CityscapesCategorySpace() : CityscapesSpace();
          const Palette& palette = PaletteFor(config);
          LabelMap gt = LoadLabelGt(config.prepared_dir, s);
          if (coarse) gt = group_to_categories(gt, CityscapesSpace());
          const auto classes = oracle_class_list(gt, space);
          ConfusionMatrix cm(space.size());
          if (!classes.empty()) {
            const RasterImage resized =
                resize_nearest(*generated, gt.width(), gt.height());
            accumulate_confusion(decode_palette(resized, classes, palette), gt, space, cm);
          }
          if (cm.Total() == 0) {
            out.row.status = "failed";
            out.row.flags.push_back("no_labeled_pixels");
            return;
          }
          const SegMetrics m = seg_metrics(cm, space);
          out.row.status = "ok";
          out.row.metrics = {{"miou", m.miou},
                             {"pixel_acc", m.pixel_acc},
                             {"classes", double(classes.size())}};
          out.confusion = std::move(cm);
          out.evaluated = true;
          break;
        }
      }
    } catch (const std::exception& e) {
      out = detail::SampleOutcome{};
      out.row.sample_id = s.sample_id;
      out.row.status = "failed";
      out.row.flags.push_back(std::string("error: ") + e.what());
    }
  });

  // Aggregates run in sample_id order so they do not depend on manifest order.
  const auto order = detail::SortedOrder(samples);
  std::size_t evaluated = 0;
  std::size_t missing = 0;
  std::size_t failed = 0;
  std::size_t degenerate = 0;
  for (const auto& o : outcomes) {
    if (o.evaluated) ++evaluated;
    if (o.row.status == "missing") ++missing;
    if (o.row.status == "failed") ++failed;
    if (o.row.status == "degenerate") ++degenerate;
    report.samples.push_back(o.row);
  }

  nlohmann::ordered_json meta;
  meta["tool_version"] = kToolVersion;
  meta["sample_count"] = samples.size();
  meta["evaluated_count"] = evaluated;
  meta["missing_count"] = missing;
  meta["failed_count"] = failed;
  meta["degenerate_count"] = degenerate;

  switch (config.task) {
    case EvalTask::kDepth: {
      meta["aggregation"] = "per-image mean (degenerate samples scored as zero prediction)";
      meta["alignment"] = "per-image least-squares scale and offset";
      meta["delta1_threshold"] = kDelta1Threshold;
      if (evaluated > 0) {
        DepthMetrics sum;
        for (std::size_t i : order) {
          if (!outcomes[i].depth) continue;
          sum.delta1 += outcomes[i].depth->delta1;
          sum.absrel += outcomes[i].depth->absrel;
          sum.rmse += outcomes[i].depth->rmse;
        }
        const double n = double(evaluated);
        report.aggregate = std::vector<Metric>{
            {"delta1", sum.delta1 / n}, {"absrel", sum.absrel / n}, {"rmse", sum.rmse / n}};
      }
      break;
    }
    case EvalTask::kNormals: {
      meta["aggregation"] = "pixel-pooled over dataset";
      nlohmann::ordered_json calib;
      if (calibration) {
        calib["convention"] = calibration->result.convention.ToString();
        calib["permutation"] = calibration->result.convention.perm;
        calib["signs"] = calibration->result.convention.signs;
        calib["k"] = calibration->result.sample_ids.size();
        calib["samples"] = calibration->result.sample_ids;
        calib["pixels"] = calibration->result.pixels;
        calib["mean_errors"] = calibration->result.mean_errors;
      } else {
        calib["convention"] = AxisConvention{}.ToString();
        calib["error"] = calibration_error;
      }
      meta["calibration"] = calib;
      std::uint64_t pixels = 0;
      double sum = 0.0;
      std::array<std::uint64_t, 3> below{};
      std::vector<double> pooled;
      for (std::size_t i : order) {
        const auto& o = outcomes[i];
        if (!o.evaluated) continue;
        pixels += o.errors.size();
        sum += o.error_sum;
        for (std::size_t t = 0; t < 3; ++t) below[t] += o.below[t];
        pooled.insert(pooled.end(), o.errors.begin(), o.errors.end());
      }
      nlohmann::ordered_json pool;
      pool["pixels"] = pixels;
      pool["sum_deg"] = sum;
      pool["below_11_25"] = below[0];
      pool["below_22_5"] = below[1];
      pool["below_30"] = below[2];
      meta["pooled"] = pool;
      if (pixels > 0) {
        const NormalMetrics median_source = normal_metrics(pooled);
        const double n = double(pixels);
        report.aggregate = std::vector<Metric>{{"mean_deg", sum / n},
                                               {"median_deg", median_source.median_deg},
                                               {"a11", 100.0 * double(below[0]) / n},
                                               {"a22", 100.0 * double(below[1]) / n},
                                               {"a30", 100.0 * double(below[2]) / n}};
      }
      break;
    }
    case EvalTask::kSeg19:
    case EvalTask::kSeg7: {
      const bool coarse = config.task == EvalTask::kSeg7;
      const LabelSpace& space = coarse ? CityscapesCategorySpace() : CityscapesSpace();
      const Palette& palette = PaletteFor(config);
      meta["aggregation"] = "dataset confusion matrix";
      meta["palette_version"] = palette.version();
      meta["label_space"] = space.name();
      ConfusionMatrix total(space.size());
      for (std::size_t i : order) {
        if (outcomes[i].confusion) total += *outcomes[i].confusion;
      }
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (std::size_t g = 0; g <= total.num_classes(); ++g) {
        std::vector<std::uint64_t> row;
        for (std::size_t p = 0; p <= total.num_classes(); ++p) row.push_back(total.at(g, p));
        rows.push_back(row);
      }
      meta["confusion_background_index"] = total.background_index();
      meta["confusion"] = rows;
      if (total.Total() > 0) {
        const SegMetrics m = seg_metrics(total, space);
        std::vector<Metric> agg = {{"miou", m.miou}, {"pixel_acc", m.pixel_acc}};
        for (const auto& c : m.per_class_iou) {
          std::string name = "iou_" + space.Get(c.id).name;
          std::replace(name.begin(), name.end(), ' ', '_');
          agg.push_back({name, c.iou});
        }
        report.aggregate = std::move(agg);
      }
      break;
    }
  }
  meta["config"] = config_echo;
  report.metadata = meta;
  return report;
}

}  // namespace pdeval
