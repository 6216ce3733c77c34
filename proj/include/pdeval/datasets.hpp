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

// Prepared-dataset layout and ingestion of the official distributions.
//
// A prepared dataset is a directory holding `manifest.jsonl` (one sample per
// line, fixed key order, sorted by sample_id) plus `images/` and `gt/`. Paths
// in the manifest are relative to that directory. Ground truth comes in four
// kinds:
//
//   depth16        16-bit grayscale PNG, millimeters, 0 = invalid
//   depth_raw_f32  DCF32 float plane in meters, <= 0 or non-finite = invalid
//   normals_png    8-bit RGB normal map plus an optional 8-bit mask PNG
//   labels_png     8-bit grayscale train ids, 255 = ignore

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdeval/core.hpp"
#include "pdeval/depth.hpp"
#include "pdeval/io.hpp"
#include "pdeval/normals.hpp"
#include "pdeval/segmentation.hpp"
#include "pdeval/synth.hpp"

namespace pdeval {

namespace fs = std::filesystem;

enum class GtKind { kDepth16, kDepthRawF32, kNormalsPng, kLabelsPng };
enum class Task { kDepth, kNormals, kSegmentation };

inline std::string ToString(GtKind kind) {
  switch (kind) {
    case GtKind::kDepth16: return "depth16";
    case GtKind::kDepthRawF32: return "depth_raw_f32";
    case GtKind::kNormalsPng: return "normals_png";
    case GtKind::kLabelsPng: return "labels_png";
  }
  return "";
}

inline GtKind GtKindFromString(const std::string& s) {
  if (s == "depth16") return GtKind::kDepth16;
  if (s == "depth_raw_f32") return GtKind::kDepthRawF32;
  if (s == "normals_png") return GtKind::kNormalsPng;
  if (s == "labels_png") return GtKind::kLabelsPng;
  throw ValidationError("unknown gt_kind '" + s + "'");
}

inline Task TaskOf(GtKind kind) {
  switch (kind) {
    case GtKind::kDepth16:
    case GtKind::kDepthRawF32: return Task::kDepth;
    case GtKind::kNormalsPng: return Task::kNormals;
    case GtKind::kLabelsPng: return Task::kSegmentation;
  }
  return Task::kDepth;
}

struct PreparedSample {
  std::string sample_id;
  std::string dataset_id;
  GtKind gt_kind = GtKind::kDepth16;
  std::size_t width = 0;
  std::size_t height = 0;
  std::string input_path;
  std::string gt_path;
  std::string mask_path;
  std::string provenance;

  friend bool operator==(const PreparedSample&, const PreparedSample&) = default;
};

inline nlohmann::ordered_json ToJson(const PreparedSample& s) {
  nlohmann::ordered_json j;
  j["sample_id"] = s.sample_id;
  j["dataset_id"] = s.dataset_id;
  j["gt_kind"] = ToString(s.gt_kind);
  j["width"] = s.width;
  j["height"] = s.height;
  j["input_path"] = s.input_path;
  j["gt_path"] = s.gt_path;
  j["mask_path"] = s.mask_path;
  j["provenance"] = s.provenance;
  return j;
}

inline PreparedSample SampleFromJson(const nlohmann::json& j) {
  PreparedSample s;
  s.sample_id = j.at("sample_id").get<std::string>();
  s.dataset_id = j.at("dataset_id").get<std::string>();
  s.gt_kind = GtKindFromString(j.at("gt_kind").get<std::string>());
  s.width = j.at("width").get<std::size_t>();
  s.height = j.at("height").get<std::size_t>();
  s.input_path = j.at("input_path").get<std::string>();
  s.gt_path = j.at("gt_path").get<std::string>();
  s.mask_path = j.value("mask_path", "");
  s.provenance = j.value("provenance", "");
  return s;
}

inline void SortSamples(std::vector<PreparedSample>& samples) {
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
}

inline std::string EncodeManifest(std::vector<PreparedSample> samples) {
  SortSamples(samples);
  std::string out;
  for (const auto& s : samples) out += ToJson(s).dump() + "\n";
  return out;
}

inline std::vector<PreparedSample> DecodeManifest(const std::string& text) {
  std::vector<PreparedSample> samples;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      samples.push_back(SampleFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return samples;
}

inline void WriteManifest(const fs::path& dir, const std::vector<PreparedSample>& samples) {
  io::WriteAtomic(dir / "manifest.jsonl", EncodeManifest(samples));
}

inline std::vector<PreparedSample> ReadManifest(const fs::path& dir) {
  return DecodeManifest(io::ReadText(dir / "manifest.jsonl"));
}

// Official split sizes and resolutions.
struct DatasetSpec {
  std::string dataset_id;
  Task task = Task::kDepth;
  std::size_t expected_count = 0;
  std::optional<std::pair<std::size_t, std::size_t>> resolution;  // (width, height)
};

inline const std::vector<DatasetSpec>& KnownDatasets() {
  static const std::vector<DatasetSpec> specs = {
      {"nyuv2", Task::kDepth, 654, std::pair<std::size_t, std::size_t>{640, 480}},
      {"nyuv2-normals", Task::kNormals, 654, std::pair<std::size_t, std::size_t>{640, 480}},
      {"diode-indoor", Task::kDepth, 771, std::pair<std::size_t, std::size_t>{1024, 768}},
      {"diode-outdoor", Task::kDepth, 446, std::pair<std::size_t, std::size_t>{1024, 768}},
      {"cityscapes", Task::kSegmentation, 500, std::nullopt},
  };
  return specs;
}

inline const DatasetSpec& FindDatasetSpec(const std::string& id) {
  for (const auto& s : KnownDatasets()) {
    if (s.dataset_id == id) return s;
  }
  throw ValidationError("unknown dataset '" + id + "'");
}

struct ValidationReport {
  bool ok = true;
  std::size_t expected_count = 0;
  std::size_t actual_count = 0;
  std::size_t resolution_mismatches = 0;
  std::vector<std::string> messages;
};

// Checks sample count, declared resolutions and task/gt_kind agreement
// against an official split description.
inline ValidationReport validate_samples(std::span<const PreparedSample> samples,
                                         const DatasetSpec& spec) {
  ValidationReport r;
  r.expected_count = spec.expected_count;
  r.actual_count = samples.size();
  if (samples.size() != spec.expected_count) {
    r.ok = false;
    r.messages.push_back(spec.dataset_id + ": expected " + std::to_string(spec.expected_count) +
                         " samples, found " + std::to_string(samples.size()));
  }
  for (const auto& s : samples) {
    if (TaskOf(s.gt_kind) != spec.task) {
      r.ok = false;
      r.messages.push_back(s.sample_id + ": gt_kind " + ToString(s.gt_kind) +
                           " does not match the dataset task");
    }
    if (spec.resolution && (s.width != spec.resolution->first ||
                            s.height != spec.resolution->second)) {
      if (r.resolution_mismatches == 0) {
        r.messages.push_back(spec.dataset_id + ": sample " + s.sample_id + " is " +
                             std::to_string(s.width) + "x" + std::to_string(s.height) +
                             ", expected " + std::to_string(spec.resolution->first) + "x" +
                             std::to_string(spec.resolution->second));
      }
      ++r.resolution_mismatches;
      r.ok = false;
    }
  }
  if (r.resolution_mismatches > 1) {
    r.messages.push_back(spec.dataset_id + ": " + std::to_string(r.resolution_mismatches) +
                         " samples have an unexpected resolution");
  }
  return r;
}

// Confirms every referenced file exists and parses to the declared size.
inline std::vector<std::string> check_sample_files(const fs::path& dir,
                                                   std::span<const PreparedSample> samples) {
  std::vector<std::string> problems;
  for (const auto& s : samples) {
    try {
      const auto in = io::ReadPngHeader(dir / s.input_path);
      if (in.width != s.width || in.height != s.height) {
        problems.push_back(s.sample_id + ": input image size differs from manifest");
      }
      std::size_t gw = 0;
      std::size_t gh = 0;
      if (s.gt_kind == GtKind::kDepthRawF32) {
        const auto plane = io::ReadF32Plane(dir / s.gt_path);
        gw = plane.width();
        gh = plane.height();
      } else {
        const auto h = io::ReadPngHeader(dir / s.gt_path);
        gw = h.width;
        gh = h.height;
      }
      if (gw != s.width || gh != s.height) {
        problems.push_back(s.sample_id + ": ground truth size differs from manifest");
      }
      if (!s.mask_path.empty() && !fs::exists(dir / s.mask_path)) {
        problems.push_back(s.sample_id + ": mask file is missing");
      }
    } catch (const Error& e) {
      problems.push_back(s.sample_id + ": " + e.what());
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Ground-truth loaders

inline ScalarField DepthFromMillimeters(const Grid<std::uint16_t>& mm) {
  ScalarField f(mm.width(), mm.height());
  for (std::size_t i = 0; i < mm.size(); ++i) {
    if (mm[i] == 0) continue;
    f.values[i] = mm[i] / 1000.0;
    f.valid[i] = 1;
  }
  return f;
}

inline ScalarField DepthFromPlane(const Grid<float>& plane) {
  ScalarField f(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const float v = plane[i];
    if (!std::isfinite(v) || v <= 0.0F) continue;
    f.values[i] = v;
    f.valid[i] = 1;
  }
  return f;
}

inline ScalarField LoadDepthGt(const fs::path& dir, const PreparedSample& s) {
  switch (s.gt_kind) {
    case GtKind::kDepth16: return DepthFromMillimeters(io::ReadPngGray16(dir / s.gt_path));
    case GtKind::kDepthRawF32: return DepthFromPlane(io::ReadF32Plane(dir / s.gt_path));
    default: throw ValidationError(s.sample_id + ": ground truth is not depth");
  }
}

inline NormalField LoadNormalGt(const fs::path& dir, const PreparedSample& s) {
  Check(s.gt_kind == GtKind::kNormalsPng, s.sample_id + ": ground truth is not a normal map");
  NormalField f = decode_normals(io::ReadPngRgb(dir / s.gt_path));
  if (!s.mask_path.empty()) {
    const auto mask = io::ReadPngGray8(dir / s.mask_path);
    Check(mask.SameShape(f.width(), f.height()), s.sample_id + ": normal mask size mismatch");
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i] == 0) f.valid[i] = 0;
    }
  }
  return f;
}

inline LabelMap LoadLabelGt(const fs::path& dir, const PreparedSample& s) {
  Check(s.gt_kind == GtKind::kLabelsPng, s.sample_id + ": ground truth is not a label map");
  auto grid = io::ReadPngGray8(dir / s.gt_path);
  LabelMap map;
  map.labels = std::move(grid);
  return map;
}

// ---------------------------------------------------------------------------
// Ingestion

struct IngestResult {
  std::vector<PreparedSample> samples;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<fs::path> SortedFiles(const fs::path& dir, const std::string& suffix,
                                         bool recursive) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) throw IoError("missing directory " + dir.string());
  auto consider = [&](const fs::directory_entry& e) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.size() >= suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      out.push_back(e.path());
    }
  };
  if (recursive) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) consider(e);
  } else {
    for (const auto& e : fs::directory_iterator(dir)) consider(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string StripSuffix(const std::string& name, const std::string& suffix) {
  return name.substr(0, name.size() - suffix.size());
}

inline void CopyInto(const fs::path& from, const fs::path& to) {
  fs::create_directories(to.parent_path());
  std::error_code ec;
  fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
  if (ec) throw IoError("cannot copy " + from.string() + ": " + ec.message());
}

}  // namespace detail

// root/rgb/<id>.png with root/depth/<id>.png (16-bit, millimeters).
inline IngestResult ingest_nyuv2_depth(const fs::path& root, const fs::path& out) {
  IngestResult result;
  for (const auto& rgb : detail::SortedFiles(root / "rgb", ".png", false)) {
    const std::string id = rgb.stem().string();
    const fs::path depth = root / "depth" / (id + ".png");
    if (!fs::exists(depth)) {
      result.warnings.push_back(id + ": no depth map, skipped");
      continue;
    }
    const auto in = io::ReadPngHeader(rgb);
    const auto gt = io::ReadPngGray16(depth);
    if (gt.width() != in.width || gt.height() != in.height) {
      result.warnings.push_back(id + ": depth and image sizes differ, skipped");
      continue;
    }
    detail::CopyInto(rgb, out / "images" / (id + ".png"));
    io::WritePngGray16(out / "gt" / (id + ".png"), gt);
    result.samples.push_back({id, "nyuv2", GtKind::kDepth16, in.width, in.height,
                              "images/" + id + ".png", "gt/" + id + ".png", "",
                              "nyuv2 depth png (mm)"});
  }
  SortSamples(result.samples);
  return result;
}

// root/rgb/<id>.png with root/normals/<id>.png and an optional
// root/normals_mask/<id>.png. Stored maps use the (n + 1) / 2 encoding.
inline IngestResult ingest_nyuv2_normals(const fs::path& root, const fs::path& out) {
  IngestResult result;
  for (const auto& rgb : detail::SortedFiles(root / "rgb", ".png", false)) {
    const std::string id = rgb.stem().string();
    const fs::path normals = root / "normals" / (id + ".png");
    if (!fs::exists(normals)) {
      result.warnings.push_back(id + ": no normal map, skipped");
      continue;
    }
    const auto in = io::ReadPngHeader(rgb);
    const auto gt = io::ReadPngHeader(normals);
    if (gt.width != in.width || gt.height != in.height) {
      result.warnings.push_back(id + ": normal map and image sizes differ, skipped");
      continue;
    }
    detail::CopyInto(rgb, out / "images" / (id + ".png"));
    detail::CopyInto(normals, out / "gt" / (id + ".png"));
    std::string mask_path;
    const fs::path mask = root / "normals_mask" / (id + ".png");
    if (fs::exists(mask)) {
      detail::CopyInto(mask, out / "gt" / (id + "_mask.png"));
      mask_path = "gt/" + id + "_mask.png";
    }
    result.samples.push_back({id, "nyuv2-normals", GtKind::kNormalsPng, in.width, in.height,
                              "images/" + id + ".png", "gt/" + id + ".png", mask_path,
                              "nyuv2 normal map png, stored convention (n+1)/2 camera frame"});
  }
  SortSamples(result.samples);
  return result;
}

enum class DiodeSplit { kIndoor, kOutdoor };

// Official layout: <root>[/val]/{indoors,outdoor}/<scene>/<scan>/<name>.png
// with <name>_depth.npy and <name>_depth_mask.npy. Validity is
// (mask > 0) and (depth > 0); invalid pixels are stored as 0.
inline IngestResult ingest_diode(const fs::path& root, DiodeSplit split, const fs::path& out) {
  const std::string split_dir = split == DiodeSplit::kIndoor ? "indoors" : "outdoor";
  const std::string dataset_id = split == DiodeSplit::kIndoor ? "diode-indoor" : "diode-outdoor";
  fs::path base = root;
  if (fs::is_directory(root / "val" / split_dir)) {
    base = root / "val" / split_dir;
  } else if (fs::is_directory(root / split_dir)) {
    base = root / split_dir;
  }
  IngestResult result;
  const std::string suffix = "_depth.npy";
  for (const auto& depth_path : detail::SortedFiles(base, suffix, true)) {
    const std::string stem = detail::StripSuffix(depth_path.filename().string(), suffix);
    const fs::path rgb = depth_path.parent_path() / (stem + ".png");
    const fs::path mask_path = depth_path.parent_path() / (stem + "_depth_mask.npy");
    if (!fs::exists(rgb) || !fs::exists(mask_path)) {
      result.warnings.push_back(stem + ": missing image or validity mask, skipped");
      continue;
    }
    const auto in = io::ReadPngHeader(rgb);
    auto depth = io::ReadNpy(depth_path);
    const auto mask = io::ReadNpy(mask_path);
    if (!depth.SameShape(in.width, in.height) || !mask.SameShape(in.width, in.height)) {
      result.warnings.push_back(stem + ": depth/mask/image sizes differ, skipped");
      continue;
    }
    for (std::size_t i = 0; i < depth.size(); ++i) {
      if (!(mask[i] > 0.0F) || !(depth[i] > 0.0F) || !std::isfinite(depth[i])) depth[i] = 0.0F;
    }
    detail::CopyInto(rgb, out / "images" / (stem + ".png"));
    io::WriteF32Plane(out / "gt" / (stem + ".dcf32"), depth);
    result.samples.push_back({stem, dataset_id, GtKind::kDepthRawF32, in.width, in.height,
                              "images/" + stem + ".png", "gt/" + stem + ".dcf32", "",
                              "diode " + split_dir + " npy depth with mask"});
  }
  SortSamples(result.samples);
  return result;
}

// Standard Cityscapes labelId -> trainId table; ids 0..33 outside the 19
// evaluated classes map to ignore. Returns nullopt for unknown ids.
inline std::optional<Label> CityscapesTrainId(int label_id) {
  static constexpr int kTable[34] = {255, 255, 255, 255, 255, 255, 255, 0,   1,   255, 255, 2,
                                     3,   4,   255, 255, 255, 5,   255, 6,   7,   8,   9,   10,
                                     11,  12,  13,  14,  15,  255, 255, 16,  17,  18};
  if (label_id < 0 || label_id > 33) return std::nullopt;
  return static_cast<Label>(kTable[label_id]);
}

inline LabelMap RemapCityscapesLabelIds(const Grid<std::uint8_t>& ids, std::size_t& unknown) {
  LabelMap out(ids.width(), ids.height());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto train = CityscapesTrainId(ids[i]);
    if (!train) ++unknown;
    out.labels[i] = train.value_or(kIgnoreLabel);
  }
  return out;
}

// Official layout: root/leftImg8bit/val/<city>/<name>_leftImg8bit.png with
// root/gtFine/val/<city>/<name>_gtFine_labelIds.png.
inline IngestResult ingest_cityscapes(const fs::path& root, const fs::path& out) {
  IngestResult result;
  const std::string suffix = "_leftImg8bit.png";
  std::size_t unknown_total = 0;
  for (const auto& rgb : detail::SortedFiles(root / "leftImg8bit" / "val", suffix, true)) {
    const std::string id = detail::StripSuffix(rgb.filename().string(), suffix);
    const std::string city = rgb.parent_path().filename().string();
    const fs::path labels = root / "gtFine" / "val" / city / (id + "_gtFine_labelIds.png");
    if (!fs::exists(labels)) {
      result.warnings.push_back(id + ": no labelIds annotation, skipped");
      continue;
    }
    const auto in = io::ReadPngHeader(rgb);
    const auto ids = io::ReadPngGray8(labels);
    if (!ids.SameShape(in.width, in.height)) {
      result.warnings.push_back(id + ": annotation and image sizes differ, skipped");
      continue;
    }
    std::size_t unknown = 0;
    const LabelMap train = RemapCityscapesLabelIds(ids, unknown);
    if (unknown > 0) {
      result.warnings.push_back(id + ": " + std::to_string(unknown) +
                                " pixels with unknown labelIds set to ignore");
      unknown_total += unknown;
    }
    detail::CopyInto(rgb, out / "images" / (id + ".png"));
    io::WritePngGray8(out / "gt" / (id + ".png"), train.labels);
    result.samples.push_back({id, "cityscapes", GtKind::kLabelsPng, in.width, in.height,
                              "images/" + id + ".png", "gt/" + id + ".png", "",
                              "cityscapes gtFine labelIds remapped to trainIds"});
  }
  if (unknown_total > 0) {
    result.warnings.push_back("total pixels with unknown labelIds: " + std::to_string(unknown_total));
  }
  SortSamples(result.samples);
  return result;
}

// ---------------------------------------------------------------------------
// Synthetic prepared datasets

struct SynthDatasetSpec {
  std::size_t count = 8;
  std::size_t width = 64;
  std::size_t height = 48;
  std::uint64_t seed = 0;
  std::vector<SceneSpec> scenes;  // explicit scenes override count/seed
  bool write_generated = true;
};

inline SynthDatasetSpec SynthDatasetSpecFromJson(const nlohmann::json& j) {
  SynthDatasetSpec spec;
  spec.count = j.value("count", spec.count);
  spec.width = j.value("width", spec.width);
  spec.height = j.value("height", spec.height);
  spec.seed = j.value("seed", spec.seed);
  spec.write_generated = j.value("generated", spec.write_generated);
  for (const auto& s : j.value("scenes", nlohmann::json::array())) {
    spec.scenes.push_back(SceneSpecFromJson(s));
  }
  return spec;
}

inline std::vector<SceneSpec> ExpandScenes(const SynthDatasetSpec& spec) {
  if (!spec.scenes.empty()) return spec.scenes;
  std::vector<SceneSpec> scenes;
  for (std::size_t i = 0; i < spec.count; ++i) {
    scenes.push_back(RandomSceneSpec(spec.seed * 1000003ULL + i, spec.width, spec.height));
  }
  return scenes;
}

inline std::string SynthSampleId(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "synth_%05zu", index);
  return buf;
}

// Writes prepared datasets under out/{depth,normals,seg}. With
// write_generated, out/generated/{depth,normals,seg19,seg7} receive the
// ground truth rendered through each task's codec, i.e. a perfect model.
inline void write_synthetic_dataset(const fs::path& out, const SynthDatasetSpec& spec) {
  const auto scenes = ExpandScenes(spec);
  Check(!scenes.empty(), "synthetic dataset needs at least one scene");
  std::vector<PreparedSample> depth_samples;
  std::vector<PreparedSample> normal_samples;
  std::vector<PreparedSample> seg_samples;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const std::string id = SynthSampleId(i);
    const SynthScene scene = synth_scene(scenes[i]);
    const std::size_t w = scene.image.width();
    const std::size_t h = scene.image.height();
    const std::string image_rel = "images/" + id + ".png";

    io::WritePngRgb(out / "depth" / image_rel, scene.image);
    Grid<float> plane(w, h, 0.0F);
    for (std::size_t p = 0; p < plane.size(); ++p) {
      if (scene.depth.IsValid(p)) plane[p] = static_cast<float>(scene.depth.values[p]);
    }
    io::WriteF32Plane(out / "depth" / "gt" / (id + ".dcf32"), plane);
    depth_samples.push_back({id, "synthetic", GtKind::kDepthRawF32, w, h, image_rel,
                             "gt/" + id + ".dcf32", "", "synthetic ray cast"});

    io::WritePngRgb(out / "normals" / image_rel, scene.image);
    io::WritePngRgb(out / "normals" / "gt" / (id + ".png"), encode_normals(scene.normals));
    io::WritePngGray8(out / "normals" / "gt" / (id + "_mask.png"), scene.normals.valid);
    normal_samples.push_back({id, "synthetic", GtKind::kNormalsPng, w, h, image_rel,
                              "gt/" + id + ".png", "gt/" + id + "_mask.png",
                              "synthetic ray cast"});

    io::WritePngRgb(out / "seg" / image_rel, scene.image);
    io::WritePngGray8(out / "seg" / "gt" / (id + ".png"), scene.labels.labels);
    seg_samples.push_back({id, "synthetic", GtKind::kLabelsPng, w, h, image_rel,
                           "gt/" + id + ".png", "", "synthetic ray cast"});

    if (spec.write_generated) {
      const fs::path gen = out / "generated";
      io::WritePngRgb(gen / "depth" / (id + ".png"), encode_depth_gray(scene.depth));
      io::WritePngRgb(gen / "normals" / (id + ".png"), encode_normals(scene.normals));
      io::WritePngRgb(gen / "seg19" / (id + ".png"),
                      render_labels(scene.labels, CityscapesPalette()));
      io::WritePngRgb(gen / "seg7" / (id + ".png"),
                      render_labels(group_to_categories(scene.labels, CityscapesSpace()),
                                    CityscapesCategoryPalette()));
    }
  }
  WriteManifest(out / "depth", depth_samples);
  WriteManifest(out / "normals", normal_samples);
  WriteManifest(out / "seg", seg_samples);
}

}  // namespace pdeval
