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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pdeval/core.hpp"

namespace pdeval {

inline constexpr double kMinDecodedNorm = 1e-6;
inline constexpr std::array<double, 3> kAngleThresholds = {11.25, 22.5, 30.0};

// A signed axis permutation: out[i] = signs[i] * in[perm[i]].
struct AxisConvention {
  std::array<int, 3> perm = {0, 1, 2};
  std::array<int, 3> signs = {1, 1, 1};

  friend bool operator==(const AxisConvention&, const AxisConvention&) = default;

  static constexpr std::size_t kCount = 48;

  static constexpr std::array<std::array<int, 3>, 6> kPermutations = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  // Enumeration order is permutation-major; sign index bit 2 flips x,
  // bit 1 flips y, bit 0 flips z.
  static AxisConvention FromIndex(std::size_t index) {
    Check(index < kCount, "axis convention index out of range");
    AxisConvention c;
    c.perm = kPermutations[index / 8];
    const std::size_t s = index % 8;
    for (int i = 0; i < 3; ++i) c.signs[i] = ((s >> (2 - i)) & 1U) ? -1 : 1;
    return c;
  }

  std::size_t Index() const {
    std::size_t p = 0;
    while (kPermutations[p] != perm) ++p;
    std::size_t s = 0;
    for (int i = 0; i < 3; ++i) s = (s << 1) | (signs[i] < 0 ? 1U : 0U);
    return p * 8 + s;
  }

  AxisConvention Inverse() const {
    AxisConvention inv;
    for (int i = 0; i < 3; ++i) {
      inv.perm[perm[i]] = i;
      inv.signs[perm[i]] = signs[i];
    }
    return inv;
  }

  Vec3 Apply(const Vec3& v) const {
    return {signs[0] * v[perm[0]], signs[1] * v[perm[1]], signs[2] * v[perm[2]]};
  }

  // e.g. "(-y,+x,+z)": the source component feeding each output axis.
  std::string ToString() const {
    static constexpr char kAxis[] = {'x', 'y', 'z'};
    std::string s = "(";
    for (int i = 0; i < 3; ++i) {
      if (i > 0) s += ',';
      s += signs[i] < 0 ? '-' : '+';
      s += kAxis[perm[i]];
    }
    return s + ")";
  }
};

inline std::array<AxisConvention, AxisConvention::kCount> AllConventions() {
  std::array<AxisConvention, AxisConvention::kCount> all;
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = AxisConvention::FromIndex(i);
  return all;
}

struct NormalMetrics {
  double mean_deg = 0.0;
  double median_deg = 0.0;
  double a11 = 0.0;
  double a22 = 0.0;
  double a30 = 0.0;
};

// RGB = (n + 1) / 2; invalid pixels are mid-gray.
inline RasterImage encode_normals(const NormalField& field) {
  RasterImage out(field.width(), field.height(), Rgb{0.5, 0.5, 0.5});
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!field.IsValid(i)) continue;
    const Vec3& n = field.values[i];
    out[i] = {std::clamp((n.x + 1.0) / 2.0, 0.0, 1.0), std::clamp((n.y + 1.0) / 2.0, 0.0, 1.0),
              std::clamp((n.z + 1.0) / 2.0, 0.0, 1.0)};
  }
  return out;
}

// v = 2 RGB - 1, normalized; vectors shorter than min_norm become invalid.
inline NormalField decode_normals(const RasterImage& img, double min_norm = kMinDecodedNorm) {
  NormalField out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const Vec3 v{2.0 * img[i].r - 1.0, 2.0 * img[i].g - 1.0, 2.0 * img[i].b - 1.0};
    const double norm = Norm(v);
    if (norm >= min_norm) {
      out.values[i] = {v.x / norm, v.y / norm, v.z / norm};
      out.valid[i] = 1;
    }
  }
  return out;
}

inline NormalField apply_convention(const NormalField& field, const AxisConvention& conv) {
  NormalField out = field;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field.IsValid(i)) out.values[i] = conv.Apply(field.values[i]);
  }
  return out;
}

// Angle between two unit vectors in degrees. atan2 of the cross and dot
// products equals arccos of the clamped dot, without arccos's loss of
// precision near 0 and 180 degrees.
inline double AngleDegrees(const Vec3& a, const Vec3& b) {
  const double rad = std::atan2(Norm(Cross(a, b)), Dot(a, b));
  return rad * 180.0 / std::numbers::pi;
}

// Per-pixel angular error over jointly valid pixels, row-major.
inline std::vector<double> angular_error(const NormalField& pred, const NormalField& gt) {
  Check(pred.width() == gt.width() && pred.height() == gt.height(),
        "normal field dimensions differ: " + std::to_string(pred.width()) + "x" +
            std::to_string(pred.height()) + " vs " + std::to_string(gt.width()) + "x" +
            std::to_string(gt.height()));
  std::vector<double> errors;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred.IsValid(i) && gt.IsValid(i)) {
      errors.push_back(AngleDegrees(pred.values[i], gt.values[i]));
    }
  }
  return errors;
}

inline NormalMetrics normal_metrics(std::span<const double> errors) {
  Check(!errors.empty(), "normal metrics need at least one angular error");
  NormalMetrics m;
  std::array<std::size_t, 3> below = {0, 0, 0};
  double sum = 0.0;
  for (double e : errors) {
    sum += e;
    for (std::size_t t = 0; t < kAngleThresholds.size(); ++t) {
      if (e < kAngleThresholds[t]) ++below[t];
    }
  }
  const double n = static_cast<double>(errors.size());
  m.mean_deg = sum / n;

  std::vector<double> sorted(errors.begin(), errors.end());
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid),
                   sorted.end());
  const double upper = sorted[mid];
  if (sorted.size() % 2 == 1) {
    m.median_deg = upper;
  } else {
    const double lower =
        *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
    m.median_deg = 0.5 * (lower + upper);
  }
  m.a11 = 100.0 * static_cast<double>(below[0]) / n;
  m.a22 = 100.0 * static_cast<double>(below[1]) / n;
  m.a30 = 100.0 * static_cast<double>(below[2]) / n;
  return m;
}

struct NormalSample {
  std::string sample_id;
  NormalField pred;
  NormalField gt;
};

struct CalibrationResult {
  AxisConvention convention;
  std::array<double, AxisConvention::kCount> mean_errors{};
  std::vector<std::string> sample_ids;
  std::size_t pixels = 0;
};

// Tries every axis convention on the first k samples and keeps the one with
// the lowest pixel-pooled mean angular error. Ties go to the earliest
// convention in enumeration order.
inline CalibrationResult calibrate_convention(std::span<const NormalSample> samples,
                                              std::size_t k = 5) {
  Check(!samples.empty(), "calibration needs at least one sample");
  const std::size_t used = std::min(k, samples.size());
  CalibrationResult result;
  for (std::size_t s = 0; s < used; ++s) {
    const auto& sample = samples[s];
    Check(sample.pred.width() == sample.gt.width() && sample.pred.height() == sample.gt.height(),
          "calibration sample " + sample.sample_id + " has mismatched dimensions");
    result.sample_ids.push_back(sample.sample_id);
    for (std::size_t i = 0; i < sample.pred.size(); ++i) {
      if (sample.pred.IsValid(i) && sample.gt.IsValid(i)) ++result.pixels;
    }
  }
  Check(result.pixels > 0, "calibration subset has no jointly valid pixels");

  const auto conventions = AllConventions();
  std::size_t best = 0;
  for (std::size_t c = 0; c < conventions.size(); ++c) {
    double sum = 0.0;
    for (std::size_t s = 0; s < used; ++s) {
      const auto& pred = samples[s].pred;
      const auto& gt = samples[s].gt;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred.IsValid(i) && gt.IsValid(i)) {
          sum += AngleDegrees(conventions[c].Apply(pred.values[i]), gt.values[i]);
        }
      }
    }
    result.mean_errors[c] = sum / static_cast<double>(result.pixels);
    if (result.mean_errors[c] < result.mean_errors[best]) best = c;
  }
  result.convention = conventions[best];
  return result;
}

// Cache entry for one (model, dataset) pair.
struct CalibrationRecord {
  std::string model_id;
  std::string dataset_id;
  CalibrationResult result;

  std::string Serialize() const {
    std::ostringstream os;
    os << "# pdeval normal-convention calibration\n";
    os << "model: " << model_id << "\n";
    os << "dataset: " << dataset_id << "\n";
    os << "convention: " << result.convention.ToString() << "\n";
    os << "permutation: " << result.convention.perm[0] << " " << result.convention.perm[1] << " "
       << result.convention.perm[2] << "\n";
    os << "signs: " << result.convention.signs[0] << " " << result.convention.signs[1] << " "
       << result.convention.signs[2] << "\n";
    os << "k: " << result.sample_ids.size() << "\n";
    os << "pixels: " << result.pixels << "\n";
    os << "samples:";
    for (const auto& id : result.sample_ids) os << " " << id;
    os << "\n";
    const auto conventions = AllConventions();
    char buf[96];
    for (std::size_t c = 0; c < conventions.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "error %02zu %s %.9f\n", c,
                    conventions[c].ToString().c_str(), result.mean_errors[c]);
      os << buf;
    }
    return os.str();
  }

  static CalibrationRecord Parse(const std::string& text) {
    CalibrationRecord rec;
    std::istringstream is(text);
    std::string line;
    bool have_perm = false;
    bool have_signs = false;
    std::size_t errors_seen = 0;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (line.rfind("error ", 0) == 0) {
        std::istringstream ls(line.substr(6));
        std::size_t index = 0;
        std::string name;
        double value = 0.0;
        Check(static_cast<bool>(ls >> index >> name >> value) && index < AxisConvention::kCount,
              "malformed calibration error row: " + line);
        rec.result.mean_errors[index] = value;
        ++errors_seen;
        continue;
      }
      const auto colon = line.find(':');
      Check(colon != std::string::npos, "malformed calibration line: " + line);
      const std::string key = line.substr(0, colon);
      std::string value = line.substr(colon + 1);
      if (!value.empty() && value[0] == ' ') value.erase(0, 1);
      std::istringstream vs(value);
      if (key == "model") {
        rec.model_id = value;
      } else if (key == "dataset") {
        rec.dataset_id = value;
      } else if (key == "permutation") {
        auto& p = rec.result.convention.perm;
        Check(static_cast<bool>(vs >> p[0] >> p[1] >> p[2]), "malformed permutation");
        have_perm = true;
      } else if (key == "signs") {
        auto& s = rec.result.convention.signs;
        Check(static_cast<bool>(vs >> s[0] >> s[1] >> s[2]), "malformed signs");
        have_signs = true;
      } else if (key == "pixels") {
        vs >> rec.result.pixels;
      } else if (key == "samples") {
        std::string id;
        while (vs >> id) rec.result.sample_ids.push_back(id);
      }
    }
    Check(have_perm && have_signs, "calibration record lacks a convention");
    Check(errors_seen == AxisConvention::kCount, "calibration record must list 48 errors");
    const auto& conv = rec.result.convention;
    bool known = false;
    for (const auto& c : AllConventions()) known = known || c == conv;
    Check(known, "calibration record holds an invalid convention");
    return rec;
  }
};

}  // namespace pdeval
