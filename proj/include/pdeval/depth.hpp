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

// Grayscale depth codec, per-image affine alignment and depth metrics.
//
// Generated depth maps encode nearness as brightness. Decoding extracts
// BT.709 luminance, which is a relative quantity with unknown scale, offset
// and sign; a per-image least-squares fit maps it onto metric ground truth
// before scoring. The fitted scale is negative for well-formed outputs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "pdeval/core.hpp"

namespace pdeval {

inline constexpr double kLumaR = 0.2126;
inline constexpr double kLumaG = 0.7152;
inline constexpr double kLumaB = 0.0722;
inline constexpr double kDelta1Threshold = 1.25;

struct AffineFit {
  double scale = 0.0;
  double offset = 0.0;
  double residual_rms = 0.0;
  std::size_t n_pixels = 0;
};

struct DepthMetrics {
  double delta1 = 0.0;
  double absrel = 0.0;
  double rmse = 0.0;
};

struct AlignedDepth {
  AffineFit fit;
  ScalarField aligned;
};

// Raised by affine_align for a constant prediction. Carries the fallback fit
// (scale 0, offset = mean ground truth) so callers can flag and continue.
class DegenerateFitError : public Error {
 public:
  DegenerateFitError(const std::string& what, AffineFit fallback)
      : Error(ErrorKind::kDegenerate, what), fallback_(fallback) {}

  const AffineFit& fallback() const noexcept { return fallback_; }

 private:
  AffineFit fallback_;
};

inline double Luminance(const Rgb& c) {
  return std::clamp(kLumaR * c.r + kLumaG * c.g + kLumaB * c.b, 0.0, 1.0);
}

inline ScalarField decode_luminance(const RasterImage& img) {
  ScalarField out(img.width(), img.height(), 0.0, true);
  for (std::size_t i = 0; i < img.size(); ++i) out.values[i] = Luminance(img[i]);
  return out;
}

// Near is bright: intensity 1 at the minimum valid depth, 0 at the maximum.
// Invalid pixels are black; a constant field renders at intensity 1.
inline RasterImage encode_depth_gray(const ScalarField& depth) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.IsValid(i)) continue;
    Check(depth.values[i] > 0.0, "depth must be strictly positive at valid pixels");
    lo = std::min(lo, depth.values[i]);
    hi = std::max(hi, depth.values[i]);
  }
  Check(lo <= hi, "cannot encode a depth field without valid pixels");
  RasterImage out(depth.width(), depth.height());
  const double range = hi - lo;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.IsValid(i)) continue;
    const double v = range > 0.0 ? 1.0 - (depth.values[i] - lo) / range : 1.0;
    out[i] = {v, v, v};
  }
  return out;
}

// Least-squares scale and offset mapping pred onto gt over jointly valid
// pixels, from the centered normal equations.
inline AlignedDepth affine_align(const ScalarField& pred, const ScalarField& gt) {
  const auto pairs = masked_pairs(pred, gt);
  Check(pairs.size() >= 2, "affine alignment needs at least 2 jointly valid pixels, got " +
                               std::to_string(pairs.size()));
  const double n = static_cast<double>(pairs.size());
  double sum_p = 0.0;
  double sum_g = 0.0;
  double p_min = pairs.front().first;
  double p_max = pairs.front().first;
  for (const auto& [p, g] : pairs) {
    sum_p += p;
    sum_g += g;
    p_min = std::min(p_min, p);
    p_max = std::max(p_max, p);
  }
  const double mean_p = sum_p / n;
  const double mean_g = sum_g / n;

  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [p, g] : pairs) {
    sxx += (p - mean_p) * (p - mean_p);
    sxy += (p - mean_p) * (g - mean_g);
  }
  if (p_min == p_max || sxx == 0.0) {
    AffineFit fallback{0.0, mean_g, 0.0, pairs.size()};
    double ss = 0.0;
    for (const auto& [p, g] : pairs) ss += (g - mean_g) * (g - mean_g);
    fallback.residual_rms = std::sqrt(ss / n);
    throw DegenerateFitError("constant prediction: affine fit is degenerate", fallback);
  }

  AlignedDepth result;
  result.fit.scale = sxy / sxx;
  result.fit.offset = mean_g - result.fit.scale * mean_p;
  result.fit.n_pixels = pairs.size();

  double ss = 0.0;
  for (const auto& [p, g] : pairs) {
    const double r = result.fit.scale * p + result.fit.offset - g;
    ss += r * r;
  }
  result.fit.residual_rms = std::sqrt(ss / n);

  result.aligned = pred;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred.IsValid(i)) {
      result.aligned.values[i] = result.fit.scale * pred.values[i] + result.fit.offset;
    }
  }
  return result;
}

// Negative or zero predictions fail delta1 and enter AbsRel/RMSE unclamped.
inline DepthMetrics depth_metrics(const ScalarField& aligned, const ScalarField& gt) {
  const auto pairs = masked_pairs(aligned, gt);
  Check(!pairs.empty(), "depth metrics need at least one jointly valid pixel");
  std::size_t inliers = 0;
  double abs_rel = 0.0;
  double sq = 0.0;
  for (const auto& [a, g] : pairs) {
    Check(g > 0.0, "ground-truth depth must be positive at valid pixels");
    if (a > 0.0 && std::max(a / g, g / a) < kDelta1Threshold) ++inliers;
    abs_rel += std::abs(a - g) / g;
    sq += (a - g) * (a - g);
  }
  const double n = static_cast<double>(pairs.size());
  return {static_cast<double>(inliers) / n, abs_rel / n, std::sqrt(sq / n)};
}

// Score assigned to degenerate predictions: the metrics of predicting zero
// depth everywhere (delta1 0, AbsRel 1, RMSE = RMS of ground truth).
inline DepthMetrics worst_case_depth_metrics(const ScalarField& gt) {
  double sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt.IsValid(i)) continue;
    sq += gt.values[i] * gt.values[i];
    ++n;
  }
  Check(n > 0, "depth metrics need at least one valid pixel");
  return {0.0, 1.0, std::sqrt(sq / static_cast<double>(n))};
}

// Invalidates ground truth outside [min_depth, max_depth].
inline void apply_depth_caps(ScalarField& gt, double min_depth, double max_depth) {
  Check(min_depth < max_depth, "depth cap minimum must be below maximum");
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt.values[i] < min_depth || gt.values[i] > max_depth) gt.valid[i] = 0;
  }
}

// Standard NYUv2 evaluation crop (rows 45..470, columns 41..600 at 640x480).
inline void apply_eigen_crop(ScalarField& gt) {
  Check(gt.width() == 640 && gt.height() == 480,
        "eigen crop is defined for 640x480 fields, got " + std::to_string(gt.width()) + "x" +
            std::to_string(gt.height()));
  for (std::size_t y = 0; y < gt.height(); ++y) {
    for (std::size_t x = 0; x < gt.width(); ++x) {
      if (y < 45 || y >= 471 || x < 41 || x >= 601) gt.valid(x, y) = 0;
    }
  }
}

}  // namespace pdeval
