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

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pdeval/core.hpp"

namespace pdeval {

namespace detail {

struct LinearTap {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double t = 0.0;
};

// Half-pixel aligned source taps, clamped to the border.
inline std::vector<LinearTap> LinearTaps(std::size_t src, std::size_t dst) {
  std::vector<LinearTap> taps(dst);
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  const double max_coord = static_cast<double>(src - 1);
  for (std::size_t i = 0; i < dst; ++i) {
    double coord = (static_cast<double>(i) + 0.5) * scale - 0.5;
    coord = std::clamp(coord, 0.0, max_coord);
    const double base = std::floor(coord);
    taps[i].lo = static_cast<std::size_t>(base);
    taps[i].hi = std::min(taps[i].lo + 1, src - 1);
    taps[i].t = coord - base;
  }
  return taps;
}

// floor((i + 0.5) * src / dst), evaluated in integers.
inline std::vector<std::size_t> NearestTaps(std::size_t src, std::size_t dst) {
  std::vector<std::size_t> taps(dst);
  for (std::size_t i = 0; i < dst; ++i) {
    taps[i] = std::min((2 * i + 1) * src / (2 * dst), src - 1);
  }
  return taps;
}

inline double Lerp(double a, double b, double t) { return a * (1.0 - t) + b * t; }

inline Rgb Lerp(const Rgb& a, const Rgb& b, double t) {
  return {Lerp(a.r, b.r, t), Lerp(a.g, b.g, t), Lerp(a.b, b.b, t)};
}

inline void CheckTarget(const RasterImage& img, std::size_t out_w, std::size_t out_h) {
  Check(out_w >= 1 && out_h >= 1, "resize target must be at least 1x1, got " +
                                      std::to_string(out_w) + "x" + std::to_string(out_h));
  Check(!img.empty(), "cannot resize an empty image");
}

}  // namespace detail

inline RasterImage resize_bilinear(const RasterImage& img, std::size_t out_w, std::size_t out_h) {
  detail::CheckTarget(img, out_w, out_h);
  if (img.SameShape(out_w, out_h)) return img;
  const auto xs = detail::LinearTaps(img.width(), out_w);
  const auto ys = detail::LinearTaps(img.height(), out_h);
  RasterImage out(out_w, out_h);
  for (std::size_t y = 0; y < out_h; ++y) {
    const auto& ty = ys[y];
    for (std::size_t x = 0; x < out_w; ++x) {
      const auto& tx = xs[x];
      const Rgb top = detail::Lerp(img(tx.lo, ty.lo), img(tx.hi, ty.lo), tx.t);
      const Rgb bottom = detail::Lerp(img(tx.lo, ty.hi), img(tx.hi, ty.hi), tx.t);
      Rgb c = detail::Lerp(top, bottom, ty.t);
      c.r = std::clamp(c.r, 0.0, 1.0);
      c.g = std::clamp(c.g, 0.0, 1.0);
      c.b = std::clamp(c.b, 0.0, 1.0);
      out(x, y) = c;
    }
  }
  return out;
}

// Every output pixel is a copy of exactly one source pixel.
template <typename T>
Grid<T> resize_nearest(const Grid<T>& img, std::size_t out_w, std::size_t out_h) {
  Check(out_w >= 1 && out_h >= 1, "resize target must be at least 1x1, got " +
                                      std::to_string(out_w) + "x" + std::to_string(out_h));
  Check(!img.empty(), "cannot resize an empty image");
  if (img.SameShape(out_w, out_h)) return img;
  const auto xs = detail::NearestTaps(img.width(), out_w);
  const auto ys = detail::NearestTaps(img.height(), out_h);
  Grid<T> out(out_w, out_h);
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) out(x, y) = img(xs[x], ys[y]);
  }
  return out;
}

}  // namespace pdeval
