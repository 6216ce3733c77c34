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

// Analytic ray-cast scenes of planes and spheres. They give exact depth,
// normals and labels for codec round-trip and calibration tests.
//
// Geometry lives in the camera frame: x right, y down, z forward, camera at
// the origin. Depth is the z coordinate of the nearest hit. Normals are
// reported in the normal-map frame (x right, y up, z toward the camera), so
// a surface facing the camera has normal (0, 0, 1).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "json.hpp"
#include "pdeval/core.hpp"

namespace pdeval {

struct PlaneSurface {
  Vec3 point;
  Vec3 normal;
  Label class_id = 0;
};

struct SphereSurface {
  Vec3 center;
  double radius = 1.0;
  Label class_id = 0;
};

struct SceneSpec {
  std::size_t width = 64;
  std::size_t height = 48;
  double fx = 0.0;  // 0 selects a 60 degree horizontal field of view
  double fy = 0.0;
  double cx = -1.0;  // negative selects the image center
  double cy = -1.0;
  std::uint64_t seed = 0;
  std::vector<PlaneSurface> planes;
  std::vector<SphereSurface> spheres;
};

struct SynthScene {
  RasterImage image;
  ScalarField depth;
  NormalField normals;
  LabelMap labels;
};

struct Intrinsics {
  double fx, fy, cx, cy;
};

inline Intrinsics ResolveIntrinsics(const SceneSpec& spec) {
  const double f = spec.fx > 0.0
                       ? spec.fx
                       : 0.5 * static_cast<double>(spec.width) / std::tan(std::numbers::pi / 6.0);
  return {f, spec.fy > 0.0 ? spec.fy : f,
          spec.cx >= 0.0 ? spec.cx : 0.5 * static_cast<double>(spec.width),
          spec.cy >= 0.0 ? spec.cy : 0.5 * static_cast<double>(spec.height)};
}

// Ray direction through the center of pixel (x, y), scaled so its z is 1.
inline Vec3 PixelRay(const Intrinsics& k, std::size_t x, std::size_t y) {
  return {(static_cast<double>(x) + 0.5 - k.cx) / k.fx, (static_cast<double>(y) + 0.5 - k.cy) / k.fy,
          1.0};
}

inline SynthScene synth_scene(const SceneSpec& spec) {
  Check(!spec.planes.empty() || !spec.spheres.empty(), "scene needs at least one surface");
  Check(spec.width >= 1 && spec.height >= 1, "scene needs a positive resolution");
  const Intrinsics k = ResolveIntrinsics(spec);

  // Planes are oriented toward the camera.
  std::vector<PlaneSurface> planes = spec.planes;
  for (auto& p : planes) {
    const double len = Norm(p.normal);
    Check(len > 0.0, "plane normal must be non-zero");
    p.normal = {p.normal.x / len, p.normal.y / len, p.normal.z / len};
    const double side = Dot(p.normal, p.point);
    Check(side != 0.0, "plane passes through the camera center");
    if (side > 0.0) p.normal = {-p.normal.x, -p.normal.y, -p.normal.z};
  }
  for (const auto& s : spec.spheres) {
    Check(s.radius > 0.0, "sphere radius must be positive");
    Check(Norm(s.center) > s.radius, "camera lies inside a sphere");
  }

  const std::size_t surfaces = planes.size() + spec.spheres.size();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.25, 1.0);
  std::vector<Rgb> albedo(surfaces);
  for (auto& a : albedo) a = {unit(rng), unit(rng), unit(rng)};
  const Vec3 light = [] {
    const Vec3 l{-0.3, -0.6, -0.74};
    const double n = Norm(l);
    return Vec3{l.x / n, l.y / n, l.z / n};
  }();

  SynthScene scene{RasterImage(spec.width, spec.height),
                   ScalarField(spec.width, spec.height),
                   NormalField(spec.width, spec.height),
                   LabelMap(spec.width, spec.height, kIgnoreLabel)};
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      const Vec3 d = PixelRay(k, x, y);
      double best_t = std::numeric_limits<double>::infinity();
      Vec3 normal;
      std::size_t hit = surfaces;
      Label label = kIgnoreLabel;
      for (std::size_t i = 0; i < planes.size(); ++i) {
        const double denom = Dot(planes[i].normal, d);
        if (denom >= 0.0) continue;
        const double t = Dot(planes[i].normal, planes[i].point) / denom;
        if (t > 0.0 && t < best_t) {
          best_t = t;
          normal = planes[i].normal;
          hit = i;
          label = planes[i].class_id;
        }
      }
      for (std::size_t i = 0; i < spec.spheres.size(); ++i) {
        const auto& s = spec.spheres[i];
        const double a = Dot(d, d);
        const double b = -2.0 * Dot(d, s.center);
        const double c = Dot(s.center, s.center) - s.radius * s.radius;
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) continue;
        const double t = (-b - std::sqrt(disc)) / (2.0 * a);
        if (t > 0.0 && t < best_t) {
          best_t = t;
          const Vec3 p{t * d.x, t * d.y, t * d.z};
          normal = {(p.x - s.center.x) / s.radius, (p.y - s.center.y) / s.radius,
                    (p.z - s.center.z) / s.radius};
          const double n = Norm(normal);
          normal = {normal.x / n, normal.y / n, normal.z / n};
          hit = planes.size() + i;
          label = s.class_id;
        }
      }
      if (hit == surfaces) continue;

      const std::size_t i = y * spec.width + x;
      scene.depth.values[i] = best_t;
      scene.depth.valid[i] = 1;
      scene.normals.values[i] = {normal.x, -normal.y, -normal.z};
      scene.normals.valid[i] = 1;
      scene.labels.labels[i] = label;

      const double shade = 0.35 + 0.65 * std::max(0.0, -Dot(normal, light));
      const Vec3 p{best_t * d.x, best_t * d.y, best_t * d.z};
      const bool checker =
          (static_cast<long>(std::floor(2.0 * p.x)) + static_cast<long>(std::floor(2.0 * p.y)) +
           static_cast<long>(std::floor(2.0 * p.z))) % 2 == 0;
      const double tex = checker ? 1.0 : 0.8;
      const Rgb& c = albedo[hit];
      scene.image[i] = {std::clamp(c.r * shade * tex, 0.0, 1.0),
                        std::clamp(c.g * shade * tex, 0.0, 1.0),
                        std::clamp(c.b * shade * tex, 0.0, 1.0)};
    }
  }
  return scene;
}

// A seeded indoor-like scene: tilted back wall, floor and a few spheres.
inline SceneSpec RandomSceneSpec(std::uint64_t seed, std::size_t width, std::size_t height) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  static constexpr Label kObjectClasses[] = {13, 11, 8, 5, 7, 18};
  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.seed = seed;
  spec.planes.push_back({{0.0, 0.0, uniform(5.0, 8.0)},
                         {uniform(-0.4, 0.4), uniform(-0.3, 0.3), -1.0},
                         2});
  spec.planes.push_back({{0.0, uniform(1.0, 1.8), 0.0}, {0.0, -1.0, uniform(-0.1, 0.1)}, 0});
  const int n_spheres = 1 + static_cast<int>(uniform(0.0, 3.0));
  for (int s = 0; s < n_spheres; ++s) {
    const double z = uniform(2.2, 4.5);
    spec.spheres.push_back({{uniform(-0.4, 0.4) * z, uniform(-0.25, 0.15) * z, z},
                            uniform(0.3, 0.7),
                            kObjectClasses[static_cast<std::size_t>(uniform(0.0, 5.999))]});
  }
  return spec;
}

namespace detail {

inline Vec3 ParseVec3(const nlohmann::json& j) {
  Check(j.is_array() && j.size() == 3, "expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

// {"width","height","seed","fx","fy","cx","cy",
//  "planes":[{"point":[..],"normal":[..],"class_id":n}],
//  "spheres":[{"center":[..],"radius":r,"class_id":n}]}
inline SceneSpec SceneSpecFromJson(const nlohmann::json& j) {
  SceneSpec spec;
  spec.width = j.value("width", spec.width);
  spec.height = j.value("height", spec.height);
  spec.seed = j.value("seed", spec.seed);
  spec.fx = j.value("fx", spec.fx);
  spec.fy = j.value("fy", spec.fy);
  spec.cx = j.value("cx", spec.cx);
  spec.cy = j.value("cy", spec.cy);
  for (const auto& p : j.value("planes", nlohmann::json::array())) {
    spec.planes.push_back({detail::ParseVec3(p.at("point")), detail::ParseVec3(p.at("normal")),
                           p.value("class_id", Label{0})});
  }
  for (const auto& s : j.value("spheres", nlohmann::json::array())) {
    spec.spheres.push_back({detail::ParseVec3(s.at("center")), s.at("radius").get<double>(),
                            s.value("class_id", Label{0})});
  }
  return spec;
}

}  // namespace pdeval
