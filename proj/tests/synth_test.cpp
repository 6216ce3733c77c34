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

#include <gtest/gtest.h>

#include <cmath>

#include "pdeval/synth.hpp"

namespace pdeval {
namespace {

TEST(SynthScene, FrontoParallelPlane) {
  SceneSpec spec;
  spec.width = 16;
  spec.height = 12;
  spec.planes.push_back({{0, 0, 2}, {0, 0, 1}, 3});
  const SynthScene s = synth_scene(spec);
  for (std::size_t i = 0; i < s.depth.size(); ++i) {
    ASSERT_TRUE(s.depth.IsValid(i));
    EXPECT_NEAR(s.depth.values[i], 2.0, 1e-12);
    EXPECT_EQ(s.normals.values[i], (Vec3{0, 0, 1}));
    EXPECT_EQ(s.labels.labels[i], 3);
  }
}

TEST(SynthScene, TiltedPlaneDepthIsLinearInInverse) {
  // For a plane, 1/depth is affine in pixel coordinates.
  SceneSpec spec;
  spec.width = 20;
  spec.height = 15;
  spec.planes.push_back({{0, 0, 4}, {0.3, -0.2, -1.0}, 1});
  const SynthScene s = synth_scene(spec);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 1; x + 1 < spec.width; ++x) {
      const double a = 1.0 / s.depth.values(x - 1, y);
      const double b = 1.0 / s.depth.values(x, y);
      const double c = 1.0 / s.depth.values(x + 1, y);
      EXPECT_NEAR(a - 2 * b + c, 0.0, 1e-12);
    }
  }
  const Vec3 n0 = s.normals.values[0];
  for (const auto& n : s.normals.values.data()) {
    EXPECT_NEAR(n.x, n0.x, 1e-12);
    EXPECT_NEAR(n.y, n0.y, 1e-12);
    EXPECT_NEAR(n.z, n0.z, 1e-12);
  }
  // Reported in the map frame and facing the camera.
  EXPECT_GT(n0.z, 0.0);
  const double len = std::sqrt(0.09 + 0.04 + 1.0);
  EXPECT_NEAR(n0.x, 0.3 / len, 1e-12);
  EXPECT_NEAR(n0.y, 0.2 / len, 1e-12);
}

TEST(SynthScene, CenteredSphere) {
  SceneSpec spec;
  spec.width = 15;
  spec.height = 15;
  spec.spheres.push_back({{0, 0, 5}, 1.0, 13});
  const SynthScene s = synth_scene(spec);
  const Vec3 c = s.normals.values(7, 7);
  EXPECT_NEAR(c.x, 0.0, 1e-12);
  EXPECT_NEAR(c.y, 0.0, 1e-12);
  EXPECT_NEAR(c.z, 1.0, 1e-12);
  double best = 1e9;
  for (std::size_t i = 0; i < s.depth.size(); ++i) {
    if (s.depth.IsValid(i)) best = std::min(best, s.depth.values[i]);
  }
  EXPECT_EQ(best, s.depth.values(7, 7));
  EXPECT_NEAR(best, 4.0, 1e-12);
  EXPECT_FALSE(s.depth.IsValid(0));
  EXPECT_EQ(s.labels.labels[0], kIgnoreLabel);
  EXPECT_EQ(s.labels.labels(7, 7), 13);
}

TEST(SynthScene, UnitNormalsAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SynthScene a = synth_scene(RandomSceneSpec(seed, 40, 30));
    const SynthScene b = synth_scene(RandomSceneSpec(seed, 40, 30));
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.depth, b.depth);
    EXPECT_EQ(a.labels, b.labels);
    for (std::size_t i = 0; i < a.normals.size(); ++i) {
      if (a.normals.IsValid(i)) {
        EXPECT_NEAR(Norm(a.normals.values[i]), 1.0, 1e-6);
        EXPECT_GT(a.depth.values[i], 0.0);
      }
    }
  }
}

TEST(SynthScene, FiniteDifferenceNormalsMatchOnPlanes) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SceneSpec spec = RandomSceneSpec(seed, 48, 36);
    const SynthScene s = synth_scene(spec);
    const Intrinsics k = ResolveIntrinsics(spec);
    auto point = [&](std::size_t x, std::size_t y) {
      const Vec3 d = PixelRay(k, x, y);
      const double z = s.depth.values(x, y);
      return Vec3{d.x * z, d.y * z, z};
    };
    int checked = 0;
    for (std::size_t y = 0; y + 1 < spec.height; ++y) {
      for (std::size_t x = 0; x + 1 < spec.width; ++x) {
        const Label l = s.labels.labels(x, y);
        // Planar classes only, away from occlusion boundaries.
        if (l != 0 && l != 2) continue;
        if (s.labels.labels(x + 1, y) != l || s.labels.labels(x, y + 1) != l) continue;
        if (!(s.normals.values(x + 1, y) == s.normals.values(x, y)) ||
            !(s.normals.values(x, y + 1) == s.normals.values(x, y))) {
          continue;
        }
        const Vec3 p = point(x, y);
        const Vec3 dx = point(x + 1, y);
        const Vec3 dy = point(x, y + 1);
        Vec3 n = Cross({dy.x - p.x, dy.y - p.y, dy.z - p.z}, {dx.x - p.x, dx.y - p.y, dx.z - p.z});
        const double len = Norm(n);
        n = {n.x / len, n.y / len, n.z / len};
        if (Dot(n, p) > 0) n = {-n.x, -n.y, -n.z};
        const Vec3 a = s.normals.values(x, y);
        const Vec3 camera{a.x, -a.y, -a.z};
        EXPECT_NEAR(n.x, camera.x, 1e-3);
        EXPECT_NEAR(n.y, camera.y, 1e-3);
        EXPECT_NEAR(n.z, camera.z, 1e-3);
        ++checked;
      }
    }
    EXPECT_GT(checked, 100);
  }
}

TEST(SynthScene, RejectsInvalidSpecs) {
  SceneSpec empty;
  EXPECT_THROW(synth_scene(empty), Error);
  SceneSpec inside;
  inside.spheres.push_back({{0, 0, 0.5}, 1.0, 0});
  EXPECT_THROW(synth_scene(inside), Error);
}

TEST(SceneSpecFromJson, ParsesSurfaces) {
  const auto j = nlohmann::json::parse(R"({"width": 8, "height": 6, "seed": 4,
      "planes": [{"point": [0, 0, 3], "normal": [0, 0, -1], "class_id": 2}],
      "spheres": [{"center": [0, 0, 2], "radius": 0.5, "class_id": 13}]})");
  const SceneSpec spec = SceneSpecFromJson(j);
  EXPECT_EQ(spec.width, 8u);
  EXPECT_EQ(spec.height, 6u);
  ASSERT_EQ(spec.planes.size(), 1u);
  ASSERT_EQ(spec.spheres.size(), 1u);
  EXPECT_EQ(spec.spheres[0].class_id, 13);
  EXPECT_EQ(synth_scene(spec).labels.labels(4, 3), 13);
}

}  // namespace
}  // namespace pdeval
