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
#include <random>
#include <set>

#include "pdeval/io.hpp"
#include "pdeval/normals.hpp"
#include "pdeval/synth.hpp"
#include "test_util.hpp"

namespace pdeval {
namespace {

namespace fs = std::filesystem;

NormalField Single(Vec3 n) {
  NormalField f(1, 1, n, true);
  return f;
}

NormalField RandomField(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  NormalField f(w, h, Vec3{}, true);
  for (auto& v : f.values.data()) v = testing::RandomUnit(rng);
  return f;
}

TEST(EncodeNormals, Examples) {
  EXPECT_EQ(encode_normals(Single({0, 0, 1}))[0], (Rgb{0.5, 0.5, 1.0}));
  EXPECT_EQ(encode_normals(Single({1, 0, 0}))[0], (Rgb{1.0, 0.5, 0.5}));
  EXPECT_EQ(encode_normals(Single({0, -1, 0}))[0], (Rgb{0.5, 0.0, 0.5}));
}

TEST(DecodeNormals, Examples) {
  RasterImage img(3, 1);
  img[0] = {0.5, 0.5, 1.0};
  img[1] = {1.0, 1.0, 1.0};
  img[2] = {0.5, 0.5, 0.5};
  const NormalField f = decode_normals(img);
  EXPECT_EQ(f.values[0], (Vec3{0, 0, 1}));
  const double s = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(f.values[1].x, s, 1e-15);
  EXPECT_NEAR(f.values[1].y, s, 1e-15);
  EXPECT_NEAR(f.values[1].z, s, 1e-15);
  EXPECT_TRUE(f.IsValid(0));
  EXPECT_TRUE(f.IsValid(1));
  EXPECT_FALSE(f.IsValid(2));
}

TEST(NormalCodec, RoundTripExact) {
  std::mt19937_64 rng(1);
  const NormalField f = RandomField(rng, 16, 16);
  const NormalField back = decode_normals(encode_normals(f));
  for (std::size_t i = 0; i < f.size(); ++i) {
    ASSERT_TRUE(back.IsValid(i));
    EXPECT_NEAR(back.values[i].x, f.values[i].x, 1e-6);
    EXPECT_NEAR(back.values[i].y, f.values[i].y, 1e-6);
    EXPECT_NEAR(back.values[i].z, f.values[i].z, 1e-6);
    EXPECT_NEAR(Norm(back.values[i]), 1.0, 1e-6);
  }
}

TEST(NormalCodec, RoundTripThroughEightBitPng) {
  testing::TempDir dir("normals");
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const SynthScene scene = synth_scene(RandomSceneSpec(seed, 64, 48));
    const fs::path png = dir / ("n" + std::to_string(seed) + ".png");
    io::WritePngRgb(png, encode_normals(scene.normals));
    const NormalField back = decode_normals(io::ReadPngRgb(png));
    for (std::size_t i = 0; i < back.size(); ++i) {
      if (!scene.normals.IsValid(i)) continue;
      ASSERT_TRUE(back.IsValid(i));
      for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_LE(std::abs(back.values[i][k] - scene.normals.values[i][k]), 2.0 / 255.0);
      }
    }
  }
}

TEST(AxisConvention, Examples) {
  const NormalField f = Single({1, 0, 0});
  EXPECT_EQ(apply_convention(f, AxisConvention{}), f);
  AxisConvention flip_x;
  flip_x.signs = {-1, 1, 1};
  EXPECT_EQ(apply_convention(f, flip_x).values[0], (Vec3{-1, 0, 0}));
  AxisConvention swap;
  swap.perm = {1, 0, 2};
  EXPECT_EQ(apply_convention(Single({0.6, 0.8, 0}), swap).values[0], (Vec3{0.8, 0.6, 0}));
}

TEST(AxisConvention, IndexRoundTripAndDistinct) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < AxisConvention::kCount; ++i) {
    const AxisConvention c = AxisConvention::FromIndex(i);
    EXPECT_EQ(c.Index(), i);
    names.insert(c.ToString());
  }
  EXPECT_EQ(names.size(), AxisConvention::kCount);
  EXPECT_EQ(AxisConvention::FromIndex(0).ToString(), "(+x,+y,+z)");
  EXPECT_THROW(AxisConvention::FromIndex(48), Error);
}

TEST(AxisConvention, GroupClosureAndInverse) {
  std::mt19937_64 rng(2);
  const NormalField f = RandomField(rng, 5, 4);
  const auto all = AllConventions();
  for (const auto& c : all) {
    const AxisConvention inv = c.Inverse();
    EXPECT_LT(inv.Index(), AxisConvention::kCount);
    EXPECT_EQ(apply_convention(apply_convention(f, c), inv), f) << c.ToString();
    EXPECT_EQ(apply_convention(apply_convention(f, inv), c), f) << c.ToString();
    EXPECT_EQ(inv.Inverse(), c);
    for (const auto& d : all) {
      // Composition lands back in the set.
      const Vec3 probe{1.0, 2.0, 3.0};
      const Vec3 composed = d.Apply(c.Apply(probe));
      bool found = false;
      for (const auto& e : all) found = found || e.Apply(probe) == composed;
      EXPECT_TRUE(found);
    }
  }
}

TEST(AngularError, Examples) {
  const Vec3 x{1, 0, 0};
  EXPECT_EQ(AngleDegrees(x, x), 0.0);
  EXPECT_DOUBLE_EQ(AngleDegrees(x, {0, 1, 0}), 90.0);
  EXPECT_DOUBLE_EQ(AngleDegrees(x, {-1, 0, 0}), 180.0);
}

TEST(AngularError, SymmetricAndMatchesArccos) {
  std::mt19937_64 rng(3);
  const NormalField a = RandomField(rng, 8, 8);
  const NormalField b = RandomField(rng, 8, 8);
  const auto ab = angular_error(a, b);
  const auto ba = angular_error(b, a);
  ASSERT_EQ(ab.size(), 64u);
  for (std::size_t i = 0; i < ab.size(); ++i) {
    EXPECT_EQ(ab[i], ba[i]);
    const double c = std::clamp(Dot(a.values[i], b.values[i]), -1.0, 1.0);
    EXPECT_NEAR(ab[i], std::acos(c) * 180.0 / std::numbers::pi, 1e-6);
  }
}

TEST(AngularError, SkipsInvalidAndChecksShape) {
  NormalField a(2, 1, Vec3{0, 0, 1}, true);
  NormalField b = a;
  b.valid[0] = 0;
  EXPECT_EQ(angular_error(a, b).size(), 1u);
  EXPECT_THROW(angular_error(a, NormalField(1, 2)), Error);
}

TEST(NormalMetrics, Examples) {
  const std::vector<double> tens(7, 10.0);
  const NormalMetrics t = normal_metrics(tens);
  EXPECT_DOUBLE_EQ(t.mean_deg, 10.0);
  EXPECT_DOUBLE_EQ(t.median_deg, 10.0);
  EXPECT_EQ(t.a11, 100.0);
  EXPECT_EQ(t.a22, 100.0);
  EXPECT_EQ(t.a30, 100.0);

  const std::vector<double> four = {0.0, 20.0, 40.0, 100.0};
  const NormalMetrics m = normal_metrics(four);
  EXPECT_DOUBLE_EQ(m.mean_deg, 40.0);
  EXPECT_DOUBLE_EQ(m.median_deg, 30.0);
  EXPECT_DOUBLE_EQ(m.a11, 25.0);
  EXPECT_DOUBLE_EQ(m.a22, 50.0);
  EXPECT_DOUBLE_EQ(m.a30, 50.0);

  const std::vector<double> boundary = {11.25};
  const NormalMetrics b = normal_metrics(boundary);
  EXPECT_EQ(b.a11, 0.0);
  EXPECT_EQ(b.a22, 100.0);
}

TEST(NormalMetrics, ThresholdsAreOrdered) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> deg(0.0, 60.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> e(1 + trial % 37);
    for (auto& v : e) v = deg(rng);
    const NormalMetrics m = normal_metrics(e);
    EXPECT_LE(m.a11, m.a22);
    EXPECT_LE(m.a22, m.a30);
  }
  EXPECT_THROW(normal_metrics(std::vector<double>{}), Error);
}

std::vector<NormalSample> SyntheticSamples(std::size_t count, const AxisConvention& injected) {
  std::vector<NormalSample> samples;
  for (std::size_t i = 0; i < count; ++i) {
    const SynthScene scene = synth_scene(RandomSceneSpec(100 + i, 24, 18));
    samples.push_back({"s" + std::to_string(i), apply_convention(scene.normals, injected),
                       scene.normals});
  }
  return samples;
}

TEST(Calibration, IdentityWhenPredictionMatches) {
  const auto samples = SyntheticSamples(3, AxisConvention{});
  const CalibrationResult r = calibrate_convention(samples);
  EXPECT_EQ(r.convention, AxisConvention{});
  EXPECT_EQ(r.mean_errors[0], 0.0);
  EXPECT_EQ(r.sample_ids.size(), 3u);
}

TEST(Calibration, RecoversEveryInjectedConvention) {
  for (const auto& c : AllConventions()) {
    const auto samples = SyntheticSamples(2, c);
    const CalibrationResult r = calibrate_convention(samples);
    EXPECT_EQ(r.convention, c.Inverse()) << c.ToString();
    EXPECT_EQ(r.mean_errors[r.convention.Index()], 0.0);
    EXPECT_LE(r.mean_errors[r.convention.Index()], r.mean_errors[0]);
  }
}

TEST(Calibration, IndependentFieldsGiveNinetyDegrees) {
  std::mt19937_64 rng(5);
  std::vector<NormalSample> samples;
  for (int i = 0; i < 5; ++i) {
    samples.push_back({"r" + std::to_string(i), RandomField(rng, 32, 32), RandomField(rng, 32, 32)});
  }
  const CalibrationResult r = calibrate_convention(samples);
  EXPECT_NEAR(r.mean_errors[r.convention.Index()], 90.0, 5.0);
}

TEST(Calibration, UsesFirstKSamples) {
  auto samples = SyntheticSamples(7, AxisConvention::FromIndex(13));
  const CalibrationResult r = calibrate_convention(samples, 5);
  ASSERT_EQ(r.sample_ids.size(), 5u);
  EXPECT_EQ(r.sample_ids.front(), "s0");
  EXPECT_EQ(r.sample_ids.back(), "s4");
  EXPECT_THROW(calibrate_convention(std::vector<NormalSample>{}), Error);
}

TEST(CalibrationRecord, SerializeParseRoundTrip) {
  const auto samples = SyntheticSamples(2, AxisConvention::FromIndex(29));
  CalibrationRecord rec{"model-a", "nyuv2-normals", calibrate_convention(samples)};
  const std::string text = rec.Serialize();
  const CalibrationRecord back = CalibrationRecord::Parse(text);
  EXPECT_EQ(back.model_id, "model-a");
  EXPECT_EQ(back.dataset_id, "nyuv2-normals");
  EXPECT_EQ(back.result.convention, rec.result.convention);
  EXPECT_EQ(back.result.sample_ids, rec.result.sample_ids);
  EXPECT_EQ(back.result.pixels, rec.result.pixels);
  EXPECT_EQ(back.Serialize(), text);
  EXPECT_THROW(CalibrationRecord::Parse("model: x\n"), Error);
}

}  // namespace
}  // namespace pdeval
