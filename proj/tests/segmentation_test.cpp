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

#include "pdeval/segmentation.hpp"
#include "test_util.hpp"

namespace pdeval {
namespace {

LabelMap RandomLabels(std::mt19937_64& rng, std::size_t w, std::size_t h, int num_classes,
                      double ignore_rate) {
  std::uniform_int_distribution<int> label(0, num_classes - 1);
  std::bernoulli_distribution ignore(ignore_rate);
  LabelMap map(w, h);
  for (auto& l : map.labels.data()) l = ignore(rng) ? kIgnoreLabel : Label(label(rng));
  return map;
}

TEST(Palette, ShippedPalettesAreSeparated) {
  EXPECT_GE(CityscapesPalette().MinDistance(), kMinPaletteDistance);
  EXPECT_GE(CityscapesCategoryPalette().MinDistance(), kMinPaletteDistance);
  EXPECT_EQ(CityscapesPalette().entries().size(), 19u);
  EXPECT_EQ(CityscapesCategoryPalette().entries().size(), 7u);
  EXPECT_EQ(CityscapesPalette().Get(0).color_name, "red");
  EXPECT_EQ(CityscapesPalette().Get(13).color_name, "white");
  for (const auto& e : CityscapesPalette().entries()) {
    EXPECT_EQ(e.class_name, CityscapesSpace().Get(e.id).name);
  }
}

TEST(Palette, RejectsCloseColors) {
  EXPECT_THROW(Palette("bad", {{0, "a", "x", {200, 0, 0}}, {1, "b", "y", {210, 10, 10}}}), Error);
  EXPECT_THROW(Palette("dark", {{0, "a", "x", {10, 10, 10}}}), Error);
}

TEST(Palette, SerializeParseRoundTrip) {
  const Palette& p = CityscapesPalette();
  const Palette back = Palette::Parse(p.Serialize());
  EXPECT_EQ(back.version(), p.version());
  EXPECT_EQ(back.Serialize(), p.Serialize());
  EXPECT_THROW(Palette::Parse("0\troad\tred\t255\t0\n"), Error);
}

TEST(OracleClassList, Examples) {
  const LabelSpace& space = CityscapesSpace();
  EXPECT_TRUE(oracle_class_list(LabelMap(4, 4), space).empty());
  LabelMap two(3, 1, std::vector<Label>{13, 0, 13});
  EXPECT_EQ(oracle_class_list(two, space), (std::vector<Label>{0, 13}));
  LabelMap full(19, 1);
  for (Label i = 0; i < 19; ++i) full.labels[18 - i] = i;
  EXPECT_EQ(oracle_class_list(full, space).size(), 19u);
  LabelMap bad(1, 1, std::vector<Label>{40});
  EXPECT_THROW(oracle_class_list(bad, space), Error);
}

TEST(BuildPrompt, ClassTemplates) {
  const LabelSpace& space = CityscapesSpace();
  const std::vector<Label> road = {0};
  EXPECT_EQ(build_prompt(road, space, CityscapesPalette(), Granularity::kClasses19),
            "Convert this photo into a color-coded map: the road red, and everything else "
            "black.");
  const std::vector<Label> road_car = {0, 13};
  EXPECT_EQ(build_prompt(road_car, space, CityscapesPalette(), Granularity::kClasses19),
            "Convert this photo into a color-coded map: the road red, the car white, and "
            "everything else black.");
  EXPECT_THROW(build_prompt(std::vector<Label>{}, space, CityscapesPalette(),
                            Granularity::kClasses19),
               Error);
}

TEST(BuildPrompt, CategoryTemplate) {
  const std::vector<Label> flat = {0};
  const std::string p = build_prompt(flat, CityscapesCategorySpace(), CityscapesCategoryPalette(),
                                     Granularity::kCategories7);
  EXPECT_EQ(p.rfind("Turn this image into a flat segmentation mask using only solid colors.", 0),
            0u);
  EXPECT_NE(p.find("Paint all roads and sidewalks solid red"), std::string::npos);
}

TEST(BuildPrompt, ByteStable) {
  const std::vector<Label> ids = {2, 8, 10, 13};
  EXPECT_EQ(build_prompt(ids, CityscapesSpace(), CityscapesPalette(), Granularity::kClasses19),
            build_prompt(ids, CityscapesSpace(), CityscapesPalette(), Granularity::kClasses19));
}

Rgb FromBytes(double r, double g, double b) { return {r / 255.0, g / 255.0, b / 255.0}; }

TEST(DecodePalette, ExactColorAndBlack) {
  const Palette& pal = CityscapesPalette();
  const std::vector<Label> prompted = {0, 13};
  RasterImage img(3, 1);
  img[0] = FromBytes(255, 0, 0);
  img[1] = FromBytes(255, 255, 255);
  img[2] = FromBytes(0, 0, 0);
  const LabelMap out = decode_palette(img, prompted, pal);
  EXPECT_EQ(out.labels[0], 0);
  EXPECT_EQ(out.labels[1], 13);
  EXPECT_EQ(out.labels[2], kBackgroundLabel);
}

TEST(DecodePalette, UnpromptedColorsAreNotCandidates) {
  const std::vector<Label> prompted = {0};
  RasterImage img(1, 1, FromBytes(255, 255, 255));
  EXPECT_EQ(decode_palette(img, prompted, CityscapesPalette()).labels[0], 0);
}

TEST(DecodePalette, MidpointTiesGoToLowerId) {
  const Palette& pal = CityscapesPalette();
  int checked = 0;
  for (const auto& a : pal.entries()) {
    for (const auto& b : pal.entries()) {
      if (a.id >= b.id) continue;
      const int sr = a.rgb.r + b.rgb.r;
      const int sg = a.rgb.g + b.rgb.g;
      const int sb = a.rgb.b + b.rgb.b;
      if (sr % 2 || sg % 2 || sb % 2) continue;
      const double mr = sr / 2, mg = sg / 2, mb = sb / 2;
      // Exhaustive oracle over the two prompted colors and black.
      auto d2 = [&](const ByteColor& c) {
        return (mr - c.r) * (mr - c.r) + (mg - c.g) * (mg - c.g) + (mb - c.b) * (mb - c.b);
      };
      ASSERT_EQ(d2(a.rgb), d2(b.rgb));
      const Label expected = mr * mr + mg * mg + mb * mb < d2(a.rgb) ? kBackgroundLabel : a.id;
      const std::vector<Label> prompted = {b.id, a.id};
      RasterImage img(1, 1, FromBytes(mr, mg, mb));
      EXPECT_EQ(decode_palette(img, prompted, pal).labels[0], expected)
          << a.class_name << " / " << b.class_name;
      ++checked;
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(DecodePalette, BlackTieFavorsClass) {
  // (0,64,0) sits halfway between black and (0,128,0).
  const std::vector<Label> prompted = {8};
  RasterImage img(1, 1, FromBytes(0, 64, 0));
  EXPECT_EQ(decode_palette(img, prompted, CityscapesPalette()).labels[0], 8);
}

TEST(DecodePalette, RenderDecodeRoundTrip) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const LabelMap gt = RandomLabels(rng, 9, 7, 19, 0.0);
    const auto prompted = oracle_class_list(gt, CityscapesSpace());
    EXPECT_EQ(decode_palette(render_labels(gt, CityscapesPalette()), prompted,
                             CityscapesPalette()),
              gt);
  }
}

TEST(DecodePalette, RobustToSubHalfDistancePerturbation) {
  const Palette& pal = CityscapesPalette();
  const double radius = 0.5 * pal.MinDistance();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> frac(0.0, 0.999);
  for (int trial = 0; trial < 50; ++trial) {
    const LabelMap gt = RandomLabels(rng, 8, 8, 19, 0.0);
    const auto prompted = oracle_class_list(gt, CityscapesSpace());
    RasterImage img = render_labels(gt, pal);
    for (auto& p : img.data()) {
      const Vec3 dir = testing::RandomUnit(rng);
      const double len = frac(rng) * radius / 255.0;
      p = {std::clamp(p.r + len * dir.x, 0.0, 1.0), std::clamp(p.g + len * dir.y, 0.0, 1.0),
           std::clamp(p.b + len * dir.z, 0.0, 1.0)};
    }
    EXPECT_EQ(decode_palette(img, prompted, pal), gt);
  }
}

TEST(GroupToCategories, Examples) {
  const LabelSpace& space = CityscapesSpace();
  LabelMap m(6, 1, std::vector<Label>{0, 1, 11, 13, kIgnoreLabel, kBackgroundLabel});
  const LabelMap g = group_to_categories(m, space);
  const LabelSpace& cats = CityscapesCategorySpace();
  EXPECT_EQ(cats.Get(g.labels[0]).name, "flat");
  EXPECT_EQ(cats.Get(g.labels[1]).name, "flat");
  EXPECT_EQ(cats.Get(g.labels[2]).name, "human");
  EXPECT_EQ(cats.Get(g.labels[3]).name, "vehicle");
  EXPECT_EQ(g.labels[4], kIgnoreLabel);
  EXPECT_EQ(g.labels[5], kBackgroundLabel);
}

LabelSpace TwoClassSpace() {
  return LabelSpace("ab", {{0, "A", {255, 0, 0}}, {1, "B", {0, 255, 0}}});
}

TEST(Confusion, Examples) {
  const LabelSpace& space = CityscapesSpace();
  ConfusionMatrix m(space.size());
  const LabelMap threes(2, 2, Label{3});
  accumulate_confusion(threes, threes, space, m);
  EXPECT_EQ(m.at(3, 3), 4u);
  EXPECT_EQ(m.Total(), 4u);

  const ConfusionMatrix before = m;
  accumulate_confusion(threes, LabelMap(2, 2), space, m);
  EXPECT_EQ(m, before);

  const LabelSpace ab = TwoClassSpace();
  ConfusionMatrix c(2);
  accumulate_confusion(LabelMap(2, 1, std::vector<Label>{1, 1}),
                       LabelMap(2, 1, std::vector<Label>{0, 1}), ab, c);
  EXPECT_EQ(c.at(0, 1), 1u);
  EXPECT_EQ(c.at(1, 1), 1u);
  EXPECT_EQ(c.Total(), 2u);
}

TEST(Confusion, BackgroundPredictionsCountAgainstClass) {
  const LabelSpace ab = TwoClassSpace();
  ConfusionMatrix c(2);
  accumulate_confusion(LabelMap(1, 1, std::vector<Label>{kBackgroundLabel}),
                       LabelMap(1, 1, std::vector<Label>{0}), ab, c);
  EXPECT_EQ(c.at(0, c.background_index()), 1u);
  const SegMetrics m = seg_metrics(c, ab);
  EXPECT_EQ(m.miou, 0.0);
  EXPECT_EQ(m.pixel_acc, 0.0);
}

TEST(SegMetrics, Examples) {
  const LabelSpace ab = TwoClassSpace();
  ConfusionMatrix perfect(2);
  const LabelMap gt(4, 1, std::vector<Label>{0, 0, 1, 1});
  accumulate_confusion(gt, gt, ab, perfect);
  EXPECT_EQ(seg_metrics(perfect, ab).miou, 1.0);
  EXPECT_EQ(seg_metrics(perfect, ab).pixel_acc, 1.0);

  ConfusionMatrix c(2);
  accumulate_confusion(LabelMap(4, 1, std::vector<Label>{0, 1, 1, 1}), gt, ab, c);
  const SegMetrics m = seg_metrics(c, ab);
  ASSERT_TRUE(m.per_class_iou[0].iou && m.per_class_iou[1].iou);
  EXPECT_DOUBLE_EQ(*m.per_class_iou[0].iou, 1.0 / 2.0);
  EXPECT_DOUBLE_EQ(*m.per_class_iou[1].iou, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.miou, 7.0 / 12.0);
  EXPECT_DOUBLE_EQ(m.pixel_acc, 3.0 / 4.0);
}

TEST(SegMetrics, AbsentClassesExcluded) {
  const LabelSpace& space = CityscapesSpace();
  ConfusionMatrix c(space.size());
  const LabelMap gt(2, 1, std::vector<Label>{0, 13});
  accumulate_confusion(gt, gt, space, c);
  const SegMetrics m = seg_metrics(c, space);
  EXPECT_EQ(m.miou, 1.0);
  std::size_t defined = 0;
  for (const auto& e : m.per_class_iou) defined += e.iou.has_value();
  EXPECT_EQ(defined, 2u);
  EXPECT_THROW(seg_metrics(ConfusionMatrix(space.size()), space), Error);
}

TEST(Regroup, MatchesGroupingLabelMaps) {
  std::mt19937_64 rng(3);
  const LabelSpace& space = CityscapesSpace();
  const LabelSpace& cats = CityscapesCategorySpace();
  ConfusionMatrix fine(space.size());
  ConfusionMatrix coarse(cats.size());
  for (int trial = 0; trial < 30; ++trial) {
    const LabelMap gt = RandomLabels(rng, 8, 8, 19, 0.1);
    LabelMap pred = RandomLabels(rng, 8, 8, 19, 0.0);
    for (std::size_t i = 0; i < pred.size(); i += 5) pred.labels[i] = kBackgroundLabel;
    accumulate_confusion(pred, gt, space, fine);
    accumulate_confusion(group_to_categories(pred, space), group_to_categories(gt, space), cats,
                         coarse);
  }
  EXPECT_EQ(regroup_confusion(fine, space), coarse);
}

}  // namespace
}  // namespace pdeval
