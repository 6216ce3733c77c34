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

// Color-coded segmentation: named-color palettes, prompt text built from an
// image's ground-truth class list, nearest-color decoding and the
// confusion-matrix metrics.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pdeval/core.hpp"

namespace pdeval {

inline constexpr double kMinPaletteDistance = 32.0;

enum class Granularity { kClasses19, kCategories7 };

struct PaletteEntry {
  Label id = 0;
  std::string class_name;
  std::string color_name;
  ByteColor rgb;
};

inline double ColorDistance(const ByteColor& a, const ByteColor& b) {
  const double dr = double(a.r) - double(b.r);
  const double dg = double(a.g) - double(b.g);
  const double db = double(a.b) - double(b.b);
  return std::sqrt(dr * dr + dg * dg + db * db);
}

// Prompt colors for a label space plus the implicit black background.
class Palette {
 public:
  static constexpr ByteColor kBackground{0, 0, 0};

  Palette(std::string version, std::vector<PaletteEntry> entries)
      : version_(std::move(version)), entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      Check(ColorDistance(entries_[i].rgb, kBackground) >= kMinPaletteDistance,
            "palette color for " + entries_[i].class_name + " is too close to black");
      for (std::size_t j = i + 1; j < entries_.size(); ++j) {
        Check(entries_[i].id != entries_[j].id,
              "duplicate palette id " + std::to_string(entries_[i].id));
        Check(ColorDistance(entries_[i].rgb, entries_[j].rgb) >= kMinPaletteDistance,
              "palette colors for " + entries_[i].class_name + " and " +
                  entries_[j].class_name + " are closer than 32");
      }
    }
  }

  const std::string& version() const { return version_; }
  std::span<const PaletteEntry> entries() const { return entries_; }

  const PaletteEntry* Find(Label id) const {
    for (const auto& e : entries_) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }

  const PaletteEntry& Get(Label id) const {
    const auto* e = Find(id);
    Check(e != nullptr, "class id " + std::to_string(id) + " is not in palette " + version_);
    return *e;
  }

  // Smallest pairwise distance, background included.
  double MinDistance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      best = std::min(best, ColorDistance(entries_[i].rgb, kBackground));
      for (std::size_t j = i + 1; j < entries_.size(); ++j) {
        best = std::min(best, ColorDistance(entries_[i].rgb, entries_[j].rgb));
      }
    }
    return best;
  }

  // Tab-separated rows of id, class name, color name, R, G, B.
  std::string Serialize() const {
    std::ostringstream os;
    os << "# version: " << version_ << "\n";
    os << "# id\tclass\tcolor\tR\tG\tB\n";
    for (const auto& e : entries_) {
      os << int(e.id) << '\t' << e.class_name << '\t' << e.color_name << '\t' << int(e.rgb.r)
         << '\t' << int(e.rgb.g) << '\t' << int(e.rgb.b) << '\n';
    }
    return os.str();
  }

  static Palette Parse(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::string version = "custom";
    std::vector<PaletteEntry> entries;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      if (line.rfind("# version:", 0) == 0) {
        version = line.substr(10);
        version.erase(0, version.find_first_not_of(' '));
        continue;
      }
      if (line[0] == '#') continue;
      std::vector<std::string> cols;
      std::istringstream ls(line);
      std::string col;
      while (std::getline(ls, col, '\t')) cols.push_back(col);
      Check(cols.size() == 6, "palette row needs 6 tab-separated columns: " + line);
      auto byte = [&](const std::string& s) {
        const int v = std::stoi(s);
        Check(v >= 0 && v <= 255, "palette channel out of range: " + line);
        return static_cast<std::uint8_t>(v);
      };
      const int id = std::stoi(cols[0]);
      Check(id >= 0 && id < kBackgroundLabel, "palette id out of range: " + line);
      entries.push_back({static_cast<Label>(id), cols[1], cols[2],
                         {byte(cols[3]), byte(cols[4]), byte(cols[5])}});
    }
    return Palette(version, std::move(entries));
  }

 private:
  std::string version_;
  std::vector<PaletteEntry> entries_;
};

inline const Palette& CityscapesPalette() {
  static const Palette palette("cityscapes19-v1",
                              {
                                  {0, "road", "red", {255, 0, 0}},
                                  {1, "sidewalk", "pink", {255, 192, 203}},
                                  {2, "building", "gray", {128, 128, 128}},
                                  {3, "wall", "brown", {139, 69, 19}},
                                  {4, "fence", "tan", {210, 180, 140}},
                                  {5, "pole", "yellow", {255, 255, 0}},
                                  {6, "traffic light", "orange", {255, 165, 0}},
                                  {7, "traffic sign", "purple", {128, 0, 128}},
                                  {8, "vegetation", "green", {0, 128, 0}},
                                  {9, "terrain", "olive", {128, 128, 0}},
                                  {10, "sky", "blue", {0, 0, 255}},
                                  {11, "person", "magenta", {255, 0, 255}},
                                  {12, "rider", "cyan", {0, 255, 255}},
                                  {13, "car", "white", {255, 255, 255}},
                                  {14, "truck", "navy", {0, 0, 128}},
                                  {15, "bus", "lime", {0, 255, 0}},
                                  {16, "train", "teal", {0, 128, 128}},
                                  {17, "motorcycle", "maroon", {128, 0, 0}},
                                  {18, "bicycle", "violet", {238, 130, 238}},
                              });
  return palette;
}

inline const Palette& CityscapesCategoryPalette() {
  static const Palette palette("cityscapes7-v1", {
                                                     {0, "flat", "red", {255, 0, 0}},
                                                     {1, "construction", "gray", {128, 128, 128}},
                                                     {2, "object", "yellow", {255, 255, 0}},
                                                     {3, "nature", "green", {0, 128, 0}},
                                                     {4, "sky", "light blue", {135, 206, 235}},
                                                     {5, "human", "magenta", {255, 0, 255}},
                                                     {6, "vehicle", "blue", {0, 0, 255}},
                                                 });
  return palette;
}

// Distinct non-ignore ids present in gt, ascending.
inline std::vector<Label> oracle_class_list(const LabelMap& gt, const LabelSpace& space) {
  std::set<Label> present;
  for (Label l : gt.labels.data()) {
    if (l == gt.ignore_id) continue;
    Check(space.Contains(l), "label " + std::to_string(l) + " is not in " + space.name());
    present.insert(l);
  }
  return {present.begin(), present.end()};
}

namespace detail {

inline std::string CategoryPhrase(const std::string& category) {
  if (category == "flat") return "all roads and sidewalks";
  if (category == "construction") return "all buildings, walls, and fences";
  if (category == "object") return "all poles, traffic lights, and traffic signs";
  if (category == "nature") return "all vegetation and terrain";
  if (category == "sky") return "the sky";
  if (category == "human") return "all people and riders";
  if (category == "vehicle") return "all vehicles";
  return "all " + category;
}

}  // namespace detail

inline std::string build_prompt(std::span<const Label> classes, const LabelSpace& space,
                                const Palette& palette, Granularity granularity) {
  Check(!classes.empty(), "segmentation prompt needs at least one class");
  std::string clauses;
  for (Label id : classes) {
    const auto& entry = palette.Get(id);
    const std::string& name = space.Get(id).name;
    if (granularity == Granularity::kClasses19) {
      clauses += "the " + name + " " + entry.color_name + ", ";
    } else {
      clauses += detail::CategoryPhrase(name) + " solid " + entry.color_name + ", ";
    }
  }
  if (granularity == Granularity::kClasses19) {
    return "Convert this photo into a color-coded map: " + clauses + "and everything else black.";
  }
  return "Turn this image into a flat segmentation mask using only solid colors. Paint " + clauses +
         "and everything else solid black. No textures, no gradients.";
}

// Nearest prompted color per pixel, in byte units. Ties go to the lowest
// prompted id; the black background only wins strictly.
inline LabelMap decode_palette(const RasterImage& img, std::span<const Label> prompted,
                               const Palette& palette) {
  std::vector<Label> ids(prompted.begin(), prompted.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::array<double, 3>> colors;
  for (Label id : ids) {
    const auto& c = palette.Get(id).rgb;
    colors.push_back({double(c.r), double(c.g), double(c.b)});
  }

  LabelMap out(img.width(), img.height(), kBackgroundLabel);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double r = img[i].r * 255.0;
    const double g = img[i].g * 255.0;
    const double b = img[i].b * 255.0;
    Label best = kBackgroundLabel;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < ids.size(); ++c) {
      const double d = (r - colors[c][0]) * (r - colors[c][0]) +
                       (g - colors[c][1]) * (g - colors[c][1]) +
                       (b - colors[c][2]) * (b - colors[c][2]);
      if (d < best_d) {
        best_d = d;
        best = ids[c];
      }
    }
    if (r * r + g * g + b * b < best_d) best = kBackgroundLabel;
    out.labels[i] = best;
  }
  return out;
}

// Paints each label in its palette color; background and ignore are black.
inline RasterImage render_labels(const LabelMap& map, const Palette& palette) {
  RasterImage out(map.width(), map.height());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const Label l = map.labels[i];
    if (l == map.ignore_id || l == kBackgroundLabel) continue;
    const auto& c = palette.Get(l).rgb;
    out[i] = {c.r / 255.0, c.g / 255.0, c.b / 255.0};
  }
  return out;
}

inline LabelMap group_to_categories(const LabelMap& map19, const LabelSpace& space) {
  LabelMap out = map19;
  for (std::size_t i = 0; i < map19.size(); ++i) {
    const Label l = map19.labels[i];
    if (l == map19.ignore_id || l == kBackgroundLabel) continue;
    out.labels[i] = space.GroupOf(l);
  }
  return out;
}

// Rows are ground truth, columns predictions. The last row/column is the
// background, so background predictions count against the true class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes)
      : n_(num_classes), counts_((num_classes + 1) * (num_classes + 1), 0) {}

  std::size_t num_classes() const { return n_; }
  std::size_t background_index() const { return n_; }

  std::uint64_t at(std::size_t gt, std::size_t pred) const { return counts_[gt * (n_ + 1) + pred]; }
  std::uint64_t& at(std::size_t gt, std::size_t pred) { return counts_[gt * (n_ + 1) + pred]; }

  std::uint64_t Total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    Check(n_ == other.n_, "cannot merge confusion matrices of different sizes");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
  }

  std::span<const std::uint64_t> counts() const { return counts_; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
};

namespace detail {

inline std::size_t ConfusionIndex(Label l, const LabelSpace& space, bool allow_background) {
  if (allow_background && l == kBackgroundLabel) return space.size();
  auto index = space.IndexOf(l);
  Check(index.has_value(), "label " + std::to_string(l) + " is not in " + space.name());
  return *index;
}

}  // namespace detail

inline void accumulate_confusion(const LabelMap& pred, const LabelMap& gt,
                                 const LabelSpace& space, ConfusionMatrix& matrix) {
  Check(pred.width() == gt.width() && pred.height() == gt.height(),
        "label map dimensions differ: " + std::to_string(pred.width()) + "x" +
            std::to_string(pred.height()) + " vs " + std::to_string(gt.width()) + "x" +
            std::to_string(gt.height()));
  Check(matrix.num_classes() == space.size(), "confusion matrix does not match " + space.name());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const Label g = gt.labels[i];
    if (g == gt.ignore_id) continue;
    const Label p = pred.labels[i] == pred.ignore_id ? kBackgroundLabel : pred.labels[i];
    ++matrix.at(detail::ConfusionIndex(g, space, false), detail::ConfusionIndex(p, space, true));
  }
}

struct ClassIou {
  Label id = 0;
  std::optional<double> iou;
};

struct SegMetrics {
  double miou = 0.0;
  double pixel_acc = 0.0;
  std::vector<ClassIou> per_class_iou;
};

// IoU per class over the space's classes; classes never seen in gt or pred
// are undefined and left out of the mean.
inline SegMetrics seg_metrics(const ConfusionMatrix& matrix, const LabelSpace& space) {
  Check(matrix.num_classes() == space.size(), "confusion matrix does not match " + space.name());
  const std::uint64_t total = matrix.Total();
  Check(total > 0, "segmentation metrics need a non-empty confusion matrix");
  const std::size_t n = matrix.num_classes();
  SegMetrics m;
  std::uint64_t trace = 0;
  double iou_sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const std::uint64_t tp = matrix.at(c, c);
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      row += matrix.at(c, k);
      col += matrix.at(k, c);
    }
    trace += tp;
    const std::uint64_t uni = row + col - tp;
    ClassIou entry{space.classes()[c].id, std::nullopt};
    if (uni > 0) {
      entry.iou = double(tp) / double(uni);
      iou_sum += *entry.iou;
      ++defined;
    }
    m.per_class_iou.push_back(entry);
  }
  m.miou = defined > 0 ? iou_sum / double(defined) : 0.0;
  m.pixel_acc = double(trace) / double(total);
  return m;
}

// Folds a class-level confusion matrix onto the space's super-categories.
inline ConfusionMatrix regroup_confusion(const ConfusionMatrix& matrix, const LabelSpace& space) {
  Check(matrix.num_classes() == space.size(), "confusion matrix does not match " + space.name());
  const std::size_t n = space.size();
  ConfusionMatrix out(space.group_names().size());
  auto group = [&](std::size_t index) {
    return index == n ? out.background_index() : std::size_t{space.GroupOf(space.classes()[index].id)};
  };
  for (std::size_t g = 0; g <= n; ++g) {
    for (std::size_t p = 0; p <= n; ++p) out.at(group(g), group(p)) += matrix.at(g, p);
  }
  return out;
}

}  // namespace pdeval
