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
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdeval {

// Error categories map onto CLI exit codes: validation failures exit 1,
// I/O failures exit 2.
enum class ErrorKind { kValidation, kIo, kDegenerate };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ValidationError(const std::string& what) {
  return Error(ErrorKind::kValidation, what);
}

inline Error IoError(const std::string& what) {
  return Error(ErrorKind::kIo, what);
}

inline void Check(bool condition, const std::string& what) {
  if (!condition) throw ValidationError(what);
}

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double Dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 Cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double Norm(const Vec3& v) { return std::sqrt(Dot(v, v)); }

// Dense row-major grid with top-left origin. Base for every raster and field.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t width, std::size_t height, const T& fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}
  Grid(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    Check(data_.size() == width_ * height_,
          "grid data has " + std::to_string(data_.size()) + " elements, expected " +
              std::to_string(width_ * height_));
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  const T& operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& operator[](std::size_t i) { return data_[i]; }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }

  bool SameShape(std::size_t w, std::size_t h) const { return width_ == w && height_ == h; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

// RGB raster, channels in [0,1].
using RasterImage = Grid<Rgb>;

// Per-pixel validity is stored as bytes so fields stay trivially copyable
// and std::vector<bool> proxies never leak into span interfaces.
template <typename T>
struct MaskedField {
  Grid<T> values;
  Grid<std::uint8_t> valid;

  MaskedField() = default;
  MaskedField(std::size_t width, std::size_t height, const T& fill = T{}, bool is_valid = false)
      : values(width, height, fill), valid(width, height, is_valid ? 1 : 0) {}

  std::size_t width() const { return values.width(); }
  std::size_t height() const { return values.height(); }
  std::size_t size() const { return values.size(); }
  bool IsValid(std::size_t i) const { return valid[i] != 0; }

  std::size_t CountValid() const {
    return static_cast<std::size_t>(std::count_if(valid.data().begin(), valid.data().end(),
                                                  [](std::uint8_t v) { return v != 0; }));
  }

  friend bool operator==(const MaskedField&, const MaskedField&) = default;
};

using ScalarField = MaskedField<double>;
using NormalField = MaskedField<Vec3>;

using Label = std::uint8_t;
inline constexpr Label kIgnoreLabel = 255;
// Predicted maps use this id for pixels absorbed by the black background.
inline constexpr Label kBackgroundLabel = 254;

struct LabelMap {
  Grid<Label> labels;
  Label ignore_id = kIgnoreLabel;

  LabelMap() = default;
  LabelMap(std::size_t width, std::size_t height, Label fill = kIgnoreLabel)
      : labels(width, height, fill) {}
  LabelMap(std::size_t width, std::size_t height, std::vector<Label> data)
      : labels(width, height, std::move(data)) {}

  std::size_t width() const { return labels.width(); }
  std::size_t height() const { return labels.height(); }
  std::size_t size() const { return labels.size(); }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

struct ByteColor {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const ByteColor&, const ByteColor&) = default;
};

struct LabelClass {
  Label id = 0;
  std::string name;
  ByteColor display;
};

// Ordered class list with an optional super-category grouping.
class LabelSpace {
 public:
  LabelSpace(std::string name, std::vector<LabelClass> classes,
             std::vector<std::string> group_names = {}, std::vector<Label> grouping = {})
      : name_(std::move(name)),
        classes_(std::move(classes)),
        group_names_(std::move(group_names)),
        grouping_(std::move(grouping)) {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      for (std::size_t j = i + 1; j < classes_.size(); ++j) {
        Check(classes_[i].id != classes_[j].id,
              name_ + ": duplicate class id " + std::to_string(classes_[i].id));
        Check(!(classes_[i].display == classes_[j].display),
              name_ + ": classes " + classes_[i].name + " and " + classes_[j].name +
                  " share a display color");
      }
      Check(classes_[i].id != kIgnoreLabel && classes_[i].id != kBackgroundLabel,
            name_ + ": class id collides with a reserved label");
    }
    if (!grouping_.empty()) {
      Check(grouping_.size() == classes_.size(),
            name_ + ": grouping must cover every class");
      for (Label g : grouping_) {
        Check(g < group_names_.size(), name_ + ": grouping refers to unknown group");
      }
    }
  }

  const std::string& name() const { return name_; }
  std::span<const LabelClass> classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  bool HasGrouping() const { return !grouping_.empty(); }
  std::span<const std::string> group_names() const { return group_names_; }

  std::optional<std::size_t> IndexOf(Label id) const {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      if (classes_[i].id == id) return i;
    }
    return std::nullopt;
  }

  bool Contains(Label id) const { return IndexOf(id).has_value(); }

  const LabelClass& Get(Label id) const {
    auto index = IndexOf(id);
    Check(index.has_value(), name_ + ": unknown class id " + std::to_string(id));
    return classes_[*index];
  }

  // Super-category of a class; throws for spaces without grouping.
  Label GroupOf(Label id) const {
    Check(HasGrouping(), name_ + ": label space has no grouping");
    auto index = IndexOf(id);
    Check(index.has_value(),
          name_ + ": class " + std::to_string(id) + " has no group entry");
    return grouping_[*index];
  }

  // Label space whose classes are this space's groups.
  LabelSpace GroupSpace(std::span<const ByteColor> display) const {
    Check(HasGrouping(), name_ + ": label space has no grouping");
    Check(display.size() == group_names_.size(), name_ + ": group display colors mismatch");
    std::vector<LabelClass> groups;
    for (std::size_t i = 0; i < group_names_.size(); ++i) {
      groups.push_back({static_cast<Label>(i), group_names_[i], display[i]});
    }
    return LabelSpace(name_ + "-groups", std::move(groups));
  }

 private:
  std::string name_;
  std::vector<LabelClass> classes_;
  std::vector<std::string> group_names_;
  std::vector<Label> grouping_;
};

// The 19 Cityscapes train classes with the standard category grouping.
inline const LabelSpace& CityscapesSpace() {
  static const LabelSpace space = [] {
    std::vector<LabelClass> classes = {
        {0, "road", {128, 64, 128}},         {1, "sidewalk", {244, 35, 232}},
        {2, "building", {70, 70, 70}},       {3, "wall", {102, 102, 156}},
        {4, "fence", {190, 153, 153}},       {5, "pole", {153, 153, 153}},
        {6, "traffic light", {250, 170, 30}}, {7, "traffic sign", {220, 220, 0}},
        {8, "vegetation", {107, 142, 35}},   {9, "terrain", {152, 251, 152}},
        {10, "sky", {70, 130, 180}},         {11, "person", {220, 20, 60}},
        {12, "rider", {255, 0, 0}},          {13, "car", {0, 0, 142}},
        {14, "truck", {0, 0, 70}},           {15, "bus", {0, 60, 100}},
        {16, "train", {0, 80, 100}},         {17, "motorcycle", {0, 0, 230}},
        {18, "bicycle", {119, 11, 32}},
    };
    std::vector<std::string> groups = {"flat",   "construction", "object", "nature",
                                       "sky",    "human",        "vehicle"};
    // flat, construction, object, nature, sky, human, vehicle
    std::vector<Label> grouping = {0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 4, 5, 5, 6, 6, 6, 6, 6, 6};
    return LabelSpace("cityscapes19", std::move(classes), std::move(groups), std::move(grouping));
  }();
  return space;
}

inline const LabelSpace& CityscapesCategorySpace() {
  static const LabelSpace space = [] {
    const std::array<ByteColor, 7> display = {{{128, 64, 128},
                                               {70, 70, 70},
                                               {153, 153, 153},
                                               {107, 142, 35},
                                               {70, 130, 180},
                                               {220, 20, 60},
                                               {0, 0, 142}}};
    return CityscapesSpace().GroupSpace(display);
  }();
  return space;
}

// Converts an interleaved 8-bit RGB buffer; each channel becomes byte/255.
inline RasterImage image_from_bytes(std::span<const std::uint8_t> raw, std::size_t width,
                                    std::size_t height) {
  const std::size_t expected = 3 * width * height;
  Check(raw.size() == expected, "RGB buffer has " + std::to_string(raw.size()) +
                                    " bytes, expected " + std::to_string(expected) + " for " +
                                    std::to_string(width) + "x" + std::to_string(height));
  RasterImage image(width, height);
  for (std::size_t i = 0; i < width * height; ++i) {
    image[i] = {raw[3 * i] / 255.0, raw[3 * i + 1] / 255.0, raw[3 * i + 2] / 255.0};
  }
  return image;
}

inline std::uint8_t ChannelToByte(double c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

inline std::vector<std::uint8_t> bytes_from_image(const RasterImage& image) {
  std::vector<std::uint8_t> raw(3 * image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    raw[3 * i] = ChannelToByte(image[i].r);
    raw[3 * i + 1] = ChannelToByte(image[i].g);
    raw[3 * i + 2] = ChannelToByte(image[i].b);
  }
  return raw;
}

// Jointly valid (a_i, b_i) pairs in row-major order.
inline std::vector<std::pair<double, double>> masked_pairs(const ScalarField& a,
                                                           const ScalarField& b) {
  Check(a.width() == b.width() && a.height() == b.height(),
        "field dimensions differ: " + std::to_string(a.width()) + "x" +
            std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
            std::to_string(b.height()));
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.IsValid(i) && b.IsValid(i)) pairs.emplace_back(a.values[i], b.values[i]);
  }
  return pairs;
}

}  // namespace pdeval
