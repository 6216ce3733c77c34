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

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pdeval/core.hpp"

namespace pdeval::io {

namespace fs = std::filesystem;

inline std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::uint8_t> ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes through a temporary sibling and renames it into place.
inline void WriteAtomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

struct PngHeader {
  std::size_t width = 0;
  std::size_t height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr OpenFile(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

enum class PngTarget { kRgb8, kGray8, kGray16 };

// Decodes into a flat sample buffer. All libpng work happens in this frame so
// longjmp never crosses a C++ destructor.
inline std::vector<std::uint8_t> ReadPng(const fs::path& path, PngTarget target,
                                         PngHeader& header) {
  FilePtr file = OpenFile(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw IoError(path.string() + " is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  std::string failure;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  header.width = png_get_image_width(png, info);
  header.height = png_get_image_height(png, info);
  header.bit_depth = png_get_bit_depth(png, info);
  header.color_type = png_get_color_type(png, info);
  const int color = header.color_type;
  const int depth = header.bit_depth;
  std::size_t channels = 1;
  std::size_t bytes_per_sample = 1;

  switch (target) {
    case PngTarget::kRgb8:
      if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
      if ((color & PNG_COLOR_MASK_COLOR) == 0) {
        if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        png_set_gray_to_rgb(png);
      }
      if (depth == 16) png_set_scale_16(png);
      if ((color & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(png);
      channels = 3;
      break;
    case PngTarget::kGray8:
      if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_PALETTE) {
        failure = "expected a single-channel 8-bit PNG";
      } else if (depth == 16) {
        failure = "expected 8-bit samples, got 16-bit";
      } else if (depth < 8) {
        png_set_packing(png);
      }
      break;
    case PngTarget::kGray16:
      if (color != PNG_COLOR_TYPE_GRAY) {
        failure = "expected a 16-bit grayscale PNG";
      } else if (depth == 16) {
        png_set_swap(png);
        bytes_per_sample = 2;
      } else {
        failure = "expected 16-bit samples, got " + std::to_string(depth) + "-bit";
      }
      break;
  }
  if (failure.empty()) {
    png_read_update_info(png, info);
    const std::size_t stride = header.width * channels * bytes_per_sample;
    if (png_get_rowbytes(png, info) != stride) {
      failure = "unexpected PNG row layout";
    } else {
      pixels.resize(stride * header.height);
      rows.resize(header.height);
      for (std::size_t y = 0; y < header.height; ++y) rows[y] = pixels.data() + y * stride;
      png_read_image(png, rows.data());
      png_read_end(png, nullptr);
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!failure.empty()) throw IoError(path.string() + ": " + failure);
  return pixels;
}

inline void WritePng(const fs::path& path, const std::uint8_t* data, std::size_t width,
                     std::size_t height, int color_type, int bit_depth) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    FilePtr file = OpenFile(tmp, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
      png_destroy_write_struct(&png, nullptr);
      throw IoError("png_create_info_struct failed");
    }
    const std::size_t channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    const std::size_t stride = width * channels * static_cast<std::size_t>(bit_depth / 8);
    std::vector<png_bytep> rows(height);
    for (std::size_t y = 0; y < height; ++y) {
      rows[y] = const_cast<png_bytep>(data + y * stride);
    }
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      throw IoError("failed to encode PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string());
}

}  // namespace detail

inline PngHeader ReadPngHeader(const fs::path& path) {
  detail::FilePtr file = detail::OpenFile(path, "rb");
  std::uint8_t buf[24];
  if (std::fread(buf, 1, sizeof(buf), file.get()) != sizeof(buf) || png_sig_cmp(buf, 0, 8) != 0 ||
      std::memcmp(buf + 12, "IHDR", 4) != 0) {
    throw IoError(path.string() + " is not a PNG file");
  }
  auto be32 = [&](int off) {
    return (std::size_t{buf[off]} << 24) | (std::size_t{buf[off + 1]} << 16) |
           (std::size_t{buf[off + 2]} << 8) | std::size_t{buf[off + 3]};
  };
  return {be32(16), be32(20), 0, 0};
}

inline RasterImage ReadPngRgb(const fs::path& path) {
  PngHeader header;
  const auto bytes = detail::ReadPng(path, detail::PngTarget::kRgb8, header);
  return image_from_bytes(bytes, header.width, header.height);
}

inline void WritePngRgb(const fs::path& path, const RasterImage& image) {
  const auto bytes = bytes_from_image(image);
  detail::WritePng(path, bytes.data(), image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8);
}

inline Grid<std::uint8_t> ReadPngGray8(const fs::path& path) {
  PngHeader header;
  auto bytes = detail::ReadPng(path, detail::PngTarget::kGray8, header);
  return Grid<std::uint8_t>(header.width, header.height, std::move(bytes));
}

inline void WritePngGray8(const fs::path& path, const Grid<std::uint8_t>& grid) {
  detail::WritePng(path, grid.data().data(), grid.width(), grid.height(), PNG_COLOR_TYPE_GRAY, 8);
}

inline Grid<std::uint16_t> ReadPngGray16(const fs::path& path) {
  PngHeader header;
  const auto bytes = detail::ReadPng(path, detail::PngTarget::kGray16, header);
  std::vector<std::uint16_t> values(header.width * header.height);
  std::memcpy(values.data(), bytes.data(), bytes.size());
  return Grid<std::uint16_t>(header.width, header.height, std::move(values));
}

inline void WritePngGray16(const fs::path& path, const Grid<std::uint16_t>& grid) {
  detail::WritePng(path, reinterpret_cast<const std::uint8_t*>(grid.data().data()), grid.width(),
                   grid.height(), PNG_COLOR_TYPE_GRAY, 16);
}

// Float plane: 16-byte header ("DCF32\0", u32 width, u32 height, u16
// reserved), then little-endian row-major float32 values.
inline constexpr char kF32Magic[6] = {'D', 'C', 'F', '3', '2', '\0'};
inline constexpr std::size_t kF32HeaderSize = 16;

namespace detail {

inline void PutLe(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t GetLe(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline float FloatFromBits(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

inline std::uint32_t BitsFromFloat(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  return bits;
}

}  // namespace detail

inline std::string EncodeF32Plane(const Grid<float>& plane) {
  std::string out(kF32Magic, sizeof(kF32Magic));
  detail::PutLe(out, plane.width(), 4);
  detail::PutLe(out, plane.height(), 4);
  detail::PutLe(out, 0, 2);
  out.reserve(kF32HeaderSize + 4 * plane.size());
  for (float v : plane.data()) detail::PutLe(out, detail::BitsFromFloat(v), 4);
  return out;
}

inline Grid<float> DecodeF32Plane(std::span<const std::uint8_t> bytes, const std::string& name) {
  if (bytes.size() < kF32HeaderSize || std::memcmp(bytes.data(), kF32Magic, 6) != 0) {
    throw IoError(name + " is not a DCF32 plane");
  }
  const std::size_t w = detail::GetLe(bytes.data() + 6, 4);
  const std::size_t h = detail::GetLe(bytes.data() + 10, 4);
  if (bytes.size() != kF32HeaderSize + 4 * w * h) {
    throw IoError(name + ": DCF32 payload holds " + std::to_string(bytes.size() - kF32HeaderSize) +
                  " bytes, expected " + std::to_string(4 * w * h));
  }
  std::vector<float> values(w * h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = detail::FloatFromBits(
        static_cast<std::uint32_t>(detail::GetLe(bytes.data() + kF32HeaderSize + 4 * i, 4)));
  }
  return Grid<float>(w, h, std::move(values));
}

inline Grid<float> ReadF32Plane(const fs::path& path) {
  return DecodeF32Plane(ReadBytes(path), path.string());
}

inline void WriteF32Plane(const fs::path& path, const Grid<float>& plane) {
  WriteAtomic(path, EncodeF32Plane(plane));
}

// Reads a 2-D (or HxWx1) little-endian float32/float64 C-order .npy array.
inline Grid<float> ReadNpy(const fs::path& path) {
  const auto bytes = ReadBytes(path);
  const std::string name = path.string();
  if (bytes.size() < 10 || std::memcmp(bytes.data(), "\x93NUMPY", 6) != 0) {
    throw IoError(name + " is not a .npy file");
  }
  const int major = bytes[6];
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = detail::GetLe(bytes.data() + 8, 2);
    offset = 10;
  } else {
    if (bytes.size() < 12) throw IoError(name + ": truncated .npy header");
    header_len = detail::GetLe(bytes.data() + 8, 4);
    offset = 12;
  }
  if (bytes.size() < offset + header_len) throw IoError(name + ": truncated .npy header");
  const std::string header(reinterpret_cast<const char*>(bytes.data() + offset), header_len);
  offset += header_len;

  int item = 0;
  if (header.find("'descr': '<f4'") != std::string::npos) {
    item = 4;
  } else if (header.find("'descr': '<f8'") != std::string::npos) {
    item = 8;
  } else {
    throw IoError(name + ": only little-endian float32/float64 arrays are supported");
  }
  if (header.find("'fortran_order': False") == std::string::npos) {
    throw IoError(name + ": Fortran-ordered arrays are not supported");
  }
  const auto open = header.find('(', header.find("'shape'"));
  const auto close = header.find(')', open);
  if (open == std::string::npos || close == std::string::npos) {
    throw IoError(name + ": malformed .npy shape");
  }
  std::vector<std::size_t> dims;
  std::istringstream shape(header.substr(open + 1, close - open - 1));
  std::string tok;
  while (std::getline(shape, tok, ',')) {
    if (tok.find_first_not_of(' ') == std::string::npos) continue;
    dims.push_back(static_cast<std::size_t>(std::stoull(tok)));
  }
  if (dims.size() == 3 && dims[2] == 1) dims.pop_back();
  if (dims.size() != 2) throw IoError(name + ": expected a 2-D array");
  const std::size_t h = dims[0];
  const std::size_t w = dims[1];
  if (bytes.size() != offset + w * h * static_cast<std::size_t>(item)) {
    throw IoError(name + ": .npy payload size does not match its shape");
  }
  std::vector<float> values(w * h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint8_t* p = bytes.data() + offset + i * static_cast<std::size_t>(item);
    if (item == 4) {
      values[i] = detail::FloatFromBits(static_cast<std::uint32_t>(detail::GetLe(p, 4)));
    } else {
      const std::uint64_t bits = detail::GetLe(p, 8);
      double d;
      std::memcpy(&d, &bits, sizeof(d));
      values[i] = static_cast<float>(d);
    }
  }
  return Grid<float>(w, h, std::move(values));
}

// Minimal .npy writer (float32, version 1.0); used for fixtures.
inline void WriteNpy(const fs::path& path, const Grid<float>& plane) {
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': (" +
                       std::to_string(plane.height()) + ", " + std::to_string(plane.width()) +
                       "), }";
  while ((10 + header.size() + 1) % 64 != 0) header.push_back(' ');
  header.push_back('\n');
  std::string out = "\x93NUMPY";
  out.push_back(1);
  out.push_back(0);
  detail::PutLe(out, header.size(), 2);
  out += header;
  for (float v : plane.data()) detail::PutLe(out, detail::BitsFromFloat(v), 4);
  WriteAtomic(path, out);
}

}  // namespace pdeval::io
