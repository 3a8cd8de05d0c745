// Copyright 2026 The qmcc developers
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

#include <zlib.h>

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "qmcc/error.hpp"
#include "qmcc/rng.hpp"

namespace qmcc {

struct Image {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

namespace detail {

inline std::uint32_t read_be32(std::span<const std::uint8_t> bytes,
                               std::size_t offset) {
  if (offset + 4 > bytes.size()) {
    throw FormatError("truncated header at byte " + std::to_string(offset));
  }
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) |
         std::uint32_t{bytes[offset + 3]};
}

}  // namespace detail

/// Parses an IDX image container: big-endian magic 0x00000803, then the
/// image count, rows and columns, then row-major u8 pixels.
inline std::vector<Image> parse_idx_images(std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = detail::read_be32(bytes, 0);
  if (magic != 0x00000803u) {
    throw FormatError("bad image magic 0x" + [magic] {
      char buf[9];
      std::snprintf(buf, sizeof(buf), "%08x", magic);
      return std::string(buf);
    }() + " at byte 0");
  }
  const std::uint32_t count = detail::read_be32(bytes, 4);
  const std::uint32_t rows = detail::read_be32(bytes, 8);
  const std::uint32_t cols = detail::read_be32(bytes, 12);
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096) {
    throw FormatError("implausible image dimensions " + std::to_string(rows) +
                      "x" + std::to_string(cols) + " at byte 8");
  }
  const std::size_t pixel_count =
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  const std::size_t expected = 16 + pixel_count * count;
  if (bytes.size() < expected) {
    throw FormatError("image payload truncated at byte " +
                      std::to_string(bytes.size()) + ", expected " +
                      std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) {
    throw FormatError("trailing data after byte " + std::to_string(expected));
  }
  std::vector<Image> images(count);
  std::size_t offset = 16;
  for (Image& image : images) {
    image.rows = static_cast<int>(rows);
    image.cols = static_cast<int>(cols);
    image.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                        bytes.begin() +
                            static_cast<std::ptrdiff_t>(offset + pixel_count));
    offset += pixel_count;
  }
  return images;
}

/// Parses an IDX label container: magic 0x00000801, count, then u8 labels.
inline std::vector<std::uint8_t> parse_idx_labels(
    std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = detail::read_be32(bytes, 0);
  if (magic != 0x00000801u) {
    throw FormatError("bad label magic at byte 0");
  }
  const std::uint32_t count = detail::read_be32(bytes, 4);
  const std::size_t expected = 8 + static_cast<std::size_t>(count);
  if (bytes.size() < expected) {
    throw FormatError("label payload truncated at byte " +
                      std::to_string(bytes.size()) + ", expected " +
                      std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) {
    throw FormatError("trailing data after byte " + std::to_string(expected));
  }
  std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 9) {
      throw FormatError("label value " + std::to_string(labels[i]) +
                        " at byte " + std::to_string(8 + i) +
                        " is not a digit");
    }
  }
  return labels;
}

/// Inflates a gzip stream.
inline std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes) {
  z_stream stream{};
  // 15 window bits + 32: auto-detect zlib or gzip wrapping.
  if (inflateInit2(&stream, 15 + 32) != Z_OK) {
    throw FormatError("zlib initialization failed");
  }
  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 1 << 16> chunk;
  stream.next_in = const_cast<std::uint8_t*>(bytes.data());
  stream.avail_in = static_cast<uInt>(bytes.size());
  int status = Z_OK;
  while (status != Z_STREAM_END) {
    stream.next_out = chunk.data();
    stream.avail_out = static_cast<uInt>(chunk.size());
    status = inflate(&stream, Z_NO_FLUSH);
    if (status != Z_OK && status != Z_STREAM_END) {
      inflateEnd(&stream);
      throw FormatError("corrupt gzip stream");
    }
    out.insert(out.end(), chunk.data(),
               chunk.data() + (chunk.size() - stream.avail_out));
    if (status == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
      inflateEnd(&stream);
      throw FormatError("gzip stream ended early");
    }
  }
  inflateEnd(&stream);
  return out;
}

/// Reads a file, transparently decompressing gzip content.
inline std::vector<std::uint8_t> read_bytes_auto(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
    return gunzip(bytes);
  }
  return bytes;
}

/// Mean cell intensities of a fixed 4x8 grid over a 28x28 image, row-major,
/// scaled to [0, 1]. Row heights are 7,7,7,7; column widths 4,3,4,3,4,3,4,3.
inline std::vector<double> rough_grid_features(const Image& image) {
  if (image.rows != 28 || image.cols != 28 ||
      image.pixels.size() != 28u * 28u) {
    throw ShapeError("rough grid features need a 28x28 image");
  }
  static constexpr std::array<int, 5> kRowEdges{0, 7, 14, 21, 28};
  static constexpr std::array<int, 9> kColEdges{0, 4, 7, 11, 14, 18, 21, 25, 28};
  std::vector<double> features;
  features.reserve(32);
  for (int gr = 0; gr < 4; ++gr) {
    for (int gc = 0; gc < 8; ++gc) {
      double sum = 0.0;
      int cells = 0;
      for (int r = kRowEdges[gr]; r < kRowEdges[gr + 1]; ++r) {
        for (int c = kColEdges[gc]; c < kColEdges[gc + 1]; ++c) {
          sum += image.pixels[static_cast<std::size_t>(r) * 28 + c];
          ++cells;
        }
      }
      features.push_back(sum / (255.0 * cells));
    }
  }
  return features;
}

/// Seeded train/test index split per requested label, without replacement
/// and disjoint by construction. Lists follow the order of `wanted`.
struct SelectedSubsets {
  std::vector<std::vector<std::size_t>> train;  ///< pool indices per label
  std::vector<std::vector<std::size_t>> test;
};

inline SelectedSubsets select_subset(std::span<const std::uint8_t> pool_labels,
                                     std::span<const int> wanted,
                                     int train_count, int test_count,
                                     std::uint64_t seed) {
  if (train_count < 0 || test_count < 0 || train_count + test_count < 1) {
    throw DataError("subset selection needs a positive sample count");
  }
  Rng rng(seed);
  SelectedSubsets subsets;
  for (const int label : wanted) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < pool_labels.size(); ++i) {
      if (pool_labels[i] == label) {
        indices.push_back(i);
      }
    }
    const std::size_t need =
        static_cast<std::size_t>(train_count) + static_cast<std::size_t>(test_count);
    if (indices.size() < need) {
      throw DataError("label " + std::to_string(label) + " has " +
                      std::to_string(indices.size()) + " samples, need " +
                      std::to_string(need));
    }
    rng.shuffle(indices);
    subsets.train.emplace_back(indices.begin(), indices.begin() + train_count);
    subsets.test.emplace_back(indices.begin() + train_count,
                              indices.begin() + train_count + test_count);
  }
  return subsets;
}

/// One cached feature record: the original dataset label plus raw (unpadded)
/// features.
struct FeatureRow {
  int label = 0;
  std::vector<double> features;
};

/// Writes rows as CSV with header label,f0,...,f{n-1}; doubles use the
/// shortest round-trip representation.
inline void write_feature_csv(const std::filesystem::path& path,
                              std::span<const FeatureRow> rows) {
  if (rows.empty()) {
    throw DataError("refusing to write an empty feature file");
  }
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  out << "label";
  for (std::size_t f = 0; f < rows.front().features.size(); ++f) {
    out << ",f" << f;
  }
  out << '\n';
  for (const FeatureRow& row : rows) {
    out << row.label;
    for (const double value : row.features) {
      std::array<char, 32> buf;
      const auto result =
          std::to_chars(buf.data(), buf.data() + buf.size(), value);
      out << ',' << std::string_view(buf.data(), result.ptr);
    }
    out << '\n';
  }
}

inline std::vector<FeatureRow> read_feature_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("label", 0) != 0) {
    throw FormatError(path.string() + ": missing feature header");
  }
  std::vector<FeatureRow> rows;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) {
      continue;
    }
    FeatureRow row;
    const char* cursor = line.data();
    const char* end = line.data() + line.size();
    auto parsed = std::from_chars(cursor, end, row.label);
    if (parsed.ec != std::errc{}) {
      throw FormatError(path.string() + ":" + std::to_string(line_number) +
                        ": bad label field");
    }
    cursor = parsed.ptr;
    while (cursor != end) {
      if (*cursor != ',') {
        throw FormatError(path.string() + ":" + std::to_string(line_number) +
                          ": expected comma");
      }
      ++cursor;
      double value = 0.0;
      const auto fparsed = std::from_chars(cursor, end, value);
      if (fparsed.ec != std::errc{}) {
        throw FormatError(path.string() + ":" + std::to_string(line_number) +
                          ": bad feature field");
      }
      cursor = fparsed.ptr;
      row.features.push_back(value);
    }
    if (row.features.empty()) {
      throw FormatError(path.string() + ":" + std::to_string(line_number) +
                        ": row has no features");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw FormatError(path.string() + ": no feature rows");
  }
  return rows;
}

}  // namespace qmcc
