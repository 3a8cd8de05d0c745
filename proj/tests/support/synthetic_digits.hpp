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

// Seeded generator of handwritten-style 28x28 digit images plus IDX
// serialization helpers. The desk-scale experiment suites fall back to this
// surrogate whenever no real digit dataset is available in the environment,
// and the dataset tests use the serializers as round-trip fixtures.

#pragma once

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "qmcc/dataset.hpp"
#include "qmcc/error.hpp"
#include "qmcc/rng.hpp"

namespace qmcc::testsupport {

struct Point {
  double x = 0.0;  // column
  double y = 0.0;  // row
};

struct Segment {
  Point a;
  Point b;
};

inline double segment_distance(const Point& p, const Segment& s) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  double u = 0.0;
  if (len2 > 0.0) {
    u = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
    u = std::clamp(u, 0.0, 1.0);
  }
  const double cx = s.a.x + u * dx;
  const double cy = s.a.y + u * dy;
  return std::hypot(p.x - cx, p.y - cy);
}

/// Stroke skeletons in a nominal 28x28 canvas, x = column, y = row.
inline std::vector<Segment> digit_skeleton(int digit, Rng& rng) {
  std::vector<Segment> strokes;
  const auto line = [&](double x1, double y1, double x2, double y2) {
    strokes.push_back({{x1, y1}, {x2, y2}});
  };
  const auto arc = [&](double cx, double cy, double rx, double ry,
                       double from_deg, double to_deg, int pieces) {
    const double step = (to_deg - from_deg) / pieces;
    for (int i = 0; i < pieces; ++i) {
      const double a0 = (from_deg + i * step) * std::numbers::pi / 180.0;
      const double a1 = (from_deg + (i + 1) * step) * std::numbers::pi / 180.0;
      line(cx + rx * std::cos(a0), cy + ry * std::sin(a0),
           cx + rx * std::cos(a1), cy + ry * std::sin(a1));
    }
  };
  switch (digit) {
    case 0:
      arc(14, 14, 5.5, 8.5, 0, 360, 12);
      break;
    case 1:
      line(14, 5, 14, 23);
      line(10.5, 8.5, 14, 5);
      if (rng.uniform() < 0.5) {
        line(11, 23, 17, 23);
      }
      break;
    case 2:
      arc(14, 9, 5.5, 4.5, 180, 360, 6);
      line(19.5, 9, 8, 22);
      line(8, 22, 20, 22);
      break;
    case 3:
      arc(13.5, 9, 5, 4, 150, 360, 5);
      arc(13.5, 18, 5.5, 5, 180, 420, 6);
      break;
    case 4:
      line(16.5, 5, 7.5, 16.5);
      line(7.5, 16.5, 21, 16.5);
      line(16.5, 5, 16.5, 23);
      break;
    case 5:
      line(18.5, 5.5, 9.5, 5.5);
      line(9.5, 5.5, 9, 13);
      arc(13.5, 17, 5.5, 5.5, 250, 470, 6);
      break;
    case 6:
      line(16, 5, 10, 14);
      arc(13.5, 17.5, 4.8, 5.2, 0, 360, 10);
      break;
    case 7:
      line(8.5, 6, 20, 6);
      line(20, 6, 11.5, 23);
      if (rng.uniform() < 0.35) {
        line(11.5, 13.5, 18, 13.5);
      }
      break;
    case 8:
      arc(14, 9.5, 4.2, 4.0, 0, 360, 10);
      arc(14, 18.5, 5.0, 4.6, 0, 360, 10);
      break;
    case 9:
      arc(13.5, 10, 4.6, 4.4, 0, 360, 10);
      line(18, 10.5, 16, 23);
      break;
    default:
      throw DataError("no skeleton for digit " + std::to_string(digit));
  }
  return strokes;
}

/// Renders one digit with seeded jitter: translation, shear, scale, stroke
/// width, intensity and pixel noise.
inline Image render_digit(int digit, Rng& rng) {
  const std::vector<Segment> skeleton = digit_skeleton(digit, rng);
  const double dx = rng.uniform(-2.0, 2.0);
  const double dy = rng.uniform(-2.0, 2.0);
  const double shear = rng.uniform(-0.18, 0.18);
  const double scale = rng.uniform(0.88, 1.1);
  const double thickness = rng.uniform(1.1, 1.9);
  const double amplitude = rng.uniform(170.0, 255.0);

  std::vector<Segment> strokes = skeleton;
  for (Segment& s : strokes) {
    for (Point* p : {&s.a, &s.b}) {
      double x = (p->x - 14.0) * scale;
      double y = (p->y - 14.0) * scale;
      x += shear * y;
      p->x = x + 14.0 + dx;
      p->y = y + 14.0 + dy;
    }
  }

  Image image;
  image.rows = 28;
  image.cols = 28;
  image.pixels.assign(28 * 28, 0);
  for (int r = 0; r < 28; ++r) {
    for (int c = 0; c < 28; ++c) {
      const Point p{static_cast<double>(c), static_cast<double>(r)};
      double dist = 1e9;
      for (const Segment& s : strokes) {
        dist = std::min(dist, segment_distance(p, s));
      }
      double value = 0.0;
      if (dist <= thickness) {
        value = amplitude;
      } else if (dist <= thickness + 1.0) {
        value = amplitude * (thickness + 1.0 - dist);
      }
      value += rng.uniform(-14.0, 14.0);  // sensor-style noise
      image.pixels[static_cast<std::size_t>(r) * 28 + c] =
          static_cast<std::uint8_t>(std::clamp(value, 0.0, 255.0));
    }
  }
  return image;
}

struct SyntheticSet {
  std::vector<Image> images;
  std::vector<std::uint8_t> labels;
};

/// Interleaved pool of per_digit rendered samples for each requested digit.
inline SyntheticSet make_digit_pool(std::span<const int> digits, int per_digit,
                                    std::uint64_t seed) {
  Rng rng(seed);
  SyntheticSet set;
  for (int n = 0; n < per_digit; ++n) {
    for (const int digit : digits) {
      set.images.push_back(render_digit(digit, rng));
      set.labels.push_back(static_cast<std::uint8_t>(digit));
    }
  }
  return set;
}

inline void append_be32(std::vector<std::uint8_t>& bytes, std::uint32_t value) {
  bytes.push_back(static_cast<std::uint8_t>(value >> 24));
  bytes.push_back(static_cast<std::uint8_t>(value >> 16));
  bytes.push_back(static_cast<std::uint8_t>(value >> 8));
  bytes.push_back(static_cast<std::uint8_t>(value));
}

inline std::vector<std::uint8_t> idx_image_bytes(std::span<const Image> images) {
  std::vector<std::uint8_t> bytes;
  append_be32(bytes, 0x00000803u);
  append_be32(bytes, static_cast<std::uint32_t>(images.size()));
  append_be32(bytes, images.empty() ? 28u : static_cast<std::uint32_t>(images[0].rows));
  append_be32(bytes, images.empty() ? 28u : static_cast<std::uint32_t>(images[0].cols));
  for (const Image& image : images) {
    bytes.insert(bytes.end(), image.pixels.begin(), image.pixels.end());
  }
  return bytes;
}

inline std::vector<std::uint8_t> idx_label_bytes(
    std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> bytes;
  append_be32(bytes, 0x00000801u);
  append_be32(bytes, static_cast<std::uint32_t>(labels.size()));
  bytes.insert(bytes.end(), labels.begin(), labels.end());
  return bytes;
}

inline std::vector<std::uint8_t> gzip_bytes(std::span<const std::uint8_t> raw) {
  z_stream stream{};
  if (deflateInit2(&stream, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw DataError("deflate initialization failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&stream, static_cast<uLong>(raw.size())));
  stream.next_in = const_cast<std::uint8_t*>(raw.data());
  stream.avail_in = static_cast<uInt>(raw.size());
  stream.next_out = out.data();
  stream.avail_out = static_cast<uInt>(out.size());
  if (deflate(&stream, Z_FINISH) != Z_STREAM_END) {
    deflateEnd(&stream);
    throw DataError("deflate failed");
  }
  out.resize(stream.total_out);
  deflateEnd(&stream);
  return out;
}

inline void write_file(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
}

/// Writes a synthetic pool as standard-named IDX files in dir and returns
/// the (images, labels) paths.
inline std::pair<std::filesystem::path, std::filesystem::path>
write_idx_pair(const std::filesystem::path& dir, const SyntheticSet& set,
               bool compressed = false) {
  std::filesystem::create_directories(dir);
  std::vector<std::uint8_t> image_bytes = idx_image_bytes(set.images);
  std::vector<std::uint8_t> label_bytes = idx_label_bytes(set.labels);
  std::filesystem::path images_path = dir / "train-images-idx3-ubyte";
  std::filesystem::path labels_path = dir / "train-labels-idx1-ubyte";
  if (compressed) {
    image_bytes = gzip_bytes(image_bytes);
    label_bytes = gzip_bytes(label_bytes);
    images_path += ".gz";
    labels_path += ".gz";
  }
  write_file(images_path, image_bytes);
  write_file(labels_path, label_bytes);
  return {images_path, labels_path};
}

}  // namespace qmcc::testsupport
