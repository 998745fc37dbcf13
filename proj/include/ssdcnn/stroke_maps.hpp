#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/ink.hpp"

namespace ssdcnn {

inline constexpr int kDefaultStackDepth = 28;
inline constexpr int kDefaultMapSize = 32;

/// Square binary raster, row-major with rows along y.
struct BinaryMap {
  int size = 0;
  std::vector<std::uint8_t> cells;

  BinaryMap() = default;
  explicit BinaryMap(int n) : size(n), cells(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {}

  std::uint8_t at(int x, int y) const { return cells[static_cast<std::size_t>(y) * size + x]; }
  void set(int x, int y) { cells[static_cast<std::size_t>(y) * size + x] = 1; }

  int popcount() const {
    int n = 0;
    for (auto c : cells) n += c;
    return n;
  }

  friend bool operator==(const BinaryMap&, const BinaryMap&) = default;
};

/// depth x size x size binary tensor of per-stroke maps in writing order.
struct StrokeMapStack {
  int depth = 0;
  int size = 0;
  std::vector<std::uint8_t> data;

  StrokeMapStack() = default;
  StrokeMapStack(int s, int n)
      : depth(s), size(n), data(static_cast<std::size_t>(s) * static_cast<std::size_t>(n) * n, 0) {}

  std::size_t plane() const { return static_cast<std::size_t>(size) * size; }

  BinaryMap map(int i) const {
    BinaryMap m(size);
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(plane() * i), plane(), m.cells.begin());
    return m;
  }

  friend bool operator==(const StrokeMapStack&, const StrokeMapStack&) = default;
};

/// Round half up to the nearest cell index.
inline int grid_cell(double v) { return static_cast<int>(std::floor(v + 0.5)); }

/// Calls `visit(x, y)` for every cell of the 8-connected Bresenham line from
/// (x0, y0) to (x1, y1), both ends included.
template <class Visit>
void bresenham(int x0, int y0, int x1, int y1, Visit&& visit) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    visit(x0, y0);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

namespace maps_detail {

inline void draw_stroke(const Stroke& stroke, BinaryMap& map) {
  const double hi = static_cast<double>(map.size - 1);
  for (const auto& p : stroke.points) {
    if (!(p.x >= 0.0 && p.x <= hi && p.y >= 0.0 && p.y <= hi)) {
      throw Error(ErrorCode::CoordinateOutOfRange,
                  "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside [0, " +
                      std::to_string(map.size - 1) + "]");
    }
  }
  const auto& pts = stroke.points;
  if (pts.size() == 1) {
    map.set(grid_cell(pts[0].x), grid_cell(pts[0].y));
    return;
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    bresenham(grid_cell(pts[i - 1].x), grid_cell(pts[i - 1].y), grid_cell(pts[i].x), grid_cell(pts[i].y),
              [&](int x, int y) { map.set(x, y); });
  }
}

}  // namespace maps_detail

/// Rasterizes a stroke already normalized into [0, size-1]^2.
inline BinaryMap rasterize_stroke(const Stroke& stroke, int size = kDefaultMapSize) {
  if (stroke.points.empty()) throw Error(ErrorCode::EmptyStroke, "cannot rasterize an empty stroke");
  BinaryMap map(size);
  maps_detail::draw_stroke(stroke, map);
  return map;
}

/// Stacks one map per stroke in writing order, zero-padded to `depth`.
/// Strokes past depth-1 are merged into the last map.
inline StrokeMapStack build_stack(const InkCharacter& ink, int depth = kDefaultStackDepth,
                                  int size = kDefaultMapSize) {
  validate(ink);
  StrokeMapStack stack(depth, size);
  for (std::size_t s = 0; s < ink.strokes.size(); ++s) {
    const int slot = std::min(static_cast<int>(s), depth - 1);
    BinaryMap map = rasterize_stroke(ink.strokes[s], size);
    auto* dst = stack.data.data() + stack.plane() * static_cast<std::size_t>(slot);
    for (std::size_t i = 0; i < map.cells.size(); ++i) dst[i] |= map.cells[i];
  }
  return stack;
}

/// Offline bitmap: union of all stroke rasters.
inline BinaryMap to_static_image(const InkCharacter& ink, int size = kDefaultMapSize) {
  validate(ink);
  BinaryMap map(size);
  for (const auto& stroke : ink.strokes) maps_detail::draw_stroke(stroke, map);
  return map;
}

/// Debug dump as binary PGM (P5), ink cells white.
inline void write_pgm(const BinaryMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "P5\n" << map.size << " " << map.size << "\n255\n";
  for (auto c : map.cells) out.put(c ? static_cast<char>(255) : static_cast<char>(0));
}

}  // namespace ssdcnn
