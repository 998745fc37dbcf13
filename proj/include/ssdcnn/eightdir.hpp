#pragma once

// Eight-directional feature extraction: 8 direction planes x 8x8 spatial
// samples = 512 values in [0, 1], direction-major.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/ink.hpp"
#include "ssdcnn/stroke_maps.hpp"

namespace ssdcnn {

inline constexpr int kDirections = 8;
inline constexpr int kDirFeatureSize = 512;

struct EightDirConfig {
  int grid = 64;              // accumulation grid side G
  int samples = 8;            // sampling grid side; 8 directions * samples^2 values
  double sigma = 0.0;         // Gaussian sigma in cells; 0 means grid / 16
  double truncate = 2.0;      // filter support, in sigmas
  double virtual_weight = 0.5;

  double effective_sigma() const { return sigma > 0.0 ? sigma : grid / 16.0; }
  int feature_size() const { return kDirections * samples * samples; }

  friend bool operator==(const EightDirConfig&, const EightDirConfig&) = default;
};

struct Segment {
  Point from;
  Point to;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Ink plus the pen-up segments joining each stroke's last point to the
/// next stroke's first point. The real strokes are left untouched.
struct PenUpInk {
  InkCharacter ink;
  std::vector<Segment> virtual_segments;
};

inline PenUpInk add_virtual_strokes(const InkCharacter& ink) {
  validate(ink);
  PenUpInk out{ink, {}};
  for (std::size_t s = 1; s < ink.strokes.size(); ++s) {
    out.virtual_segments.push_back(Segment{ink.strokes[s - 1].points.back(), ink.strokes[s].points.front()});
  }
  return out;
}

struct MomentTransform {
  double cx = 0.0, cy = 0.0;  // centroid
  double scale = 1.0;
  double center = 0.0;
  double hi = 0.0;

  Point apply(Point p) const {
    return Point{std::clamp((p.x - cx) * scale + center, 0.0, hi), std::clamp((p.y - cy) * scale + center, 0.0, hi)};
  }
};

/// Centroid to the grid center; the larger per-axis standard deviation sets a
/// single scale so that +-2 sigma spans the grid. Zero spread keeps unit scale.
inline MomentTransform moment_transform(const InkCharacter& ink, int grid) {
  validate(ink);
  const double n = static_cast<double>(ink.point_count());
  double sx = 0.0, sy = 0.0;
  for (const auto& s : ink.strokes) {
    for (const auto& p : s.points) {
      sx += p.x;
      sy += p.y;
    }
  }
  MomentTransform t;
  t.cx = sx / n;
  t.cy = sy / n;
  double vx = 0.0, vy = 0.0;
  for (const auto& s : ink.strokes) {
    for (const auto& p : s.points) {
      vx += (p.x - t.cx) * (p.x - t.cx);
      vy += (p.y - t.cy) * (p.y - t.cy);
    }
  }
  const double sd = std::sqrt(std::max(vx, vy) / n);
  t.hi = static_cast<double>(grid - 1);
  t.center = t.hi / 2.0;
  t.scale = sd > 0.0 ? t.hi / (4.0 * sd) : 1.0;
  return t;
}

inline InkCharacter moment_normalize(const InkCharacter& ink, int grid) {
  const MomentTransform t = moment_transform(ink, grid);
  InkCharacter out = ink;
  for (auto& s : out.strokes) {
    for (auto& p : s.points) p = t.apply(p);
  }
  return out;
}

/// Splits a direction onto the two adjacent reference directions
/// (45 degrees * d, y downward) by parallelogram decomposition.
inline std::array<double, kDirections> decompose_direction(double dx, double dy) {
  const double len = std::hypot(dx, dy);
  if (len == 0.0 || !std::isfinite(len)) {
    throw Error(ErrorCode::ZeroLengthSegment, "direction of a zero-length segment is undefined");
  }
  dx /= len;
  dy /= len;
  constexpr double kStep = std::numbers::pi / 4.0;
  double angle = std::atan2(dy, dx);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  int d0 = static_cast<int>(std::floor(angle / kStep)) % kDirections;
  const int d1 = (d0 + 1) % kDirections;

  auto ref = [](int d) {
    // exact values on the axes and diagonals
    static constexpr double h = std::numbers::sqrt2 / 2.0;
    static constexpr std::array<std::array<double, 2>, kDirections> r{
        {{1, 0}, {h, h}, {0, 1}, {-h, h}, {-1, 0}, {-h, -h}, {0, -1}, {h, -h}}};
    return r[static_cast<std::size_t>(d)];
  };
  const auto e0 = ref(d0);
  const auto e1 = ref(d1);
  const double det = e0[0] * e1[1] - e0[1] * e1[0];
  double a = (dx * e1[1] - dy * e1[0]) / det;
  double b = (e0[0] * dy - e0[1] * dx) / det;
  constexpr double kSnap = 1e-12;
  if (std::abs(a) < kSnap) a = 0.0;
  if (std::abs(b) < kSnap) b = 0.0;

  std::array<double, kDirections> w{};
  w[static_cast<std::size_t>(d0)] = std::max(a, 0.0);
  w[static_cast<std::size_t>(d1)] = std::max(b, 0.0);
  return w;
}

namespace eightdir_detail {

// 8 planes of grid x grid, direction-major
using Planes = std::vector<double>;

inline void accumulate_segment(Planes& planes, int grid, Point a, Point b, double weight) {
  if (a == b) return;
  const auto w = decompose_direction(b.x - a.x, b.y - a.y);
  const int x0 = grid_cell(a.x), y0 = grid_cell(a.y);
  const int x1 = grid_cell(b.x), y1 = grid_cell(b.y);
  const bool single = x0 == x1 && y0 == y1;
  const std::size_t plane = static_cast<std::size_t>(grid) * grid;
  bresenham(x0, y0, x1, y1, [&](int x, int y) {
    // the end cell belongs to the next segment
    if (!single && x == x1 && y == y1) return;
    const std::size_t cell = static_cast<std::size_t>(y) * grid + x;
    for (int d = 0; d < kDirections; ++d) {
      if (w[static_cast<std::size_t>(d)] > 0.0) planes[plane * d + cell] += weight * w[static_cast<std::size_t>(d)];
    }
  });
}

}  // namespace eightdir_detail

/// Eight-directional feature vector of an ink, values in [0, 1].
inline std::vector<double> extract(const InkCharacter& ink, const EightDirConfig& config = {}) {
  const int grid = config.grid;
  const InkCharacter norm = moment_normalize(ink, grid);
  const PenUpInk pen = add_virtual_strokes(norm);

  eightdir_detail::Planes planes(static_cast<std::size_t>(kDirections) * grid * grid, 0.0);
  for (const auto& s : pen.ink.strokes) {
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      eightdir_detail::accumulate_segment(planes, grid, s.points[i - 1], s.points[i], 1.0);
    }
  }
  for (const auto& seg : pen.virtual_segments) {
    eightdir_detail::accumulate_segment(planes, grid, seg.from, seg.to, config.virtual_weight);
  }

  // Gaussian blur evaluated directly at the sampling window centers.
  const double sigma = config.effective_sigma();
  const double radius = config.truncate * sigma;
  const double window = static_cast<double>(grid) / config.samples;
  const std::size_t plane = static_cast<std::size_t>(grid) * grid;
  std::vector<double> out(static_cast<std::size_t>(config.feature_size()), 0.0);
  for (int d = 0; d < kDirections; ++d) {
    const double* src = planes.data() + plane * d;
    for (int sy = 0; sy < config.samples; ++sy) {
      const double cy = (sy + 0.5) * window - 0.5;
      const int y_lo = std::max(0, static_cast<int>(std::ceil(cy - radius)));
      const int y_hi = std::min(grid - 1, static_cast<int>(std::floor(cy + radius)));
      for (int sx = 0; sx < config.samples; ++sx) {
        const double cx = (sx + 0.5) * window - 0.5;
        const int x_lo = std::max(0, static_cast<int>(std::ceil(cx - radius)));
        const int x_hi = std::min(grid - 1, static_cast<int>(std::floor(cx + radius)));
        double acc = 0.0;
        for (int y = y_lo; y <= y_hi; ++y) {
          const double gy = std::exp(-(y - cy) * (y - cy) / (2.0 * sigma * sigma));
          for (int x = x_lo; x <= x_hi; ++x) {
            const double v = src[static_cast<std::size_t>(y) * grid + x];
            if (v != 0.0) acc += v * gy * std::exp(-(x - cx) * (x - cx) / (2.0 * sigma * sigma));
          }
        }
        out[(static_cast<std::size_t>(d) * config.samples + sy) * config.samples + sx] = acc;
      }
    }
  }

  const double peak = *std::max_element(out.begin(), out.end());
  if (peak > 0.0) {
    for (auto& v : out) v = std::clamp(v / peak, 0.0, 1.0);
  }
  return out;
}

}  // namespace ssdcnn
