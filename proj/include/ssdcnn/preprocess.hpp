#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "ssdcnn/error.hpp"
#include "ssdcnn/ink.hpp"

namespace ssdcnn {

enum class InterpolationMethod { None, Linear, Spline };

inline std::string_view to_string(InterpolationMethod m) {
  switch (m) {
    case InterpolationMethod::None: return "none";
    case InterpolationMethod::Linear: return "linear";
    case InterpolationMethod::Spline: return "spline";
  }
  return "linear";
}

inline InterpolationMethod interpolation_from_string(std::string_view s) {
  if (s == "none") return InterpolationMethod::None;
  if (s == "linear") return InterpolationMethod::Linear;
  if (s == "spline") return InterpolationMethod::Spline;
  throw Error(ErrorCode::SyntaxError, "unknown interpolation method '" + std::string(s) + "'");
}

struct PreprocessConfig {
  double max_gap = 1.0;  // in target-grid cells
  InterpolationMethod method = InterpolationMethod::Linear;
  double drop_prob = 0.0;
  std::uint64_t seed = 0;

  void check() const {
    if (!(max_gap > 0.0)) throw Error(ErrorCode::NonPositiveGap, "max_gap must be positive");
    if (!(drop_prob >= 0.0 && drop_prob < 1.0)) {
      throw Error(ErrorCode::IndexOutOfRange, "drop_prob must lie in [0, 1)");
    }
  }

  friend bool operator==(const PreprocessConfig&, const PreprocessConfig&) = default;
};

namespace preprocess_detail {

inline double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

inline void check_gap(double max_gap) {
  if (!(max_gap > 0.0) || !std::isfinite(max_gap)) {
    throw Error(ErrorCode::NonPositiveGap, "max_gap must be a positive finite number");
  }
}

}  // namespace preprocess_detail

/// Inserts evenly spaced points between consecutive samples so that no gap
/// exceeds `max_gap`. Original points are kept in place.
inline Stroke interpolate_linear(const Stroke& stroke, double max_gap) {
  preprocess_detail::check_gap(max_gap);
  if (stroke.points.size() < 2) return stroke;
  Stroke out;
  out.points.reserve(stroke.points.size());
  out.points.push_back(stroke.points.front());
  for (std::size_t i = 1; i < stroke.points.size(); ++i) {
    const Point a = stroke.points[i - 1];
    const Point b = stroke.points[i];
    const double d = preprocess_detail::distance(a, b);
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(d / max_gap)));
    for (std::size_t k = 1; k < pieces; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(pieces);
      out.points.push_back(Point{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
    }
    out.points.push_back(b);
  }
  return out;
}

namespace preprocess_detail {

// One centripetal Catmull-Rom span p1 -> p2 in cubic Hermite form.
struct CatmullRomSpan {
  Point p1, p2, m1, m2;

  Point at(double u) const {
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    return Point{h00 * p1.x + h10 * m1.x + h01 * p2.x + h11 * m2.x,
                 h00 * p1.y + h10 * m1.y + h01 * p2.y + h11 * m2.y};
  }
};

inline CatmullRomSpan make_span(Point p0, Point p1, Point p2, Point p3) {
  constexpr double kEps = 1e-12;
  const double dt1 = std::sqrt(distance(p1, p2));
  double dt0 = std::sqrt(distance(p0, p1));
  double dt2 = std::sqrt(distance(p2, p3));
  if (dt0 < kEps) dt0 = dt1;
  if (dt2 < kEps) dt2 = dt1;
  auto tangent = [](Point a, Point b, Point c, double da, double db) {
    // derivative at b of the non-uniform Catmull-Rom through a, b, c
    return Point{(b.x - a.x) / da - (c.x - a.x) / (da + db) + (c.x - b.x) / db,
                 (b.y - a.y) / da - (c.y - a.y) / (da + db) + (c.y - b.y) / db};
  };
  Point m1 = tangent(p0, p1, p2, dt0, dt1);
  Point m2 = tangent(p1, p2, p3, dt1, dt2);
  m1 = Point{m1.x * dt1, m1.y * dt1};
  m2 = Point{m2.x * dt1, m2.y * dt1};
  return CatmullRomSpan{p1, p2, m1, m2};
}

inline void subdivide(const CatmullRomSpan& span, double u0, Point a, double u1, Point b, double max_gap,
                      std::vector<Point>& out, int depth) {
  if (distance(a, b) <= max_gap || depth >= 40) return;
  const double um = 0.5 * (u0 + u1);
  const Point m = span.at(um);
  subdivide(span, u0, a, um, m, max_gap, out, depth + 1);
  out.push_back(m);
  subdivide(span, um, m, u1, b, max_gap, out, depth + 1);
}

}  // namespace preprocess_detail

/// Resamples along a centripetal Catmull-Rom curve through the original
/// points (end tangents by point duplication). Strokes with fewer than three
/// points use linear interpolation.
inline Stroke interpolate_spline(const Stroke& stroke, double max_gap) {
  preprocess_detail::check_gap(max_gap);
  const auto& pts = stroke.points;
  if (pts.size() < 3) return interpolate_linear(stroke, max_gap);
  Stroke out;
  out.points.push_back(pts.front());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point p0 = pts[i == 0 ? 0 : i - 1];
    const Point p1 = pts[i];
    const Point p2 = pts[i + 1];
    const Point p3 = pts[std::min(i + 2, pts.size() - 1)];
    if (preprocess_detail::distance(p1, p2) > max_gap) {
      const auto span = preprocess_detail::make_span(p0, p1, p2, p3);
      preprocess_detail::subdivide(span, 0.0, p1, 1.0, p2, max_gap, out.points, 0);
    }
    out.points.push_back(p2);
  }
  return out;
}

inline Stroke interpolate(const Stroke& stroke, InterpolationMethod method, double max_gap) {
  switch (method) {
    case InterpolationMethod::None: return stroke;
    case InterpolationMethod::Linear: return interpolate_linear(stroke, max_gap);
    case InterpolationMethod::Spline: return interpolate_spline(stroke, max_gap);
  }
  return stroke;
}

/// Aspect-preserving map of the bounding box into [0, size-1]^2. The longer
/// side spans the full range; the shorter one is centered.
inline InkCharacter normalize_box(const InkCharacter& ink, int size) {
  const BoundingBox box = bounding_box(ink);
  const double span = static_cast<double>(size - 1);
  const double extent = std::max(box.width(), box.height());
  const double scale = extent > 0.0 ? span / extent : 0.0;
  const double off_x = (span - box.width() * scale) / 2.0;
  const double off_y = (span - box.height() * scale) / 2.0;

  InkCharacter out = ink;
  for (auto& stroke : out.strokes) {
    for (auto& p : stroke.points) {
      p.x = std::clamp((p.x - box.min_x) * scale + off_x, 0.0, span);
      p.y = std::clamp((p.y - box.min_y) * scale + off_y, 0.0, span);
    }
  }
  return out;
}

/// Removes each interior point with probability `drop_prob`. Stroke
/// endpoints always survive, so the stroke count never changes.
inline InkCharacter augment_drop_points(const InkCharacter& ink, double drop_prob, std::uint64_t seed) {
  validate(ink);
  if (drop_prob <= 0.0) return ink;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  InkCharacter out = ink;
  for (auto& stroke : out.strokes) {
    const auto& src = stroke.points;
    if (src.size() <= 2) continue;
    std::vector<Point> kept;
    kept.reserve(src.size());
    kept.push_back(src.front());
    for (std::size_t i = 1; i + 1 < src.size(); ++i) {
      if (coin(rng) >= drop_prob) kept.push_back(src[i]);
    }
    kept.push_back(src.back());
    stroke.points = std::move(kept);
  }
  return out;
}

/// Box normalization followed by per-stroke interpolation on the target grid.
inline InkCharacter prepare_for_grid(const InkCharacter& ink, int size, const PreprocessConfig& config) {
  InkCharacter out = normalize_box(ink, size);
  if (config.method == InterpolationMethod::None) return out;
  const double span = static_cast<double>(size - 1);
  for (auto& stroke : out.strokes) {
    stroke = interpolate(stroke, config.method, config.max_gap);
    // spline overshoot can leave the grid
    for (auto& p : stroke.points) {
      p.x = std::clamp(p.x, 0.0, span);
      p.y = std::clamp(p.y, 0.0, span);
    }
  }
  return out;
}

}  // namespace ssdcnn
