#pragma once

// Desk-scale synthetic characters. Every class is a fixed template of 2-6
// line/arc strokes in a canonical order; samples add per-stroke affine
// perturbation, arc-length resampling and per-point Gaussian jitter.
//
// Classes (0, 1) and, given at least four classes, (2, 3) are
// order-confusable: the second template holds exactly the strokes of the
// first in a different writing order, so both render to the same static
// image.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/ink.hpp"
#include "ssdcnn/nn/params.hpp"

namespace ssdcnn {

struct SynthConfig {
  double device_scale = 1000.0;     // template unit square in device units
  double point_jitter = 0.006;      // per-point sigma, template units
  double stroke_shift = 0.03;
  double stroke_scale = 0.08;
  double stroke_rotation = 0.08;    // radians
  double step_min = 0.025;          // resampling step range, template units
  double step_max = 0.06;
};

class SynthGenerator {
 public:
  SynthGenerator(int class_count, std::uint64_t seed, SynthConfig config = {})
      : config_(config), seed_(seed) {
    if (class_count < 2) throw Error(ErrorCode::EmptyDataset, "synthetic data needs at least two classes");
    std::mt19937_64 rng(nn::mix_seed(seed, 0xC1A55));
    for (int c = 0; c < class_count; ++c) {
      const bool second_of_pair = (c == 1) || (c == 3 && class_count >= 4);
      if (second_of_pair) {
        templates_.push_back(reorder(templates_.back()));
      } else {
        // the first class of a pair needs at least three strokes to reorder
        const bool first_of_pair = c == 0 || (c == 2 && class_count >= 4);
        templates_.push_back(random_template(rng, first_of_pair ? 3 : 2));
      }
    }
    for (int c = 0; c < class_count; ++c) alphabet_.add("c" + std::to_string(c));
  }

  int class_count() const { return static_cast<int>(templates_.size()); }
  const LabelAlphabet& alphabet() const { return alphabet_; }

  /// Pairs of classes sharing the same strokes in different order.
  std::vector<std::pair<int, int>> confusable_pairs() const {
    std::vector<std::pair<int, int>> out{{0, 1}};
    if (class_count() >= 4) out.emplace_back(2, 3);
    return out;
  }

  /// Jitter-free template ink in device units.
  InkCharacter template_ink(int class_id) const {
    InkCharacter ink;
    for (const auto& s : templates_.at(static_cast<std::size_t>(class_id))) {
      Stroke stroke;
      for (const auto& p : s) stroke.points.push_back(Point{p.x * config_.device_scale, p.y * config_.device_scale});
      ink.strokes.push_back(std::move(stroke));
    }
    ink.label = class_id;
    return ink;
  }

  InkCharacter sample(int class_id, std::uint64_t sample_seed) const {
    std::mt19937_64 rng(nn::mix_seed(seed_, sample_seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const auto& tmpl = templates_.at(static_cast<std::size_t>(class_id));

    const double step = config_.step_min + (config_.step_max - config_.step_min) * (0.5 + 0.5 * uni(rng));
    const double global_scale = config_.device_scale * (1.0 + 0.15 * uni(rng));
    const double offset_x = 500.0 * (1.0 + uni(rng));
    const double offset_y = 500.0 * (1.0 + uni(rng));

    InkCharacter ink;
    ink.label = class_id;
    ink.writer = "synth";
    for (const auto& s : tmpl) {
      Point c{0, 0};
      for (const auto& p : s) {
        c.x += p.x;
        c.y += p.y;
      }
      c.x /= static_cast<double>(s.size());
      c.y /= static_cast<double>(s.size());
      const double rot = config_.stroke_rotation * uni(rng);
      const double sc = 1.0 + config_.stroke_scale * uni(rng);
      const double dx = config_.stroke_shift * uni(rng);
      const double dy = config_.stroke_shift * uni(rng);
      std::vector<Point> moved;
      for (const auto& p : s) {
        const double rx = (p.x - c.x) * sc, ry = (p.y - c.y) * sc;
        moved.push_back(Point{c.x + dx + rx * std::cos(rot) - ry * std::sin(rot),
                              c.y + dy + rx * std::sin(rot) + ry * std::cos(rot)});
      }
      Stroke stroke;
      for (const auto& p : resample(moved, step)) {
        stroke.points.push_back(Point{offset_x + (p.x + config_.point_jitter * gauss(rng)) * global_scale,
                                      offset_y + (p.y + config_.point_jitter * gauss(rng)) * global_scale});
      }
      ink.strokes.push_back(std::move(stroke));
    }
    return ink;
  }

  /// Samples interleaved by class: index i holds class i % class_count.
  Dataset make_split(int per_class, std::uint64_t salt) const {
    Dataset data;
    data.alphabet = alphabet_;
    for (int i = 0; i < per_class; ++i) {
      for (int c = 0; c < class_count(); ++c) {
        const std::uint64_t id = (salt << 40) ^ (static_cast<std::uint64_t>(i) * 1315423911ULL + c);
        data.samples.push_back(sample(c, id));
      }
    }
    return data;
  }

 private:
  using Polyline = std::vector<Point>;

  static Polyline resample(const Polyline& pts, double step) {
    if (pts.size() < 2) return pts;
    std::vector<double> acc{0.0};
    for (std::size_t i = 1; i < pts.size(); ++i) {
      acc.push_back(acc.back() + std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y));
    }
    const double total = acc.back();
    const int n = std::max(2, static_cast<int>(std::lround(total / step)) + 1);
    Polyline out;
    std::size_t seg = 1;
    for (int k = 0; k < n; ++k) {
      const double target = total * k / (n - 1);
      while (seg + 1 < pts.size() && acc[seg] < target) ++seg;
      const double len = acc[seg] - acc[seg - 1];
      const double t = len > 0 ? (target - acc[seg - 1]) / len : 0.0;
      out.push_back(Point{pts[seg - 1].x + (pts[seg].x - pts[seg - 1].x) * t,
                          pts[seg - 1].y + (pts[seg].y - pts[seg - 1].y) * t});
    }
    return out;
  }

  static Polyline random_stroke(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Polyline pts;
    if (u(rng) < 0.6) {
      // straight line with a minimum length
      Point a, b;
      do {
        a = Point{0.1 + 0.8 * u(rng), 0.1 + 0.8 * u(rng)};
        b = Point{0.1 + 0.8 * u(rng), 0.1 + 0.8 * u(rng)};
      } while (std::hypot(b.x - a.x, b.y - a.y) < 0.35);
      for (int k = 0; k <= 8; ++k) {
        const double t = k / 8.0;
        pts.push_back(Point{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
      }
    } else {
      const double r = 0.15 + 0.2 * u(rng);
      const Point c{r + 0.1 + (0.8 - 2 * r) * u(rng), r + 0.1 + (0.8 - 2 * r) * u(rng)};
      const double start = 2.0 * std::numbers::pi * u(rng);
      const double sweep = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.6 + 0.9 * u(rng)) * std::numbers::pi;
      for (int k = 0; k <= 16; ++k) {
        const double a = start + sweep * k / 16.0;
        pts.push_back(Point{c.x + r * std::cos(a), c.y + r * std::sin(a)});
      }
    }
    return pts;
  }

  static std::vector<Polyline> random_template(std::mt19937_64& rng, int min_strokes) {
    std::uniform_int_distribution<int> count(min_strokes, 6);
    std::vector<Polyline> strokes(static_cast<std::size_t>(count(rng)));
    for (auto& s : strokes) s = random_stroke(rng);
    return strokes;
  }

  // Same strokes, rotated writing order: last stroke first.
  static std::vector<Polyline> reorder(const std::vector<Polyline>& strokes) {
    std::vector<Polyline> out;
    out.push_back(strokes.back());
    for (std::size_t i = 0; i + 1 < strokes.size(); ++i) out.push_back(strokes[i]);
    return out;
  }

  SynthConfig config_;
  std::uint64_t seed_;
  std::vector<std::vector<Polyline>> templates_;
  LabelAlphabet alphabet_;
};

/// Train and test splits with exact per-class counts.
inline std::pair<Dataset, Dataset> synth_dataset(int class_count, int per_class_train, int per_class_test,
                                                 std::uint64_t seed) {
  SynthGenerator gen(class_count, seed);
  return {gen.make_split(per_class_train, 1), gen.make_split(per_class_test, 2)};
}

}  // namespace ssdcnn
