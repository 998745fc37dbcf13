#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ssdcnn/error.hpp"

namespace ssdcnn {

/// Pen position in device units; x grows rightward, y grows downward.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Points sampled between one pen-down and the following pen-up.
struct Stroke {
  std::vector<Point> points;

  friend bool operator==(const Stroke&, const Stroke&) = default;
};

/// One handwritten character: strokes in writing order.
struct InkCharacter {
  std::vector<Stroke> strokes;
  std::optional<int> label;
  std::optional<std::string> writer;

  std::size_t point_count() const {
    std::size_t n = 0;
    for (const auto& s : strokes) n += s.points.size();
    return n;
  }

  friend bool operator==(const InkCharacter&, const InkCharacter&) = default;
};

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Ordered class names with a reverse lookup. Entries are unique.
class LabelAlphabet {
 public:
  LabelAlphabet() = default;

  explicit LabelAlphabet(std::vector<std::string> entries) {
    for (auto& e : entries) add(std::move(e));
  }

  /// Appends `name` and returns its index; an existing name keeps its index.
  int add(std::string name) {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    const int id = static_cast<int>(entries_.size());
    index_.emplace(name, id);
    entries_.push_back(std::move(name));
    return id;
  }

  std::optional<int> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& at(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= entries_.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "class id " + std::to_string(id) + " outside alphabet",
                  static_cast<std::size_t>(id));
    }
    return entries_[static_cast<std::size_t>(id)];
  }

  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const std::vector<std::string>& entries() const { return entries_; }

  friend bool operator==(const LabelAlphabet& a, const LabelAlphabet& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, int> index_;
};

struct Dataset {
  std::vector<InkCharacter> samples;
  LabelAlphabet alphabet;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Returns `ink` unchanged if it has at least one stroke, no empty stroke and
/// only finite coordinates; otherwise throws naming the first offender.
inline const InkCharacter& validate(const InkCharacter& ink) {
  if (ink.strokes.empty()) throw Error(ErrorCode::EmptyCharacter, "character has no strokes");
  for (std::size_t s = 0; s < ink.strokes.size(); ++s) {
    const auto& pts = ink.strokes[s].points;
    if (pts.empty()) {
      throw Error(ErrorCode::EmptyStroke, "stroke " + std::to_string(s) + " has no points", s);
    }
    for (std::size_t p = 0; p < pts.size(); ++p) {
      if (!std::isfinite(pts[p].x) || !std::isfinite(pts[p].y)) {
        throw Error(ErrorCode::NonFiniteCoordinate,
                    "stroke " + std::to_string(s) + " point " + std::to_string(p) + " is not finite", s);
      }
    }
  }
  return ink;
}

/// Checks every sample and that labels index into the alphabet.
inline const Dataset& validate(const Dataset& data) {
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    validate(data.samples[i]);
    const auto& label = data.samples[i].label;
    if (label && (*label < 0 || *label >= data.alphabet.size())) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "sample " + std::to_string(i) + " label " + std::to_string(*label) + " outside alphabet", i);
    }
  }
  return data;
}

inline BoundingBox bounding_box(const InkCharacter& ink) {
  validate(ink);
  const Point first = ink.strokes.front().points.front();
  BoundingBox box{first.x, first.y, first.x, first.y};
  for (const auto& s : ink.strokes) {
    for (const auto& p : s.points) {
      box.min_x = std::min(box.min_x, p.x);
      box.min_y = std::min(box.min_y, p.y);
      box.max_x = std::max(box.max_x, p.x);
      box.max_y = std::max(box.max_y, p.y);
    }
  }
  return box;
}

}  // namespace ssdcnn
