#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <vector>

#include "ssdcnn/eightdir.hpp"
#include "ssdcnn/ink.hpp"
#include "ssdcnn/model.hpp"
#include "ssdcnn/preprocess.hpp"
#include "ssdcnn/stroke_maps.hpp"

namespace ssdcnn {

/// Everything that determines the network input computed from raw ink.
struct FeatureConfig {
  PreprocessConfig preprocess;
  int stack_depth = kDefaultStackDepth;
  int map_size = kDefaultMapSize;
  EightDirConfig eightdir;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// Which inputs a variant consumes.
struct FeatureNeeds {
  bool stack = false;
  bool image = false;
  bool dir = false;

  static FeatureNeeds of(ModelKind kind) {
    return {uses_stack(kind), kind == ModelKind::IMDCNN, uses_dir(kind)};
  }
};

/// Matches a feature config to a model's input shapes.
template <class T>
FeatureConfig feature_config_for(const Model<T>& m, FeatureConfig base = {}) {
  const Shape maps = maps_input_shape(m);
  if (!maps.empty()) {
    base.map_size = maps[1];
    if (uses_stack(m.kind)) base.stack_depth = maps[0];
  }
  // 8 directions on a samples x samples grid
  const std::size_t dir = dir_input_size(m);
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dir) / 8.0)));
  if (dir > 0 && static_cast<std::size_t>(8 * side * side) == dir) base.eightdir.samples = side;
  return base;
}

inline SampleFeatures featurize(const InkCharacter& ink, FeatureNeeds needs, const FeatureConfig& config) {
  validate(ink);
  SampleFeatures out;
  if (needs.stack || needs.image) {
    const InkCharacter grid = prepare_for_grid(ink, config.map_size, config.preprocess);
    if (needs.stack) {
      const StrokeMapStack stack = build_stack(grid, config.stack_depth, config.map_size);
      out.maps_shape = Shape{stack.depth, stack.size, stack.size};
      out.maps.assign(stack.data.begin(), stack.data.end());
    } else {
      const BinaryMap image = to_static_image(grid, config.map_size);
      out.maps_shape = Shape{1, image.size, image.size};
      out.maps.assign(image.cells.begin(), image.cells.end());
    }
  }
  if (needs.dir) {
    const auto dir = extract(ink, config.eightdir);
    out.dir.assign(dir.begin(), dir.end());
  }
  return out;
}

inline SampleFeatures featurize(const InkCharacter& ink, ModelKind kind, const FeatureConfig& config) {
  return featurize(ink, FeatureNeeds::of(kind), config);
}

/// FNV-1a over the fields of a feature config and the requested inputs.
inline std::uint64_t feature_key(const FeatureConfig& c, FeatureNeeds needs) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  auto mix_value = [&](auto v) { mix(&v, sizeof(v)); };
  mix_value(c.preprocess.max_gap);
  mix_value(static_cast<int>(c.preprocess.method));
  mix_value(c.stack_depth);
  mix_value(c.map_size);
  mix_value(c.eightdir.grid);
  mix_value(c.eightdir.samples);
  mix_value(c.eightdir.sigma);
  mix_value(c.eightdir.truncate);
  mix_value(c.eightdir.virtual_weight);
  mix_value(static_cast<int>(needs.stack) | static_cast<int>(needs.image) << 1 | static_cast<int>(needs.dir) << 2);
  return h;
}

/// Features of a whole dataset keyed by (dataset identity, config hash).
/// Augmentation settings are not part of the key: cached features are
/// always computed from the unaugmented ink.
class FeatureCache {
 public:
  const std::vector<SampleFeatures>& get(const Dataset& data, FeatureNeeds needs, const FeatureConfig& config) {
    const Key key{&data, data.samples.size(), feature_key(config, needs)};
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      ++hits_;
      return it->second;
    }
    std::vector<SampleFeatures> feats;
    feats.reserve(data.samples.size());
    for (const auto& ink : data.samples) feats.push_back(featurize(ink, needs, config));
    return entries_.emplace(key, std::move(feats)).first->second;
  }

  std::size_t hits() const { return hits_; }
  std::size_t size() const { return entries_.size(); }

 private:
  struct Key {
    const Dataset* data;
    std::size_t count;
    std::uint64_t hash;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, std::vector<SampleFeatures>> entries_;
  std::size_t hits_ = 0;
  std::mutex mutex_;
};

inline std::vector<SampleFeatures> featurize_dataset(const Dataset& data, ModelKind kind, const FeatureConfig& config) {
  std::vector<SampleFeatures> out;
  out.reserve(data.samples.size());
  for (const auto& ink : data.samples) out.push_back(featurize(ink, kind, config));
  return out;
}

}  // namespace ssdcnn
