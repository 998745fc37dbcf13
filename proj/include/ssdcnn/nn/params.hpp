#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/netspec.hpp"
#include "ssdcnn/nn/tensor.hpp"

namespace ssdcnn::nn {

/// theta1 holds the convolution stack, theta2 everything trained in both
/// phases (fusion projections, perceptron and output layer).
enum class ParamGroup : std::uint8_t { Theta1 = 1, Theta2 = 2 };

struct GroupMask {
  bool theta1 = true;
  bool theta2 = true;

  bool has(ParamGroup g) const { return g == ParamGroup::Theta1 ? theta1 : theta2; }
  static GroupMask all() { return {true, true}; }
  static GroupMask only_theta2() { return {false, true}; }
};

template <class T>
struct Param {
  std::string name;
  ParamGroup group = ParamGroup::Theta2;
  Tensor<T> value;

  friend bool operator==(const Param&, const Param&) = default;
};

template <class T>
struct ParamSet {
  std::vector<Param<T>> items;

  std::size_t size() const { return items.size(); }
  Param<T>& operator[](std::size_t i) { return items[i]; }
  const Param<T>& operator[](std::size_t i) const { return items[i]; }

  int add(std::string name, ParamGroup group, Shape shape) {
    items.push_back(Param<T>{std::move(name), group, Tensor<T>(std::move(shape))});
    return static_cast<int>(items.size() - 1);
  }

  const Param<T>* find(const std::string& name) const {
    for (const auto& p : items) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : items) n += p.value.size();
    return n;
  }

  ParamSet zeros_like() const {
    ParamSet out;
    for (const auto& p : items) out.items.push_back(Param<T>{p.name, p.group, Tensor<T>(p.value.shape)});
    return out;
  }

  void zero() {
    for (auto& p : items) p.value.zero();
  }

  /// this += other, tensor by tensor in order.
  void accumulate(const ParamSet& other) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      auto& dst = items[i].value.data;
      const auto& src = other.items[i].value.data;
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
  }

  template <class U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (const auto& p : items) out.items.push_back(Param<U>{p.name, p.group, p.value.template cast<U>()});
    return out;
  }

  friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

/// FNV-1a over the raw bytes of every tensor in `group`.
template <class T>
std::uint64_t checksum(const ParamSet<T>& params, ParamGroup group) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : params.items) {
    if (p.group != group) continue;
    const auto* bytes = reinterpret_cast<const unsigned char*>(p.value.ptr());
    for (std::size_t i = 0; i < p.value.size() * sizeof(T); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Registers the tensors of every layer of `spec` under `prefix`. Conv
/// layers go to theta1, fully connected layers to theta2. Returns, per
/// layer, the weight and bias indices (-1 when absent).
template <class T>
std::vector<std::pair<int, int>> register_params(const NetSpec& spec, const std::string& prefix, ParamSet<T>& out) {
  const auto shapes = infer_shapes(spec);
  std::vector<std::pair<int, int>> idx;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    const Shape& in = shapes[i];
    const std::string base = prefix + std::to_string(i);
    switch (l.kind) {
      case LayerKind::Conv:
        idx.emplace_back(out.add(base + ".weight", ParamGroup::Theta1, Shape{l.size, in[0], l.window, l.window}),
                         out.add(base + ".bias", ParamGroup::Theta1, Shape{l.size}));
        break;
      case LayerKind::MaxPool: idx.emplace_back(-1, -1); break;
      case LayerKind::Full: {
        const int n = static_cast<int>(shape_size(in));
        const int w = out.add(base + ".weight", ParamGroup::Theta2, Shape{l.size, n});
        const int b = l.activation == Activation::Linear ? -1 : out.add(base + ".bias", ParamGroup::Theta2, Shape{l.size});
        idx.emplace_back(w, b);
        break;
      }
    }
  }
  return idx;
}

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
template <class T>
void init_weights(ParamSet<T>& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& p : params.items) {
    const auto& s = p.value.shape;
    if (s.size() == 1) {
      p.value.zero();
      continue;
    }
    double fan_in = 0, fan_out = 0;
    if (s.size() == 4) {
      const double area = static_cast<double>(s[2]) * s[3];
      fan_in = s[1] * area;
      fan_out = s[0] * area;
    } else {
      fan_in = s[1];
      fan_out = s[0];
    }
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : p.value.data) v = static_cast<T>(dist(rng));
  }
}

/// Fresh parameters for a single architecture string.
template <class T>
ParamSet<T> init_params(const NetSpec& spec, std::uint64_t seed) {
  ParamSet<T> params;
  register_params(spec, "", params);
  init_weights(params, seed);
  return params;
}

}  // namespace ssdcnn::nn
