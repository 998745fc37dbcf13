#pragma once

// Fixtures and independent oracles shared by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ssdcnn/ssdcnn.hpp"

namespace ssdcnn::testing {

using PointList = std::initializer_list<std::pair<double, double>>;

inline InkCharacter make_ink(std::initializer_list<PointList> strokes) {
  InkCharacter ink;
  for (const auto& s : strokes) {
    Stroke st;
    for (const auto& [x, y] : s) st.points.push_back(Point{x, y});
    ink.strokes.push_back(std::move(st));
  }
  return ink;
}

inline InkCharacter random_ink(std::mt19937_64& rng, int max_strokes = 6, int max_points = 12, double extent = 500.0) {
  std::uniform_int_distribution<int> ns(1, max_strokes), np(1, max_points);
  std::uniform_real_distribution<double> coord(-extent, extent);
  InkCharacter ink;
  const int n = ns(rng);
  for (int s = 0; s < n; ++s) {
    Stroke st;
    const int m = np(rng);
    for (int p = 0; p < m; ++p) st.points.push_back(Point{coord(rng), coord(rng)});
    ink.strokes.push_back(std::move(st));
  }
  return ink;
}

/// Byte-level POT record writer.
class PotBuilder {
 public:
  PotBuilder& record(std::uint8_t tag0, std::uint8_t tag1, const std::vector<std::vector<std::pair<int, int>>>& strokes,
                     int declared_strokes = -1, int size_adjust = 0, bool terminate = true) {
    std::vector<std::uint8_t> body;
    auto i16 = [&](int v) {
      const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
      body.push_back(static_cast<std::uint8_t>(u & 0xFF));
      body.push_back(static_cast<std::uint8_t>(u >> 8));
    };
    for (const auto& s : strokes) {
      for (const auto& [x, y] : s) {
        i16(x);
        i16(y);
      }
      i16(-1);
      i16(0);
    }
    if (terminate) {
      i16(-1);
      i16(-1);
    }
    const int size = static_cast<int>(8 + body.size()) + size_adjust;
    const int n = declared_strokes < 0 ? static_cast<int>(strokes.size()) : declared_strokes;
    push16(size);
    bytes.push_back(tag0);
    bytes.push_back(tag1);
    bytes.push_back(0);
    bytes.push_back(0);
    push16(n);
    bytes.insert(bytes.end(), body.begin(), body.end());
    return *this;
  }

  std::vector<std::uint8_t> bytes;

 private:
  void push16(int v) {
    bytes.push_back(static_cast<std::uint8_t>(v & 0xFF));
    bytes.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  }
};

/// Textbook gated valid convolution: six nested loops, summing over
/// (channel, row, column) in ascending order and adding the bias last.
template <class T>
nn::Tensor<T> naive_conv(const nn::Tensor<T>& in, const nn::Tensor<T>& w, const nn::Tensor<T>& b) {
  const int C = in.shape[0], H = in.shape[1], W = in.shape[2];
  const int F = w.shape[0], k = w.shape[2];
  const int OH = H - k + 1, OW = W - k + 1;
  nn::Tensor<T> out(Shape{F, OH, OW});
  for (int f = 0; f < F; ++f) {
    for (int i = 0; i < OH; ++i) {
      for (int j = 0; j < OW; ++j) {
        T s = T(0);
        bool any = false;
        for (int c = 0; c < C; ++c) {
          for (int ki = 0; ki < k; ++ki) {
            for (int kj = 0; kj < k; ++kj) {
              const T x = in.data[(static_cast<std::size_t>(c) * H + i + ki) * W + j + kj];
              any = any || x != T(0);
              s += w.data[((static_cast<std::size_t>(f) * C + c) * k + ki) * k + kj] * x;
            }
          }
        }
        const T z = s + b.data[static_cast<std::size_t>(f)];
        out.data[(static_cast<std::size_t>(f) * OH + i) * OW + j] = any && z > T(0) ? z : T(0);
      }
    }
  }
  return out;
}

/// Toy architectures with the same layer kinds and wiring as the full
/// variants: 4x8x8 stacks, 16-value direction vectors, 5 classes.
inline std::vector<std::string> toy_architecture(ModelKind kind) {
  switch (kind) {
    case ModelKind::IMDCNN: return {"8*8 -3C3ReLU -MP2 -4C2ReLU -MP2 -N6Sig -N5"};
    case ModelKind::SSDCNN8: return {"4*8*8 -3C3ReLU -MP2 -4C2ReLU -MP2 -N6Sig -N5"};
    case ModelKind::NN8: return {"32 -N8Sig -N6Sig -N5"};
    case ModelKind::SSDCNN: return {"4*8*8 -3C3ReLU -MP2 -4C2ReLU -MP2 -N6Sig", "32 -N16Sig", "22 -N8Sig -N6Sig -N5"};
  }
  return {};
}

/// Continuous input for gradient checks. The last stack channel and one
/// corner block are zero so that closed gates occur.
template <class T>
SampleFeatures toy_input(const Model<T>& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  SampleFeatures x;
  const Shape maps = maps_input_shape(m);
  if (!maps.empty()) {
    x.maps_shape = maps;
    const int C = maps[0], H = maps[1], W = maps[2];
    x.maps.assign(shape_size(maps), 0.0f);
    for (int c = 0; c < C; ++c) {
      if (C > 1 && c == C - 1) continue;
      for (int i = 0; i < H; ++i) {
        for (int j = 0; j < W; ++j) {
          if (i < 3 && j < 3) continue;
          x.maps[(static_cast<std::size_t>(c) * H + i) * W + j] = static_cast<float>(u(rng));
        }
      }
    }
  }
  x.dir.resize(dir_input_size(m));
  for (auto& v : x.dir) v = static_cast<float>(u(rng));
  return x;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;
};

/// Relative error of each analytic gradient against a central difference,
/// |a - n| / max(|a|, |n|, floor).
inline GradCheck check_gradients(Model<double>& m, const std::vector<SampleFeatures>& xs, const std::vector<int>& ys,
                                 double step = 1e-3, double floor = 1e-6) {
  nn::ParamSet<double> grads = m.params.zeros_like();
  ModelTrace<double> trace;
  for (std::size_t i = 0; i < xs.size(); ++i) sample_gradient(m, xs[i], ys[i], trace, grads);
  GradCheck out;
  for (std::size_t p = 0; p < m.params.size(); ++p) {
    auto& data = m.params[p].value.data;
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double saved = data[j];
      data[j] = saved + step;
      const double up = dataset_loss(m, xs, ys);
      data[j] = saved - step;
      const double down = dataset_loss(m, xs, ys);
      data[j] = saved;
      const double numeric = (up - down) / (2 * step);
      const double analytic = grads[p].value.data[j];
      const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
      ++out.checked;
      if (rel > out.max_rel_error) {
        out.max_rel_error = rel;
        out.worst = m.params[p].name + "[" + std::to_string(j) + "] analytic " + std::to_string(analytic) +
                    " numeric " + std::to_string(numeric);
      }
    }
  }
  return out;
}

/// Gradient check of one chain in isolation under L = sum(r * out),
/// including the gradient with respect to the chain input.
inline GradCheck check_chain_gradients(const std::string& arch, std::uint64_t seed, double step = 1e-3,
                                       double floor = 1e-6) {
  nn::ParamSet<double> params;
  const auto plan = nn::make_chain("c", parse_netspec(arch), params);
  nn::init_weights(params, seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> r(-1.0, 1.0);
  nn::Tensor<double> x(plan.input_shape());
  // distinct, well separated values keep pooling away from ties under the step
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x.data[i] = (i % 7 == 0) ? 0.0 : 0.1 + 0.9 * static_cast<double>(order[i] + 1) / static_cast<double>(x.size());
  }
  // give every bias a nonzero value so its gradient path is exercised
  for (auto& p : params.items) {
    if (p.value.shape.size() == 1) {
      for (auto& v : p.value.data) v = 0.1 * r(rng);
    }
  }
  nn::Tensor<double> coeff(plan.output_shape());
  for (auto& v : coeff.data) v = r(rng);

  auto loss = [&](const nn::Tensor<double>& input) {
    nn::ChainTrace<double> t;
    const auto& out = nn::forward_chain(plan, params, input, t);
    double s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) s += coeff.data[i] * out.data[i];
    return s;
  };
  nn::ChainTrace<double> trace;
  nn::forward_chain(plan, params, x, trace);
  auto grads = params.zeros_like();
  nn::Tensor<double> din;
  nn::backward_chain(plan, params, trace, coeff, grads, nn::GroupMask::all(), &din);

  GradCheck out;
  auto compare = [&](double analytic, double numeric, const std::string& what) {
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
    ++out.checked;
    if (rel > out.max_rel_error) {
      out.max_rel_error = rel;
      out.worst = what + " analytic " + std::to_string(analytic) + " numeric " + std::to_string(numeric);
    }
  };
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& data = params[p].value.data;
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double saved = data[j];
      data[j] = saved + step;
      const double up = loss(x);
      data[j] = saved - step;
      const double down = loss(x);
      data[j] = saved;
      compare(grads[p].value.data[j], (up - down) / (2 * step), params[p].name + "[" + std::to_string(j) + "]");
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.data[i] == 0.0) continue;  // input gradients are defined on the support only
    nn::Tensor<double> xp = x, xm = x;
    xp.data[i] += step;
    xm.data[i] -= step;
    compare(din.data[i], (loss(xp) - loss(xm)) / (2 * step), "input[" + std::to_string(i) + "]");
  }
  return out;
}

/// Five visually distinct characters for memorization runs.
inline Dataset five_characters() {
  Dataset d;
  for (int c = 0; c < 5; ++c) d.alphabet.add("m" + std::to_string(c));
  d.samples.push_back(make_ink({{{0, 0}, {100, 0}}, {{50, -50}, {50, 80}}}));
  d.samples.push_back(make_ink({{{0, 0}, {0, 100}}, {{0, 100}, {100, 100}}, {{100, 0}, {100, 100}}}));
  d.samples.push_back(make_ink({{{0, 0}, {100, 100}}, {{100, 0}, {0, 100}}}));
  d.samples.push_back(make_ink({{{0, 50}, {50, 0}, {100, 50}, {50, 100}, {0, 50}}}));
  d.samples.push_back(make_ink({{{0, 0}, {100, 0}}, {{0, 50}, {100, 50}}, {{0, 100}, {100, 100}}, {{50, 0}, {50, 100}}}));
  for (int c = 0; c < 5; ++c) d.samples[static_cast<std::size_t>(c)].label = c;
  return d;
}

}  // namespace ssdcnn::testing
