#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/netspec.hpp"
#include "ssdcnn/nn/chain.hpp"
#include "ssdcnn/nn/loss.hpp"
#include "ssdcnn/nn/params.hpp"

namespace ssdcnn {

/// IMDCNN: static image into a conv net. SSDCNN8: stroke-map stack into a
/// conv net. NN8: eight-directional vector into a perceptron. SSDCNN: the
/// stack representation fused with the eight-directional projection.
enum class ModelKind : std::uint8_t { IMDCNN = 0, SSDCNN8 = 1, NN8 = 2, SSDCNN = 3 };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::IMDCNN: return "imdcnn";
    case ModelKind::SSDCNN8: return "ssdcnn8";
    case ModelKind::NN8: return "nn8";
    case ModelKind::SSDCNN: return "ssdcnn";
  }
  return "?";
}

inline ModelKind model_kind_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  std::erase(lower, '-');
  if (lower == "imdcnn") return ModelKind::IMDCNN;
  if (lower == "ssdcnn8") return ModelKind::SSDCNN8;
  if (lower == "nn8") return ModelKind::NN8;
  if (lower == "ssdcnn") return ModelKind::SSDCNN;
  throw Error(ErrorCode::SyntaxError, "unknown model variant '" + std::string(s) + "'");
}

inline constexpr ModelKind kAllKinds[] = {ModelKind::IMDCNN, ModelKind::SSDCNN8, ModelKind::NN8, ModelKind::SSDCNN};

inline bool uses_maps(ModelKind k) { return k != ModelKind::NN8; }
inline bool uses_stack(ModelKind k) { return k == ModelKind::SSDCNN8 || k == ModelKind::SSDCNN; }
inline bool uses_dir(ModelKind k) { return k == ModelKind::NN8 || k == ModelKind::SSDCNN; }

/// Architecture strings per variant with the output width set to `classes`.
/// SSDCNN returns {conv stack, eight-dir projection, fusion head}.
inline std::vector<std::string> default_architecture(ModelKind kind, int classes) {
  const std::string out = " -N" + std::to_string(classes);
  const std::string convs = " -100C3ReLU -MP2 -100C2ReLU -MP2 -100C2ReLU -MP2 -200C2ReLU -MP2";
  switch (kind) {
    case ModelKind::IMDCNN: return {"32*32" + convs + " -N100Sig" + out};
    case ModelKind::SSDCNN8: return {"28*32*32" + convs + " -N100Sig" + out};
    case ModelKind::NN8: return {"512 -N300Sig -N200Sig" + out};
    case ModelKind::SSDCNN: return {"28*32*32" + convs + " -N200Sig", "512 -N512Sig", "712 -N300Sig -N200Sig" + out};
  }
  return {};
}

/// Network input for one sample. `maps` is the stroke-map stack or the
/// one-channel static image; `dir` the eight-directional vector.
struct SampleFeatures {
  Shape maps_shape;
  std::vector<float> maps;
  std::vector<float> dir;

  friend bool operator==(const SampleFeatures&, const SampleFeatures&) = default;
};

template <class T>
struct Model {
  ModelKind kind = ModelKind::NN8;
  int classes = 0;
  std::vector<nn::ChainPlan> chains;  // SSDCNN: {dcnn, dir, head}; others: {net}
  nn::ParamSet<T> params;

  const nn::ChainPlan& output_chain() const { return chains.back(); }

  std::vector<std::string> architecture() const {
    std::vector<std::string> out;
    for (const auto& c : chains) out.push_back(render(c.spec));
    return out;
  }

  template <class U>
  Model<U> cast() const {
    return Model<U>{kind, classes, chains, params.template cast<U>()};
  }
};

namespace model_detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ShapeError, what);
}

}  // namespace model_detail

/// Builds the chains of a variant from architecture strings, without
/// initializing weights.
template <class T>
Model<T> assemble_model(ModelKind kind, const std::vector<std::string>& arch) {
  Model<T> m;
  m.kind = kind;
  const std::size_t want = kind == ModelKind::SSDCNN ? 3 : 1;
  model_detail::require(arch.size() == want, std::string(to_string(kind)) + " takes " + std::to_string(want) +
                                                  " architecture strings");
  static constexpr const char* kSsdNames[] = {"dcnn", "dir", "head"};
  for (std::size_t i = 0; i < arch.size(); ++i) {
    m.chains.push_back(nn::make_chain(want == 3 ? kSsdNames[i] : "net", parse_netspec(arch[i]), m.params));
  }
  const auto& out_chain = m.output_chain();
  model_detail::require(!out_chain.layers.empty() && out_chain.layers.back().desc.kind == LayerKind::Full &&
                            out_chain.layers.back().desc.activation == Activation::Linear,
                        "the last layer must be a linear -N<classes> layer");
  m.classes = out_chain.layers.back().desc.size;
  model_detail::require(m.classes >= 2, "at least two classes are required");

  const auto& first = m.chains.front();
  switch (kind) {
    case ModelKind::IMDCNN:
      model_detail::require(first.input_shape().size() == 3 && first.input_shape()[0] == 1,
                            "imdcnn input must be a single H*W image");
      break;
    case ModelKind::SSDCNN8:
    case ModelKind::SSDCNN:
      model_detail::require(first.input_shape().size() == 3, "stroke-map input must be S*H*W");
      model_detail::require(first.input_shape()[1] == first.input_shape()[2], "stroke maps must be square");
      break;
    case ModelKind::NN8: model_detail::require(first.input_shape().size() == 1, "nn8 input must be a vector"); break;
  }
  if (kind == ModelKind::SSDCNN) {
    const auto& dcnn = m.chains[0];
    const auto& dir = m.chains[1];
    const auto& head = m.chains[2];
    model_detail::require(dcnn.output_shape().size() == 1, "dcnn chain must end in a fully connected layer");
    model_detail::require(dir.input_shape().size() == 1, "dir chain input must be a vector");
    model_detail::require(shape_size(head.input_shape()) == dcnn.output_size() + dir.output_size(),
                          "head input " + shape_string(head.input_shape()) + " must equal " +
                              std::to_string(dir.output_size()) + " + " + std::to_string(dcnn.output_size()));
  }
  return m;
}

template <class T>
Model<T> build_model(ModelKind kind, const std::vector<std::string>& arch, std::uint64_t seed) {
  Model<T> m = assemble_model<T>(kind, arch);
  nn::init_weights(m.params, seed);
  return m;
}

template <class T>
Model<T> build_model(ModelKind kind, int classes, std::uint64_t seed) {
  if (classes < 2) throw Error(ErrorCode::ShapeError, "at least two classes are required");
  return build_model<T>(kind, default_architecture(kind, classes), seed);
}

/// Input shape a variant expects for its stroke maps (empty for NN8) and its
/// eight-directional vector length (0 when unused).
template <class T>
Shape maps_input_shape(const Model<T>& m) {
  return uses_maps(m.kind) ? m.chains.front().input_shape() : Shape{};
}

template <class T>
std::size_t dir_input_size(const Model<T>& m) {
  switch (m.kind) {
    case ModelKind::NN8: return shape_size(m.chains[0].input_shape());
    case ModelKind::SSDCNN: return shape_size(m.chains[1].input_shape());
    default: return 0;
  }
}

template <class T>
struct ModelTrace {
  std::vector<nn::ChainTrace<T>> chains;
  std::vector<T> fused;
  nn::Tensor<T> dlogits;
  nn::Tensor<T> dfused;
};

namespace model_detail {

template <class T>
nn::Tensor<T> to_tensor(const std::vector<float>& v) {
  nn::Tensor<T> t;
  t.shape = Shape{static_cast<int>(v.size())};
  t.data.assign(v.begin(), v.end());
  return t;
}

}  // namespace model_detail

/// Class scores O for one sample.
template <class T>
const nn::Tensor<T>& forward_logits(const Model<T>& m, const SampleFeatures& x, ModelTrace<T>& trace) {
  trace.chains.resize(m.chains.size());
  const auto maps = [&] {
    if (x.maps.size() != shape_size(m.chains.front().input_shape())) {
      throw Error(ErrorCode::ShapeMismatch, "stroke-map input has " + std::to_string(x.maps.size()) +
                                                " values, model expects " +
                                                shape_string(m.chains.front().input_shape()));
    }
    return model_detail::to_tensor<T>(x.maps);
  };
  switch (m.kind) {
    case ModelKind::IMDCNN:
    case ModelKind::SSDCNN8: return nn::forward_chain(m.chains[0], m.params, maps(), trace.chains[0]);
    case ModelKind::NN8: return nn::forward_chain(m.chains[0], m.params, model_detail::to_tensor<T>(x.dir), trace.chains[0]);
    case ModelKind::SSDCNN: {
      const auto& rep = nn::forward_chain(m.chains[0], m.params, maps(), trace.chains[0]);
      const auto& dir = nn::forward_chain(m.chains[1], m.params, model_detail::to_tensor<T>(x.dir), trace.chains[1]);
      // h = [dir projection; representation projection]
      nn::Tensor<T> fused(Shape{static_cast<int>(dir.size() + rep.size())});
      std::copy(dir.data.begin(), dir.data.end(), fused.data.begin());
      std::copy(rep.data.begin(), rep.data.end(), fused.data.begin() + static_cast<std::ptrdiff_t>(dir.size()));
      return nn::forward_chain(m.chains[2], m.params, std::move(fused), trace.chains[2]);
    }
  }
  throw Error(ErrorCode::ShapeMismatch, "unknown model kind");
}

/// Forward and backward for one labeled sample; adds the gradient of
/// -log P(label) into `grads` for the groups in `active` and returns the loss.
template <class T>
T sample_gradient(const Model<T>& m, const SampleFeatures& x, int label, ModelTrace<T>& trace, nn::ParamSet<T>& grads,
                  nn::GroupMask active = nn::GroupMask::all()) {
  const auto& logits = forward_logits(m, x, trace);
  std::vector<T> g;
  const T loss = nn::softmax_nll<T>(logits.span(), label, g);
  trace.dlogits = nn::Tensor<T>(logits.shape, std::move(g));
  if (m.kind != ModelKind::SSDCNN) {
    nn::backward_chain(m.chains[0], m.params, trace.chains[0], trace.dlogits, grads, active);
    return loss;
  }
  nn::backward_chain(m.chains[2], m.params, trace.chains[2], trace.dlogits, grads, active, &trace.dfused);
  const std::size_t n_dir = m.chains[1].output_size();
  nn::Tensor<T> ddir(m.chains[1].output_shape(),
                     std::vector<T>(trace.dfused.data.begin(), trace.dfused.data.begin() + static_cast<std::ptrdiff_t>(n_dir)));
  nn::Tensor<T> drep(m.chains[0].output_shape(),
                     std::vector<T>(trace.dfused.data.begin() + static_cast<std::ptrdiff_t>(n_dir), trace.dfused.data.end()));
  nn::backward_chain(m.chains[1], m.params, trace.chains[1], ddir, grads, active);
  nn::backward_chain(m.chains[0], m.params, trace.chains[0], drep, grads, active);
  return loss;
}

/// Summed negative log-likelihood over samples, without gradients.
template <class T>
T dataset_loss(const Model<T>& m, const std::vector<SampleFeatures>& xs, const std::vector<int>& labels) {
  ModelTrace<T> trace;
  T total = T(0);
  std::vector<T> g;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& logits = forward_logits(m, xs[i], trace);
    total += nn::softmax_nll<T>(logits.span(), labels[i], g);
  }
  return total;
}

struct Candidate {
  int class_id = 0;
  double probability = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Classes by descending probability; equal probabilities keep ascending
/// class order.
using Prediction = std::vector<Candidate>;

template <class T>
Prediction rank(const std::vector<T>& probs) {
  std::vector<int> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
  });
  Prediction out;
  out.reserve(order.size());
  for (int c : order) out.push_back(Candidate{c, static_cast<double>(probs[static_cast<std::size_t>(c)])});
  return out;
}

template <class T>
std::vector<T> predict_proba(const Model<T>& m, const SampleFeatures& x, ModelTrace<T>& trace) {
  return nn::softmax<T>(forward_logits(m, x, trace).span());
}

template <class T>
Prediction forward_variant(const Model<T>& m, const SampleFeatures& x) {
  ModelTrace<T> trace;
  return rank(predict_proba(m, x, trace));
}

}  // namespace ssdcnn
