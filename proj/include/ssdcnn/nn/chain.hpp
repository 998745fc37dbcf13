#pragma once

#include <string>
#include <vector>

#include "ssdcnn/netspec.hpp"
#include "ssdcnn/nn/layers.hpp"
#include "ssdcnn/nn/params.hpp"
#include "ssdcnn/nn/tensor.hpp"

namespace ssdcnn::nn {

struct LayerPlan {
  LayerDesc desc;
  Shape in;
  Shape out;
  int weight = -1;
  int bias = -1;
};

/// One linear chain of layers built from an architecture string, with
/// indices into a shared parameter set.
struct ChainPlan {
  std::string name;
  NetSpec spec;
  std::vector<LayerPlan> layers;

  const Shape& input_shape() const { return layers.empty() ? spec.input_shape : layers.front().in; }
  Shape output_shape() const { return layers.empty() ? spec.input_shape : layers.back().out; }
  std::size_t output_size() const { return shape_size(output_shape()); }
};

template <class T>
ChainPlan make_chain(std::string name, NetSpec spec, ParamSet<T>& params) {
  const auto shapes = infer_shapes(spec);
  bool seen_full = false;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (spec.layers[i].kind == LayerKind::Full) {
      seen_full = true;
    } else if (seen_full) {
      throw Error(ErrorCode::ShapeError, "layer " + std::to_string(i) + " follows a fully connected layer", i);
    }
  }
  const auto idx = register_params(spec, name + ".", params);
  ChainPlan plan{std::move(name), spec, {}};
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    plan.layers.push_back(LayerPlan{spec.layers[i], shapes[i], shapes[i + 1], idx[i].first, idx[i].second});
  }
  return plan;
}

/// Activations and per-layer backward state of one forward pass.
template <class T>
struct ChainTrace {
  std::vector<Tensor<T>> acts;  // acts[0] = input, acts[i + 1] = output of layer i
  std::vector<ConvCache<T>> conv;
  std::vector<std::vector<int>> argmax;
  // backward scratch
  Tensor<T> grad_a, grad_b;
  std::vector<T> grad_vec;
};

template <class T>
const Tensor<T>& forward_chain(const ChainPlan& plan, const ParamSet<T>& params, Tensor<T> input,
                               ChainTrace<T>& trace) {
  const std::size_t L = plan.layers.size();
  if (input.size() != shape_size(plan.input_shape())) {
    throw Error(ErrorCode::ShapeMismatch, plan.name + ": input " + shape_string(input.shape) + " does not fit " +
                                              shape_string(plan.input_shape()));
  }
  input.shape = plan.input_shape();
  trace.acts.resize(L + 1);
  trace.conv.resize(L);
  trace.argmax.resize(L);
  trace.acts[0] = std::move(input);
  for (std::size_t i = 0; i < L; ++i) {
    const auto& layer = plan.layers[i];
    const auto& x = trace.acts[i];
    auto& y = trace.acts[i + 1];
    switch (layer.desc.kind) {
      case LayerKind::Conv:
        conv_forward(x, params[static_cast<std::size_t>(layer.weight)].value,
                     params[static_cast<std::size_t>(layer.bias)].value, y, trace.conv[i]);
        break;
      case LayerKind::MaxPool: maxpool_forward(x, layer.desc.window, y, trace.argmax[i]); break;
      case LayerKind::Full:
        full_forward<T>(x.span(), params[static_cast<std::size_t>(layer.weight)].value,
                        layer.bias >= 0 ? &params[static_cast<std::size_t>(layer.bias)].value : nullptr,
                        layer.desc.activation, y);
        break;
    }
  }
  return trace.acts.back();
}

/// Back-propagates `dout` through the chain, adding parameter gradients for
/// groups in `active` into `grads`. Stops below the lowest layer that still
/// needs a gradient unless `din` is requested.
template <class T>
void backward_chain(const ChainPlan& plan, const ParamSet<T>& params, ChainTrace<T>& trace, const Tensor<T>& dout,
                    ParamSet<T>& grads, GroupMask active, Tensor<T>* din = nullptr) {
  const std::size_t L = plan.layers.size();
  std::size_t lowest = L;
  for (std::size_t i = 0; i < L; ++i) {
    const auto& layer = plan.layers[i];
    if (layer.weight >= 0 && active.has(params[static_cast<std::size_t>(layer.weight)].group)) {
      lowest = i;
      break;
    }
  }
  if (din) lowest = 0;
  if (lowest == L) return;

  Tensor<T>* cur = &trace.grad_a;
  Tensor<T>* next = &trace.grad_b;
  *cur = dout;
  cur->shape = plan.layers.back().out;
  for (std::size_t ii = L; ii-- > lowest;) {
    const auto& layer = plan.layers[ii];
    const bool want_in = ii > lowest || din != nullptr;
    const bool want_params = layer.weight >= 0 && active.has(params[static_cast<std::size_t>(layer.weight)].group);
    switch (layer.desc.kind) {
      case LayerKind::Conv: {
        Tensor<T> scratch_w, scratch_b;
        auto& dw = want_params ? grads[static_cast<std::size_t>(layer.weight)].value : scratch_w;
        auto& db = want_params ? grads[static_cast<std::size_t>(layer.bias)].value : scratch_b;
        if (!want_params) {
          scratch_w = Tensor<T>(params[static_cast<std::size_t>(layer.weight)].value.shape);
          scratch_b = Tensor<T>(params[static_cast<std::size_t>(layer.bias)].value.shape);
        }
        conv_backward(layer.in, params[static_cast<std::size_t>(layer.weight)].value, trace.acts[ii + 1],
                      trace.conv[ii], *cur, dw, db, want_in ? next : nullptr);
        break;
      }
      case LayerKind::MaxPool:
        if (want_in) maxpool_backward(layer.in, trace.argmax[ii], *cur, *next);
        break;
      case LayerKind::Full: {
        Tensor<T> scratch_w;
        if (!want_params) scratch_w = Tensor<T>(params[static_cast<std::size_t>(layer.weight)].value.shape);
        auto& dw = want_params ? grads[static_cast<std::size_t>(layer.weight)].value : scratch_w;
        Tensor<T>* db = want_params && layer.bias >= 0 ? &grads[static_cast<std::size_t>(layer.bias)].value : nullptr;
        Tensor<T> scratch_b;
        if (!want_params && layer.bias >= 0) {
          scratch_b = Tensor<T>(params[static_cast<std::size_t>(layer.bias)].value.shape);
          db = &scratch_b;
        }
        full_backward<T>(trace.acts[ii].span(), params[static_cast<std::size_t>(layer.weight)].value,
                         trace.acts[ii + 1], layer.desc.activation, *cur, dw, db,
                         want_in ? &trace.grad_vec : nullptr);
        if (want_in) {
          next->shape = layer.in;
          next->data = trace.grad_vec;
        }
        break;
      }
    }
    if (want_in) std::swap(cur, next);
  }
  if (din) *din = *cur;
}

}  // namespace ssdcnn::nn
