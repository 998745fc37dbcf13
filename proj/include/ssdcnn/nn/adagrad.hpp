#pragma once

#include <algorithm>
#include <cmath>

#include "ssdcnn/error.hpp"
#include "ssdcnn/nn/params.hpp"

namespace ssdcnn::nn {

inline constexpr double kDefaultEta = 0.01;
inline constexpr double kDefaultFudge = 1e-6;

/// Per-parameter sum of squared gradients.
template <class T>
struct GradState {
  ParamSet<T> historical_grad;
  T eta = T(kDefaultEta);
  T fudge_factor = T(kDefaultFudge);

  GradState() = default;
  GradState(const ParamSet<T>& like, T eta_, T fudge_)
      : historical_grad(like.zeros_like()), eta(eta_), fudge_factor(fudge_) {}

  void reset() { historical_grad.zero(); }
};

/// hist += g^2; param -= eta * g / (fudge + sqrt(hist)) for every tensor whose
/// group is in `active`. Returns the largest absolute update applied.
template <class T>
T adagrad_step(ParamSet<T>& params, const ParamSet<T>& grads, GradState<T>& state,
               GroupMask active = GroupMask::all()) {
  if (params.size() != grads.size() || params.size() != state.historical_grad.size()) {
    throw Error(ErrorCode::ShapeMismatch, "parameter, gradient and history sets differ in length");
  }
  T max_update = T(0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (!active.has(p.group)) continue;
    const auto& g = grads[i].value;
    auto& h = state.historical_grad[i].value;
    require_shape(g.shape, p.value.shape, "adagrad gradient");
    require_shape(h.shape, p.value.shape, "adagrad history");
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const T gj = g.data[j];
      if (gj == T(0)) continue;
      h.data[j] += gj * gj;
      const T update = state.eta * gj / (state.fudge_factor + std::sqrt(h.data[j]));
      p.value.data[j] -= update;
      max_update = std::max(max_update, std::abs(update));
    }
  }
  return max_update;
}

}  // namespace ssdcnn::nn
