#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ssdcnn/netspec.hpp"
#include "ssdcnn/nn/tensor.hpp"

namespace ssdcnn::nn {

template <class T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <class T>
struct SparseEntry {
  int channel;
  int y;
  int x;
  T value;
};

/// Per-call state a convolution keeps for its backward pass.
template <class T>
struct ConvCache {
  std::vector<std::uint8_t> gate;         // per output position: window has a nonzero input
  std::vector<SparseEntry<T>> nonzeros;   // nonzero inputs in (channel, y, x) order
  std::vector<T> weight_t;                // weights as (C, k, k, F)
  std::vector<T> acc;                     // (P, F) pre-activations, reused for deltas
  std::vector<T> dweight_t;
  std::vector<std::uint8_t> live_rows;
};

namespace layers_detail {

inline int conv_out(int n, int k) { return n - k + 1; }

template <class T>
void transpose_weights(const Tensor<T>& weight, std::vector<T>& out) {
  const int F = weight.shape[0];
  const std::size_t r = weight.size() / static_cast<std::size_t>(F);
  out.resize(weight.size());
  for (int f = 0; f < F; ++f) {
    const T* src = weight.ptr() + r * f;
    for (std::size_t i = 0; i < r; ++i) out[i * F + f] = src[i];
  }
}

}  // namespace layers_detail

/// Valid convolution with stride 1, ReLU, and a window gate: an output is
/// forced to 0 when every input in its receptive window is 0.
///
/// Accumulation is scattered from nonzero inputs, which on stroke maps is a
/// small fraction of the input. For every output the sum still runs over
/// (channel, ki, kj) in ascending order, then adds the bias.
template <class T>
void conv_forward(const Tensor<T>& in, const Tensor<T>& weight, const Tensor<T>& bias, Tensor<T>& out,
                  ConvCache<T>& cache) {
  if (in.shape.size() != 3 || weight.shape.size() != 4) {
    throw Error(ErrorCode::ShapeMismatch, "convolution expects (C,H,W) input and (F,C,k,k) weights");
  }
  const int C = in.shape[0], H = in.shape[1], W = in.shape[2];
  const int F = weight.shape[0], k = weight.shape[2];
  require_shape(weight.shape, Shape{F, C, k, k}, "conv weight");
  require_shape(bias.shape, Shape{F}, "conv bias");
  if (k > H || k > W || weight.shape[3] != k) throw Error(ErrorCode::ShapeMismatch, "conv window exceeds input");
  const int OH = layers_detail::conv_out(H, k), OW = layers_detail::conv_out(W, k);
  const std::size_t P = static_cast<std::size_t>(OH) * OW;

  layers_detail::transpose_weights(weight, cache.weight_t);
  cache.acc.assign(P * F, T(0));
  cache.gate.assign(P, 0);
  cache.nonzeros.clear();

  const T* src = in.ptr();
  for (int c = 0; c < C; ++c) {
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const T v = src[(static_cast<std::size_t>(c) * H + y) * W + x];
        if (v == T(0)) continue;
        cache.nonzeros.push_back({c, y, x, v});
        for (int ki = std::max(0, y - OH + 1); ki <= std::min(k - 1, y); ++ki) {
          const int oy = y - ki;
          for (int kj = std::max(0, x - OW + 1); kj <= std::min(k - 1, x); ++kj) {
            const std::size_t p = static_cast<std::size_t>(oy) * OW + (x - kj);
            cache.gate[p] = 1;
            T* __restrict a = cache.acc.data() + p * F;
            const T* __restrict w = cache.weight_t.data() + ((static_cast<std::size_t>(c) * k + ki) * k + kj) * F;
#pragma omp simd
            for (int f = 0; f < F; ++f) a[f] += v * w[f];
          }
        }
      }
    }
  }

  out.shape = Shape{F, OH, OW};
  out.data.assign(P * F, T(0));
  const T* b = bias.ptr();
  for (std::size_t p = 0; p < P; ++p) {
    if (!cache.gate[p]) continue;
    const T* a = cache.acc.data() + p * F;
    for (int f = 0; f < F; ++f) out.data[static_cast<std::size_t>(f) * P + p] = std::max(T(0), a[f] + b[f]);
  }
}

/// Accumulates weight and bias gradients into `dweight`/`dbias`. When `din`
/// is given it receives the input gradient at the nonzero inputs; zero
/// inputs get 0 there, which is exact whenever the input came from a ReLU
/// or pooling of ReLU outputs (their local derivative is 0 at 0). The gate
/// is a constant mask.
template <class T>
void conv_backward(const Shape& in_shape, const Tensor<T>& weight, const Tensor<T>& out, ConvCache<T>& cache,
                   const Tensor<T>& dout, Tensor<T>& dweight, Tensor<T>& dbias, Tensor<T>* din) {
  const int C = in_shape[0], H = in_shape[1], W = in_shape[2];
  const int F = weight.shape[0], k = weight.shape[2];
  const int OH = out.shape[1], OW = out.shape[2];
  const std::size_t P = static_cast<std::size_t>(OH) * OW;
  require_shape(dout.shape, out.shape, "conv output gradient");

  auto& delta = cache.acc;  // (P, F)
  delta.assign(P * F, T(0));
  cache.live_rows.assign(P, 0);
  for (std::size_t p = 0; p < P; ++p) {
    if (!cache.gate[p]) continue;
    T* d = delta.data() + p * F;
    bool live = false;
    for (int f = 0; f < F; ++f) {
      const std::size_t o = static_cast<std::size_t>(f) * P + p;
      if (out.data[o] > T(0)) {
        d[f] = dout.data[o];
        live = live || d[f] != T(0);
      }
    }
    cache.live_rows[p] = live;
  }

  T* db = dbias.ptr();
  for (std::size_t p = 0; p < P; ++p) {
    if (!cache.live_rows[p]) continue;
    const T* d = delta.data() + p * F;
    for (int f = 0; f < F; ++f) db[f] += d[f];
  }

  cache.dweight_t.assign(weight.size(), T(0));
  if (din) {
    din->shape = in_shape;
    din->data.assign(shape_size(in_shape), T(0));
  }
  for (const auto& e : cache.nonzeros) {
    T grad_in = T(0);
    for (int ki = std::max(0, e.y - OH + 1); ki <= std::min(k - 1, e.y); ++ki) {
      const int oy = e.y - ki;
      for (int kj = std::max(0, e.x - OW + 1); kj <= std::min(k - 1, e.x); ++kj) {
        const std::size_t p = static_cast<std::size_t>(oy) * OW + (e.x - kj);
        if (!cache.live_rows[p]) continue;
        const std::size_t row = ((static_cast<std::size_t>(e.channel) * k + ki) * k + kj) * F;
        const T* __restrict d = delta.data() + p * F;
        T* __restrict dw = cache.dweight_t.data() + row;
        const T v = e.value;
#pragma omp simd
        for (int f = 0; f < F; ++f) dw[f] += v * d[f];
        if (din) {
          const T* __restrict w = cache.weight_t.data() + row;
          T s = T(0);
#pragma omp simd reduction(+ : s)
          for (int f = 0; f < F; ++f) s += w[f] * d[f];
          grad_in += s;
        }
      }
    }
    if (din) din->data[(static_cast<std::size_t>(e.channel) * H + e.y) * W + e.x] = grad_in;
  }

  const std::size_t R = weight.size() / static_cast<std::size_t>(F);
  T* dw = dweight.ptr();
  for (int f = 0; f < F; ++f) {
    for (std::size_t r = 0; r < R; ++r) dw[static_cast<std::size_t>(f) * R + r] += cache.dweight_t[r * F + f];
  }
  (void)C;
}

/// Non-overlapping max pooling. `argmax` receives the flat input index of
/// each output's maximum; ties keep the first in row-major order.
template <class T>
void maxpool_forward(const Tensor<T>& in, int window, Tensor<T>& out, std::vector<int>& argmax) {
  if (in.shape.size() != 3) throw Error(ErrorCode::ShapeMismatch, "pooling expects a (C,H,W) input");
  const int C = in.shape[0], H = in.shape[1], W = in.shape[2];
  if (window < 1 || H % window != 0 || W % window != 0) {
    throw Error(ErrorCode::ShapeMismatch, "pooling window " + std::to_string(window) + " does not divide " +
                                              shape_string(in.shape));
  }
  const int OH = H / window, OW = W / window;
  out.shape = Shape{C, OH, OW};
  out.data.resize(static_cast<std::size_t>(C) * OH * OW);
  argmax.resize(out.data.size());
  std::size_t o = 0;
  for (int c = 0; c < C; ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * H * W;
    for (int oy = 0; oy < OH; ++oy) {
      for (int ox = 0; ox < OW; ++ox, ++o) {
        std::size_t best = base + static_cast<std::size_t>(oy * window) * W + ox * window;
        for (int dy = 0; dy < window; ++dy) {
          for (int dx = 0; dx < window; ++dx) {
            const std::size_t i = base + static_cast<std::size_t>(oy * window + dy) * W + ox * window + dx;
            if (in.data[i] > in.data[best]) best = i;
          }
        }
        out.data[o] = in.data[best];
        argmax[o] = static_cast<int>(best);
      }
    }
  }
}

template <class T>
void maxpool_backward(const Shape& in_shape, const std::vector<int>& argmax, const Tensor<T>& dout, Tensor<T>& din) {
  din.shape = in_shape;
  din.data.assign(shape_size(in_shape), T(0));
  for (std::size_t o = 0; o < argmax.size(); ++o) din.data[static_cast<std::size_t>(argmax[o])] += dout.data[o];
}

/// out = act(W x + b); `bias` may be empty (no bias term).
template <class T>
void full_forward(std::span<const T> x, const Tensor<T>& weight, const Tensor<T>* bias, Activation act,
                  Tensor<T>& out) {
  if (weight.shape.size() != 2) throw Error(ErrorCode::ShapeMismatch, "full layer weight must be 2-D");
  const int M = weight.shape[0], N = weight.shape[1];
  if (x.size() != static_cast<std::size_t>(N)) {
    throw Error(ErrorCode::ShapeMismatch,
                "full layer expects " + std::to_string(N) + " inputs, got " + std::to_string(x.size()));
  }
  if (bias) require_shape(bias->shape, Shape{M}, "full bias");
  out.shape = Shape{M};
  out.data.resize(static_cast<std::size_t>(M));
  const T* __restrict xs = x.data();
  for (int m = 0; m < M; ++m) {
    const T* __restrict w = weight.ptr() + static_cast<std::size_t>(m) * N;
    T s = T(0);
#pragma omp simd reduction(+ : s)
    for (int n = 0; n < N; ++n) s += w[n] * xs[n];
    if (bias) s += bias->data[static_cast<std::size_t>(m)];
    out.data[static_cast<std::size_t>(m)] = act == Activation::Sigmoid ? sigmoid(s) : s;
  }
}

template <class T>
void full_backward(std::span<const T> x, const Tensor<T>& weight, const Tensor<T>& out, Activation act,
                   const Tensor<T>& dout, Tensor<T>& dweight, Tensor<T>* dbias, std::vector<T>* dx) {
  const int M = weight.shape[0], N = weight.shape[1];
  if (dx) dx->assign(static_cast<std::size_t>(N), T(0));
  const T* __restrict xs = x.data();
  for (int m = 0; m < M; ++m) {
    T d = dout.data[static_cast<std::size_t>(m)];
    if (act == Activation::Sigmoid) {
      const T y = out.data[static_cast<std::size_t>(m)];
      d *= y * (T(1) - y);
    }
    if (d == T(0)) continue;
    if (dbias) dbias->data[static_cast<std::size_t>(m)] += d;
    T* __restrict dw = dweight.ptr() + static_cast<std::size_t>(m) * N;
#pragma omp simd
    for (int n = 0; n < N; ++n) dw[n] += d * xs[n];
    if (dx) {
      const T* __restrict w = weight.ptr() + static_cast<std::size_t>(m) * N;
      T* __restrict g = dx->data();
#pragma omp simd
      for (int n = 0; n < N; ++n) g[n] += d * w[n];
    }
  }
}

}  // namespace ssdcnn::nn
