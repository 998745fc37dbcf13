#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/netspec.hpp"

namespace ssdcnn::nn {

/// Dense row-major tensor.
template <class T>
struct Tensor {
  Shape shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0)) : shape(std::move(s)), data(shape_size(shape), fill) {}
  Tensor(Shape s, std::vector<T> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != shape_size(shape)) {
      throw Error(ErrorCode::ShapeMismatch,
                  "tensor of shape " + shape_string(shape) + " given " + std::to_string(data.size()) + " values");
    }
  }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }
  std::span<T> span() { return data; }
  std::span<const T> span() const { return data; }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  void zero() { std::fill(data.begin(), data.end(), T(0)); }

  template <class U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

inline void require_shape(const Shape& got, const Shape& want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(what) + ": expected " + shape_string(want) + ", got " + shape_string(got));
  }
}

}  // namespace ssdcnn::nn
