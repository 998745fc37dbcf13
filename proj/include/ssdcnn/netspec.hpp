#pragma once

// Architecture strings such as
//   28*32*32 -100C3ReLU -MP2 -100C2ReLU -MP2 -N100Sig -N3755
// describe a linear chain: input dims, then one '-' prefixed layer each.
//   -<f>C<k>ReLU   convolution, f filters of k x k, stride 1, no padding
//   -MP<p>         non-overlapping p x p max pooling
//   -N<u>Sig       fully connected, sigmoid
//   -N<u>          fully connected, linear, no bias (the class scores)

#include <cctype>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "ssdcnn/error.hpp"

namespace ssdcnn {

using Shape = std::vector<int>;

inline std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) n *= static_cast<std::size_t>(d);
  return n;
}

inline std::string shape_string(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

enum class LayerKind { Conv, MaxPool, Full };
enum class Activation { ReLU, Sigmoid, Linear };

struct LayerDesc {
  LayerKind kind = LayerKind::Full;
  int size = 1;    // filters for Conv, units for Full, unused for MaxPool
  int window = 1;  // Conv kernel side or pooling window side
  Activation activation = Activation::Linear;

  static LayerDesc conv(int filters, int window) { return {LayerKind::Conv, filters, window, Activation::ReLU}; }
  static LayerDesc max_pool(int window) { return {LayerKind::MaxPool, 0, window, Activation::Linear}; }
  static LayerDesc full(int units, Activation act) { return {LayerKind::Full, units, 1, act}; }

  friend bool operator==(const LayerDesc&, const LayerDesc&) = default;
};

struct NetSpec {
  Shape input_shape;
  std::vector<LayerDesc> layers;

  friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

namespace netspec_detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NetSpec run() {
    skip_ws();
    if (pos_ == text_.size()) throw Error(ErrorCode::EmptySpec, "architecture string is empty");
    NetSpec spec;
    spec.input_shape.push_back(integer());
    for (;;) {
      skip_ws();
      if (!accept("*")) break;
      skip_ws();
      spec.input_shape.push_back(integer());
    }
    if (spec.input_shape.size() > 3) fail("at most 3 input dimensions");
    for (;;) {
      skip_ws();
      if (pos_ == text_.size()) break;
      expect("-", "'-' starting a layer");
      skip_ws();
      spec.layers.push_back(layer());
    }
    return spec;
  }

 private:
  LayerDesc layer() {
    if (accept("MP")) return LayerDesc::max_pool(integer());
    if (accept("N")) {
      const int units = integer();
      if (accept("Sig")) return LayerDesc::full(units, Activation::Sigmoid);
      return LayerDesc::full(units, Activation::Linear);
    }
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const int filters = integer();
      expect("C", "'C'");
      const int window = integer();
      expect("ReLU", "'ReLU'");
      return LayerDesc::conv(filters, window);
    }
    fail("'MP', 'N' or a filter count");
  }

  int integer() {
    const std::size_t start = pos_;
    long long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > std::numeric_limits<int>::max()) {
        pos_ = start;
        fail("an integer that fits in 32 bits");
      }
      ++pos_;
    }
    if (pos_ == start) fail("an integer");
    if (v < 1) {
      pos_ = start;
      fail("a positive integer");
    }
    return static_cast<int>(v);
  }

  bool accept(std::string_view tok) {
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok, std::string_view what) {
    if (!accept(tok)) fail(what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(std::string_view expected) const {
    const std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
    throw Error(ErrorCode::SyntaxError,
                "at position " + std::to_string(pos_) + ": expected " + std::string(expected) + ", found " + found,
                pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace netspec_detail

inline NetSpec parse_netspec(std::string_view text) { return netspec_detail::Parser(text).run(); }

inline std::string render(const NetSpec& spec) {
  std::string out;
  for (std::size_t i = 0; i < spec.input_shape.size(); ++i) {
    if (i) out += '*';
    out += std::to_string(spec.input_shape[i]);
  }
  for (const auto& l : spec.layers) {
    out += " -";
    switch (l.kind) {
      case LayerKind::Conv: out += std::to_string(l.size) + "C" + std::to_string(l.window) + "ReLU"; break;
      case LayerKind::MaxPool: out += "MP" + std::to_string(l.window); break;
      case LayerKind::Full:
        out += "N" + std::to_string(l.size);
        if (l.activation == Activation::Sigmoid) out += "Sig";
        break;
    }
  }
  return out;
}

/// Shape after each layer; element 0 is the input shape with a 2-D input
/// promoted to one channel. Throws ShapeError naming the failing layer.
inline std::vector<Shape> infer_shapes(const NetSpec& spec) {
  if (spec.input_shape.empty()) throw Error(ErrorCode::EmptySpec, "no input shape");
  for (int d : spec.input_shape) {
    if (d < 1) throw Error(ErrorCode::ShapeError, "input dimensions must be positive", 0);
  }
  Shape cur = spec.input_shape;
  if (cur.size() == 2) cur.insert(cur.begin(), 1);
  std::vector<Shape> chain{cur};
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::ShapeError, "layer " + std::to_string(i) + " on " + shape_string(cur) + ": " + why, i);
    };
    if (l.size < 0 || l.window < 1 || (l.kind != LayerKind::MaxPool && l.size < 1)) fail("non-positive size");
    switch (l.kind) {
      case LayerKind::Conv:
        if (cur.size() != 3) fail("convolution needs a (channels, height, width) input");
        if (l.window > cur[1] || l.window > cur[2]) fail("window exceeds input");
        cur = Shape{l.size, cur[1] - l.window + 1, cur[2] - l.window + 1};
        break;
      case LayerKind::MaxPool:
        if (cur.size() != 3) fail("pooling needs a (channels, height, width) input");
        if (l.window > cur[1] || l.window > cur[2]) fail("window exceeds input");
        if (cur[1] % l.window != 0 || cur[2] % l.window != 0) fail("pooling window does not divide input");
        cur = Shape{cur[0], cur[1] / l.window, cur[2] / l.window};
        break;
      case LayerKind::Full:
        cur = Shape{l.size};
        break;
    }
    chain.push_back(cur);
  }
  return chain;
}

}  // namespace ssdcnn
