#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ssdcnn/error.hpp"

namespace ssdcnn::nn {

/// Max-shifted softmax.
template <class T>
std::vector<T> softmax(std::span<const T> scores) {
  if (scores.empty()) throw Error(ErrorCode::ShapeMismatch, "softmax of an empty score vector");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(ErrorCode::NonFiniteScore, "score " + std::to_string(i), i);
  }
  const T peak = *std::max_element(scores.begin(), scores.end());
  std::vector<T> p(scores.size());
  T sum = T(0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = std::exp(scores[i] - peak);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

template <class T>
T nll_loss(std::span<const T> probabilities, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probabilities.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "label " + std::to_string(label) + " outside score vector",
                static_cast<std::size_t>(label));
  }
  return -std::log(probabilities[static_cast<std::size_t>(label)]);
}

/// Negative log-likelihood of `label` under softmax(scores), computed as
/// logsumexp - score; `grad` receives softmax(scores) - onehot(label).
template <class T>
T softmax_nll(std::span<const T> scores, int label, std::vector<T>& grad) {
  grad = softmax(scores);
  if (label < 0 || static_cast<std::size_t>(label) >= scores.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "label " + std::to_string(label) + " outside score vector",
                static_cast<std::size_t>(label));
  }
  const T peak = *std::max_element(scores.begin(), scores.end());
  T sum = T(0);
  for (auto s : scores) sum += std::exp(s - peak);
  const T loss = std::log(sum) + peak - scores[static_cast<std::size_t>(label)];
  grad[static_cast<std::size_t>(label)] -= T(1);
  return loss;
}

}  // namespace ssdcnn::nn
