#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/features.hpp"
#include "ssdcnn/model.hpp"
#include "ssdcnn/parallel.hpp"

namespace ssdcnn {

/// Features paired with labels, optionally backed by the raw ink they were
/// computed from (needed for per-batch augmentation).
struct LabeledSet {
  std::vector<SampleFeatures> x;
  std::vector<int> y;
  const Dataset* raw = nullptr;
  FeatureConfig features;
  FeatureNeeds needs;

  std::size_t size() const { return x.size(); }
};

inline std::vector<int> labels_of(const Dataset& data) {
  std::vector<int> out;
  out.reserve(data.samples.size());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& label = data.samples[i].label;
    if (!label) throw Error(ErrorCode::UnlabeledSample, "sample " + std::to_string(i) + " has no label", i);
    out.push_back(*label);
  }
  return out;
}

/// `raw` must outlive the returned set.
inline LabeledSet make_labeled(const Dataset& raw, ModelKind kind, const FeatureConfig& config,
                               FeatureCache* cache = nullptr) {
  LabeledSet out;
  out.y = labels_of(raw);
  out.needs = FeatureNeeds::of(kind);
  out.x = cache ? cache->get(raw, out.needs, config) : featurize_dataset(raw, kind, config);
  out.raw = &raw;
  out.features = config;
  return out;
}

struct EvalReport {
  std::size_t total = 0;                  // N_T
  std::map<int, std::size_t> correct;     // k -> N_C(k)
  std::map<int, double> precision;        // k -> P@k

  double at(int k) const {
    auto it = precision.find(k);
    if (it == precision.end()) throw Error(ErrorCode::IndexOutOfRange, "P@" + std::to_string(k) + " was not evaluated");
    return it->second;
  }
};

/// Rank of the label in a prediction (0 = top-1).
inline std::size_t label_rank(const Prediction& p, int label) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].class_id == label) return i;
  }
  return p.size();
}

inline EvalReport report_from_ranks(const std::vector<std::size_t>& ranks, const std::vector<int>& ks) {
  EvalReport r;
  r.total = ranks.size();
  for (int k : ks) {
    if (k < 1) throw Error(ErrorCode::IndexOutOfRange, "k must be at least 1");
    std::size_t n = 0;
    for (auto rk : ranks) n += rk < static_cast<std::size_t>(k) ? 1 : 0;
    r.correct[k] = n;
    r.precision[k] = r.total ? static_cast<double>(n) / static_cast<double>(r.total) : 0.0;
  }
  return r;
}

/// Top-k predictions for every sample, split over `threads` workers.
template <class T>
std::vector<Prediction> predict_all(const Model<T>& m, const std::vector<SampleFeatures>& xs, int threads = 1) {
  std::vector<Prediction> out(xs.size());
  parallel_chunks(xs.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    ModelTrace<T> trace;
    for (std::size_t i = begin; i < end; ++i) out[i] = rank(predict_proba(m, xs[i], trace));
  });
  return out;
}

template <class T>
EvalReport evaluate(const Model<T>& m, const LabeledSet& data, const std::vector<int>& ks, int threads = 1) {
  const auto preds = predict_all(m, data.x, threads);
  std::vector<std::size_t> ranks(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) ranks[i] = label_rank(preds[i], data.y[i]);
  return report_from_ranks(ranks, ks);
}

template <class T>
EvalReport evaluate(const Model<T>& m, const Dataset& data, const FeatureConfig& config, const std::vector<int>& ks,
                    int threads = 1) {
  return evaluate(m, make_labeled(data, m.kind, config), ks, threads);
}

}  // namespace ssdcnn
