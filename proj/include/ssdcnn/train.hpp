#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ssdcnn/error.hpp"
#include "ssdcnn/evaluate.hpp"
#include "ssdcnn/features.hpp"
#include "ssdcnn/model.hpp"
#include "ssdcnn/nn/adagrad.hpp"
#include "ssdcnn/parallel.hpp"
#include "ssdcnn/preprocess.hpp"

namespace ssdcnn {

struct TrainConfig {
  int batch_size = 100;
  double eta = nn::kDefaultEta;
  double fudge = nn::kDefaultFudge;
  int phase1_epochs = 10;
  int phase2_epochs = 0;
  int patience = 0;  // 0 disables early stopping
  std::uint64_t seed = 1;
  double drop_prob = 0.0;
  int threads = 1;

  void check() const {
    if (batch_size < 1) throw Error(ErrorCode::ShapeError, "batch size must be at least 1");
    if (phase1_epochs < 0 || phase2_epochs < 0) throw Error(ErrorCode::ShapeError, "epoch counts must be >= 0");
    if (patience < 0) throw Error(ErrorCode::ShapeError, "patience must be >= 0");
    if (!(eta > 0) || !(fudge > 0)) throw Error(ErrorCode::ShapeError, "eta and fudge must be positive");
    if (!(drop_prob >= 0 && drop_prob < 1)) throw Error(ErrorCode::ShapeError, "drop probability must be in [0, 1)");
  }
};

/// One row per mini-batch. `val_p1` is NaN except on the last batch of an
/// epoch that ran a validation pass.
struct TraceRow {
  int epoch = 0;
  int phase = 1;
  int batch = 0;
  double loss = 0.0;  // mean NLL over the batch
  double val_p1 = std::numeric_limits<double>::quiet_NaN();
  double max_update = 0.0;
};

struct TrainResult {
  std::vector<TraceRow> trace;
  int phase1_epochs_run = 0;
  int phase2_epochs_run = 0;
  std::uint64_t theta1_after_phase1 = 0;
  std::uint64_t theta1_after_phase2 = 0;
  double best_val_p1 = std::numeric_limits<double>::quiet_NaN();
};

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "epoch,phase,batch,loss,val_p1,max_update\n";
  for (const auto& r : trace) {
    os << r.epoch << ',' << r.phase << ',' << r.batch << ',' << r.loss << ',';
    if (!std::isnan(r.val_p1)) os << r.val_p1;
    os << ',' << r.max_update << '\n';
  }
}

/// Called after every epoch with (phase, epoch, validation P@1 or NaN).
using EpochCallback = std::function<void(int, int, double)>;

namespace train_detail {

template <class T>
struct Worker {
  nn::ParamSet<T> grads;
  ModelTrace<T> trace;
  double loss = 0.0;
};

inline SampleFeatures batch_input(const LabeledSet& data, std::size_t i, double drop_prob, std::uint64_t seed) {
  if (drop_prob <= 0.0 || data.raw == nullptr) return data.x[i];
  const InkCharacter aug = augment_drop_points(data.raw->samples[i], drop_prob, seed);
  return featurize(aug, data.needs, data.features);
}

}  // namespace train_detail

/// Summed batch gradient of the NLL, split over `threads` workers whose
/// partial sums are reduced in worker order. Returns the summed loss.
template <class T>
double batch_gradient(const Model<T>& m, const LabeledSet& data, const std::vector<std::size_t>& batch,
                      nn::GroupMask active, std::vector<train_detail::Worker<T>>& workers, nn::ParamSet<T>& grads,
                      double drop_prob, std::uint64_t aug_seed, int threads) {
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), batch.size());
  if (workers.size() < t) workers.resize(t);
  // worker 0 accumulates straight into `grads`
  grads.zero();
  for (std::size_t w = 0; w < t; ++w) {
    if (w > 0) {
      if (workers[w].grads.size() != m.params.size()) workers[w].grads = m.params.zeros_like();
      workers[w].grads.zero();
    }
    workers[w].loss = 0.0;
  }
  parallel_chunks(batch.size(), static_cast<int>(t), [&](std::size_t begin, std::size_t end, std::size_t w) {
    auto& wk = workers[w];
    auto& g = w == 0 ? grads : wk.grads;
    for (std::size_t b = begin; b < end; ++b) {
      const std::size_t i = batch[b];
      const SampleFeatures x = train_detail::batch_input(data, i, drop_prob, nn::mix_seed(aug_seed, i));
      wk.loss += static_cast<double>(sample_gradient(m, x, data.y[i], wk.trace, g, active));
    }
  });
  double loss = workers[0].loss;
  for (std::size_t w = 1; w < t; ++w) {
    grads.accumulate(workers[w].grads);
    loss += workers[w].loss;
  }
  return loss;
}

/// Phase I updates every parameter; the AdaGrad history is then reset and
/// Phase II updates theta2 only. Each phase stops at its epoch budget or
/// when validation P@1 has not improved for `patience` epochs.
template <class T>
TrainResult train_two_phase(Model<T>& m, const LabeledSet& train, const LabeledSet* val, const TrainConfig& config,
                            const EpochCallback& on_epoch = {}) {
  config.check();
  if (train.size() == 0) throw Error(ErrorCode::EmptyDataset, "training set is empty");
  if (train.y.size() != train.size()) throw Error(ErrorCode::ShapeMismatch, "feature and label counts differ");
  for (std::size_t i = 0; i < train.y.size(); ++i) {
    if (train.y[i] < 0 || train.y[i] >= m.classes) {
      throw Error(ErrorCode::IndexOutOfRange, "label " + std::to_string(train.y[i]) + " outside the model's classes", i);
    }
  }

  TrainResult result;
  nn::GradState<T> state(m.params, T(config.eta), T(config.fudge));
  std::vector<train_detail::Worker<T>> workers;
  nn::ParamSet<T> grads = m.params.zeros_like();
  std::mt19937_64 rng(nn::mix_seed(config.seed, 0x5487));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const bool validate_epochs = val != nullptr && val->size() > 0;
  std::uint64_t batch_counter = 0;

  auto run_phase = [&](int phase, int epochs, nn::GroupMask active) {
    double best = -1.0;
    int stale = 0;
    int run = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      int batch_index = 0;
      for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
        const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
        const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                             order.begin() + static_cast<std::ptrdiff_t>(end));
        const std::uint64_t aug_seed = nn::mix_seed(config.seed, ++batch_counter);
        const double loss =
            batch_gradient(m, train, batch, active, workers, grads, config.drop_prob, aug_seed, config.threads);
        const T max_update = nn::adagrad_step(m.params, grads, state, active);
        result.trace.push_back(TraceRow{epoch + 1, phase, batch_index++, loss / static_cast<double>(batch.size()),
                                        std::numeric_limits<double>::quiet_NaN(), static_cast<double>(max_update)});
      }
      ++run;
      double p1 = std::numeric_limits<double>::quiet_NaN();
      if (validate_epochs) {
        p1 = evaluate(m, *val, {1}, config.threads).at(1);
        result.trace.back().val_p1 = p1;
        if (std::isnan(result.best_val_p1) || p1 > result.best_val_p1) result.best_val_p1 = p1;
      }
      if (on_epoch) on_epoch(phase, epoch + 1, p1);
      if (validate_epochs && config.patience > 0) {
        if (p1 > best) {
          best = p1;
          stale = 0;
        } else if (++stale >= config.patience) {
          break;
        }
      }
    }
    return run;
  };

  result.phase1_epochs_run = run_phase(1, config.phase1_epochs, nn::GroupMask::all());
  result.theta1_after_phase1 = nn::checksum(m.params, nn::ParamGroup::Theta1);
  state.reset();
  result.phase2_epochs_run = run_phase(2, config.phase2_epochs, nn::GroupMask::only_theta2());
  result.theta1_after_phase2 = nn::checksum(m.params, nn::ParamGroup::Theta1);
  return result;
}

}  // namespace ssdcnn
