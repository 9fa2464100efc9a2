// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_TRAIN_HPP
#define PRAC_TRAIN_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "prac/data.hpp"
#include "prac/layers.hpp"
#include "prac/optimizer.hpp"
#include "prac/rng.hpp"
#include "prac/schedule.hpp"

namespace prac {

struct EpochRecord {
  int epoch = 0;  // 1-based
  long iterations = 0;
  double mean_loss = 0.0;
  double val_accuracy = 0.0;
};

template <class Scalar>
struct TrainHooks {
  // Pre-update predictions for one minibatch: (sample ids, argmax, labels).
  std::function<void(std::span<const std::size_t>, std::span<const int>,
                     std::span<const int>)>
      on_predictions;
  // Fires at every epoch end (including a final partial epoch). Returning
  // false stops the run after this epoch.
  std::function<bool(int epoch, const ParameterSet<Scalar>& params, double val_accuracy)>
      on_epoch_end;
};

struct TrainConfig {
  long batch_size = 128;
  long iteration_budget = 0;
  LrSchedule schedule;
  bool augment = false;
  AugmentConfig augment_cfg;  // normalization applies even with augment off
  std::uint64_t seed = 0;
  int round_index = 1;  // keys the per-epoch shuffle/augment streams
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  long iterations = 0;
};

template <class Scalar>
double evaluate_accuracy(const NetworkSpec& net, const ParameterSet<Scalar>& params,
                         const SparseMask* mask, const Dataset& ds,
                         std::span<const std::size_t> ids, const AugmentConfig& norm,
                         long batch_size = 512) {
  if (ids.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t start = 0; start < ids.size(); start += batch_size) {
    const std::size_t stop = std::min(ids.size(), start + static_cast<std::size_t>(batch_size));
    std::span<const std::size_t> chunk = ids.subspan(start, stop - start);
    const Tensor<Scalar> batch = assemble_batch<Scalar>(ds, chunk, norm, nullptr);
    const std::vector<int> labels = gather_labels(ds, chunk);
    const std::vector<int> pred = argmax_rows(forward(net, params, mask, batch));
    for (std::size_t k = 0; k < chunk.size(); ++k) hits += pred[k] == labels[k];
  }
  return static_cast<double>(hits) / static_cast<double>(ids.size());
}

inline long iterations_per_epoch(std::size_t subset_size, long batch_size) {
  require(batch_size > 0, "batch size must be positive");
  return static_cast<long>((subset_size + static_cast<std::size_t>(batch_size) - 1) /
                           static_cast<std::size_t>(batch_size));
}

// Minibatch SGD over `train_ids` until the iteration budget runs out or an
// epoch-end hook calls a halt. One derived stream per (round, epoch) drives
// the shuffle first and then the per-sample augmentation draws, so runs are
// bitwise reproducible for a fixed seed.
template <class Scalar>
TrainResult train_on_subset(const NetworkSpec& net, ParameterSet<Scalar>& params,
                            OptimizerState<Scalar>& opt, const SparseMask* mask,
                            const Dataset& ds, std::span<const std::size_t> train_ids,
                            std::span<const std::size_t> val_ids, const TrainConfig& cfg,
                            const TrainHooks<Scalar>* hooks = nullptr) {
  require(!train_ids.empty(), "training subset is empty");
  require(cfg.iteration_budget <= cfg.schedule.total_iterations,
          "iteration budget exceeds the schedule horizon");
  TrainResult result;
  if (cfg.iteration_budget <= 0) return result;

  const RngStream run_rng(cfg.seed);
  std::vector<std::size_t> order(train_ids.begin(), train_ids.end());
  long it = 0;
  int epoch = 0;
  while (it < cfg.iteration_budget) {
    ++epoch;
    RngStream epoch_rng = run_rng.derive("epoch", static_cast<std::uint64_t>(cfg.round_index),
                                         static_cast<std::uint64_t>(epoch));
    shuffle(order, epoch_rng);
    double loss_sum = 0.0;
    long epoch_iters = 0;
    for (std::size_t start = 0; start < order.size() && it < cfg.iteration_budget;
         start += cfg.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::span<const std::size_t> ids(order.data() + start, stop - start);
      const Tensor<Scalar> batch = assemble_batch<Scalar>(
          ds, ids, cfg.augment_cfg, cfg.augment ? &epoch_rng : nullptr);
      const std::vector<int> labels = gather_labels(ds, ids);
      BackwardOut<Scalar> back = backward(net, params, mask, batch, std::span<const int>(labels));
      if (hooks && hooks->on_predictions)
        hooks->on_predictions(ids, back.predictions, labels);
      const double lr = lr_at(cfg.schedule, it);
      sgd_step(params, back.grads, opt, lr, mask);
      loss_sum += back.loss;
      ++it;
      ++epoch_iters;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.iterations = epoch_iters;
    rec.mean_loss = epoch_iters ? loss_sum / static_cast<double>(epoch_iters) : 0.0;
    rec.val_accuracy =
        evaluate_accuracy(net, params, mask, ds, val_ids, cfg.augment_cfg);
    result.epochs.push_back(rec);
    result.iterations = it;
    if (hooks && hooks->on_epoch_end &&
        !hooks->on_epoch_end(epoch, params, rec.val_accuracy))
      break;
  }
  result.iterations = it;
  return result;
}

}  // namespace prac

#endif  // PRAC_TRAIN_HPP
