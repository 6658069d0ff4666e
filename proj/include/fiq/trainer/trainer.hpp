// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "fiq/fiqnet/checkpoint.hpp"
#include "fiq/fiqnet/model.hpp"
#include "fiq/trainer/config.hpp"
#include "fiq/trainer/dataset.hpp"
#include "fiq/trainer/evaluate.hpp"
#include "fiq/trainer/optimizer.hpp"

namespace fiq::trainer {

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double lr = 0.0;        // rate of the last update in the epoch
  std::optional<EvalReport> eval;

  nlohmann::ordered_json to_json() const;
};

/// Owns the parameters, optimizer state and step counters of one run.
///
/// Determinism: batches are processed in record_id order, each record draws
/// its dropout masks from an rng derived from (seed, global step,
/// record_id), and gradients are averaged in that fixed order, so the
/// update does not depend on how a batch was shuffled.
class Trainer {
 public:
  /// Declares and initializes parameters from config.seed.
  Trainer(const fiqnet::ModelConfig& model, const TrainConfig& train);
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  /// One update on `batch`; returns the mean loss. lr comes from the
  /// schedule. Throws TrainingError naming the record when a loss or
  /// gradient turns non-finite; parameters are then left untouched.
  double step(std::span<const Example* const> batch, std::size_t total_steps);

  /// Shuffles with an rng derived from (seed, epoch), then runs batches of
  /// batch_size. `eval_on`, when given, is scored after the epoch.
  EpochLog train_epoch(const std::vector<Example>& data,
                       const std::vector<Example>* eval_on = nullptr);

  /// Runs the remaining epochs up to train.epochs, or up to `stop_after`
  /// when that is nonzero and smaller. The schedule always spans
  /// train.epochs.
  std::vector<EpochLog> fit(const std::vector<Example>& data,
                            const std::vector<Example>* eval_on = nullptr,
                            const std::function<void(const EpochLog&)>& on_epoch = {},
                            std::size_t stop_after = 0);

  std::size_t total_steps(std::size_t examples) const noexcept;

  fiqnet::Checkpoint checkpoint() const;
  /// Restores parameters, EMA, optimizer moments and counters.
  void resume(const fiqnet::Checkpoint& checkpoint);

  const fiqnet::ModelConfig& model_config() const noexcept { return model_; }
  const TrainConfig& train_config() const noexcept { return train_; }
  numkit::ParamStore<float>& params() noexcept { return store_; }
  const numkit::ParamStore<float>& params() const noexcept { return store_; }
  fiqnet::FiqNet<float>& net() noexcept { return net_; }
  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t global_step() const noexcept { return global_step_; }

 private:
  fiqnet::ModelConfig model_;
  TrainConfig train_;
  numkit::ParamStore<float> store_;
  fiqnet::FiqNet<float> net_;
  Adam<float> adam_;
  std::size_t epoch_ = 0;
  std::size_t global_step_ = 0;
  double last_lr_ = 0.0;
};

}  // namespace fiq::trainer
