// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fiq/error.hpp"
#include "fiq/trainer/loss.hpp"

namespace fiq::trainer {
namespace {

constexpr std::uint64_t kInitTag = 0x696e6974;     // "init"
constexpr std::uint64_t kShuffleTag = 0x73687566;  // "shuf"
constexpr std::uint64_t kDropoutTag = 0x64726f70;  // "drop"

numkit::ParamStore<float>& declared(const fiqnet::ModelConfig& model, numkit::ParamStore<float>& s) {
  fiqnet::declare_parameters(model, s);
  return s;
}

}  // namespace

nlohmann::ordered_json EpochLog::to_json() const {
  nlohmann::ordered_json j{{"epoch", epoch}, {"mean_loss", mean_loss}, {"lr", lr}};
  if (eval) j["eval"] = eval->to_json();
  return j;
}

Trainer::Trainer(const fiqnet::ModelConfig& model, const TrainConfig& train)
    : model_((model.validate(), model)),
      train_((train.validate(), train)),
      net_(model_, declared(model_, store_)) {
  numkit::Rng rng = numkit::Rng::derive(train_.seed, kInitTag);
  store_.initialize(rng);
  adam_ = Adam<float>(store_);
}

std::size_t Trainer::total_steps(std::size_t examples) const noexcept {
  return train_.epochs * ((examples + train_.batch_size - 1) / train_.batch_size);
}

double Trainer::step(std::span<const Example* const> batch, std::size_t total_steps) {
  if (batch.empty()) throw ConfigError("empty training batch");
  std::vector<const Example*> order(batch.begin(), batch.end());
  std::sort(order.begin(), order.end(), [](const Example* a, const Example* b) {
    return a->record.record_id < b->record.record_id;
  });

  store_.zero_grad();
  const double inv = 1.0 / static_cast<double>(order.size());
  const std::uint64_t step_seed =
      numkit::hash_combine(numkit::hash_combine(train_.seed, kDropoutTag), global_step_);
  double loss_sum = 0.0;
  for (const Example* ex : order) {
    const auto& id = ex->record.record_id;
    numkit::Rng rng = numkit::Rng::derive(step_seed, numkit::fnv1a64(id));
    fiqnet::ScoringInputs<float> in;
    in.video = ex->video.get();
    in.question = ex->question.get();
    for (const auto& o : ex->options) in.candidates.push_back(o.get());
    fiqnet::FiqNet<float>::Cache cache;
    const auto scores = net_.score_candidates(in, fiqnet::Mode::kTrain, &rng, &cache);
    LossResult loss;
    try {
      loss = softmax_cross_entropy<float>(scores, ex->record.answer_idx);
    } catch (const NonFiniteError&) {
      throw TrainingError(id, "non-finite scores for record '" + id + "'");
    }
    if (!std::isfinite(loss.loss)) throw TrainingError(id, "non-finite loss for record '" + id + "'");
    std::array<float, 4> d{};
    for (std::size_t i = 0; i < 4; ++i) d[i] = static_cast<float>(loss.grad[i] * inv);
    net_.backward(cache, d);
    loss_sum += loss.loss;
  }
  for (const auto& p : store_) {
    if (!p.grad.all_finite()) {
      throw TrainingError(order.front()->record.record_id,
                          "non-finite gradient for parameter '" + p.name + "'");
    }
  }

  last_lr_ = lr_at(std::min(global_step_, total_steps), total_steps, train_);
  adam_.step(store_, last_lr_, train_);
  update_ema(store_, train_.ema_decay);
  ++global_step_;
  return loss_sum * inv;
}

EpochLog Trainer::train_epoch(const std::vector<Example>& data, const std::vector<Example>* eval_on) {
  if (data.empty()) throw ConfigError("training set is empty");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  numkit::Rng rng = numkit::Rng::derive(numkit::hash_combine(train_.seed, kShuffleTag), epoch_);
  rng.shuffle(std::span<std::size_t>(order));

  const std::size_t total = total_steps(data.size());
  double loss_sum = 0.0;
  std::size_t batches = 0;
  std::vector<const Example*> batch;
  for (std::size_t begin = 0; begin < order.size(); begin += train_.batch_size) {
    batch.clear();
    for (std::size_t i = begin; i < std::min(order.size(), begin + train_.batch_size); ++i) {
      batch.push_back(&data[order[i]]);
    }
    loss_sum += step(batch, total);
    ++batches;
  }
  ++epoch_;
  EpochLog log;
  log.epoch = epoch_;
  log.mean_loss = loss_sum / static_cast<double>(batches);
  log.lr = last_lr_;
  if (eval_on != nullptr) log.eval = evaluate(model_, store_, *eval_on, train_.eval_with_ema);
  return log;
}

std::vector<EpochLog> Trainer::fit(const std::vector<Example>& data,
                                   const std::vector<Example>* eval_on,
                                   const std::function<void(const EpochLog&)>& on_epoch,
                                   std::size_t stop_after) {
  const std::size_t last = stop_after == 0 ? train_.epochs : std::min(stop_after, train_.epochs);
  std::vector<EpochLog> logs;
  while (epoch_ < last) {
    logs.push_back(train_epoch(data, eval_on));
    if (on_epoch) on_epoch(logs.back());
  }
  return logs;
}

fiqnet::Checkpoint Trainer::checkpoint() const {
  fiqnet::Checkpoint ck;
  ck.config = model_;
  ck.params = store_;
  for (std::size_t k = 0; k < store_.size(); ++k) {
    ck.extras.emplace("adam.m." + store_[k].name, adam_.first()[k]);
    ck.extras.emplace("adam.v." + store_[k].name, adam_.second()[k]);
  }
  ck.meta = {{"epoch", epoch_},
             {"global_step", global_step_},
             {"adam_steps", adam_.steps()},
             {"train_config", train_.canonical()}};
  return ck;
}

void Trainer::resume(const fiqnet::Checkpoint& ck) {
  fiqnet::restore_parameters(ck, model_, store_);
  Adam<float> adam(store_);
  for (std::size_t k = 0; k < store_.size(); ++k) {
    const auto& name = store_[k].name;
    auto m = ck.extras.find("adam.m." + name);
    auto v = ck.extras.find("adam.v." + name);
    if (m == ck.extras.end() || v == ck.extras.end()) {
      throw ConfigError("checkpoint lacks optimizer state for '" + name + "'");
    }
    if (!m->second.same_shape(store_[k].value) || !v->second.same_shape(store_[k].value)) {
      throw DimensionError("optimizer state for '" + name + "' has the wrong shape");
    }
    adam.first()[k] = m->second;
    adam.second()[k] = v->second;
  }
  try {
    adam.set_steps(ck.meta.at("adam_steps").get<std::size_t>());
    epoch_ = ck.meta.at("epoch").get<std::size_t>();
    global_step_ = ck.meta.at("global_step").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("meta", std::string("checkpoint meta lacks training counters: ") + e.what());
  }
  adam_ = std::move(adam);
}

}  // namespace fiq::trainer
