// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fiq/fiqnet/config.hpp"
#include "fiq/numkit/param.hpp"
#include "fiq/qagen/records.hpp"
#include "fiq/trainer/dataset.hpp"

namespace fiq::trainer {

struct TaskStat {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const noexcept {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
};

struct EvalReport {
  /// Only tasks with at least one record appear.
  std::map<qagen::TaskType, TaskStat> tasks;
  /// Mean of per-task accuracies over the benchmark tasks B F R C I A that
  /// have records; GEN is excluded. 0 when none do.
  double average = 0.0;
  std::size_t tasks_averaged = 0;
  /// Pooled over every record, GEN included.
  TaskStat overall;

  nlohmann::ordered_json to_json() const;
  /// Fixed-width task breakdown, one header and one value row.
  std::string table() const;
};

/// predictions[i] is the chosen option index for records[i].
EvalReport build_report(const std::vector<qagen::QARecord>& records,
                        const std::vector<std::size_t>& predictions);

/// Eval-mode argmax for every example; EMA shadows substituted for values
/// when use_ema is set. Examples are scored concurrently outside checked
/// mode; results do not depend on scheduling.
std::vector<std::size_t> predict_examples(const fiqnet::ModelConfig& config,
                                          const numkit::ParamStore<float>& params,
                                          const std::vector<Example>& examples, bool use_ema);

EvalReport evaluate(const fiqnet::ModelConfig& config, const numkit::ParamStore<float>& params,
                    const std::vector<Example>& examples, bool use_ema);

/// Accuracy of argmax over uniform random scores, averaged over `draws`
/// independent passes.
double random_baseline_accuracy(const std::vector<qagen::QARecord>& records, std::uint64_t seed,
                                std::size_t draws = 100);

}  // namespace fiq::trainer
