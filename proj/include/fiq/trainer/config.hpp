// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace fiq::trainer {

enum class LrSchedule {
  /// lr = lr_base / 2 * (1 + cos(pi * step / total)): lr_base down to 0.
  kHalfCosine,
  /// Same curve restarted decay_factor times; each cycle spans
  /// total / decay_factor steps.
  kRestarts,
};

std::string_view schedule_name(LrSchedule s) noexcept;
LrSchedule parse_schedule(std::string_view name);

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 37;
  double ema_decay = 0.9999;
  double lr_base = 1e-4;
  LrSchedule schedule = LrSchedule::kHalfCosine;
  double decay_factor = 2.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  /// Evaluate with EMA shadows instead of raw values.
  bool eval_with_ema = true;

  /// Throws ConfigError on out-of-range settings.
  void validate() const;
  std::string canonical() const;
};

/// Learning rate before update number `step` (0-based) of `total`.
/// Throws ConfigError when total is 0 or step > total.
double lr_at(std::size_t step, std::size_t total, const TrainConfig& config);

}  // namespace fiq::trainer
