// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/trainer/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fiq/error.hpp"

namespace fiq::trainer {

std::string_view schedule_name(LrSchedule s) noexcept {
  return s == LrSchedule::kHalfCosine ? "half-cosine" : "restarts";
}

LrSchedule parse_schedule(std::string_view name) {
  if (name == "half-cosine") return LrSchedule::kHalfCosine;
  if (name == "restarts") return LrSchedule::kRestarts;
  throw ConfigError("unknown lr schedule '" + std::string(name) +
                    "' (expected half-cosine or restarts)");
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("train.batch_size must be at least 1");
  if (epochs == 0) throw ConfigError("train.epochs must be at least 1");
  if (!(ema_decay > 0.0 && ema_decay < 1.0)) throw ConfigError("train.ema_decay must be in (0, 1)");
  if (!(lr_base > 0.0) || !std::isfinite(lr_base)) throw ConfigError("train.lr_base must be positive");
  if (!(decay_factor >= 1.0)) throw ConfigError("train.decay_factor must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("train.beta1 and train.beta2 must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("train.adam_eps must be positive");
}

std::string TrainConfig::canonical() const {
  std::ostringstream out;
  out.precision(17);
  out << "batch_size=" << batch_size << ";epochs=" << epochs << ";ema_decay=" << ema_decay
      << ";lr_base=" << lr_base << ";schedule=" << schedule_name(schedule)
      << ";decay_factor=" << decay_factor << ";beta1=" << beta1 << ";beta2=" << beta2
      << ";adam_eps=" << adam_eps << ";seed=" << seed << ";eval_with_ema=" << eval_with_ema << ";";
  return out.str();
}

double lr_at(std::size_t step, std::size_t total, const TrainConfig& config) {
  if (total == 0) throw ConfigError("lr schedule needs total_steps > 0");
  if (step > total) {
    throw ConfigError("lr step " + std::to_string(step) + " beyond total " + std::to_string(total));
  }
  double phase = static_cast<double>(step) / static_cast<double>(total);
  if (config.schedule == LrSchedule::kRestarts && step < total) {
    const double cycles = phase * config.decay_factor;
    phase = cycles - std::floor(cycles);
  }
  return config.lr_base / 2.0 * (1.0 + std::cos(std::numbers::pi * phase));
}

}  // namespace fiq::trainer
