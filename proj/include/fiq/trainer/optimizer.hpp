// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fiq/numkit/param.hpp"
#include "fiq/trainer/config.hpp"

namespace fiq::trainer {

/// Adam moments for every parameter of a store, in store order.
template <typename T>
class Adam {
 public:
  Adam() = default;
  explicit Adam(const numkit::ParamStore<T>& store);

  /// One bias-corrected update from Param::grad:
  ///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2,
  ///   value -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps).
  /// Moment arithmetic is carried in double.
  void step(numkit::ParamStore<T>& store, double lr, const TrainConfig& config);

  std::size_t steps() const noexcept { return steps_; }
  void set_steps(std::size_t t) noexcept { steps_ = t; }

  std::vector<numkit::Matrix<T>>& first() noexcept { return m_; }
  std::vector<numkit::Matrix<T>>& second() noexcept { return v_; }
  const std::vector<numkit::Matrix<T>>& first() const noexcept { return m_; }
  const std::vector<numkit::Matrix<T>>& second() const noexcept { return v_; }

 private:
  std::vector<numkit::Matrix<T>> m_;
  std::vector<numkit::Matrix<T>> v_;
  std::size_t steps_ = 0;
};

/// ema = decay * ema + (1 - decay) * value for every parameter.
template <typename T>
void update_ema(numkit::ParamStore<T>& store, double decay);

}  // namespace fiq::trainer
