// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace fiq::trainer {

struct LossResult {
  double loss = 0.0;
  std::array<double, 4> grad{};  // softmax(scores) - onehot(answer)
};

/// Softmax cross-entropy over four candidate scores, computed through the
/// max-shifted log-sum-exp. Throws NonFiniteError on non-finite scores and
/// ConfigError for answer_idx > 3.
template <typename T>
LossResult softmax_cross_entropy(std::span<const T, 4> scores, std::size_t answer_idx);

}  // namespace fiq::trainer
