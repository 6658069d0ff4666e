// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/trainer/loss.hpp"

#include <algorithm>
#include <cmath>

#include "fiq/error.hpp"

namespace fiq::trainer {

template <typename T>
LossResult softmax_cross_entropy(std::span<const T, 4> scores, std::size_t answer_idx) {
  if (answer_idx >= 4) throw ConfigError("answer_idx " + std::to_string(answer_idx) + " out of range");
  double m = static_cast<double>(scores[0]);
  for (T s : scores) {
    if (!std::isfinite(s)) throw NonFiniteError("non-finite candidate score");
    m = std::max(m, static_cast<double>(s));
  }
  std::array<double, 4> e{};
  double z = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    e[i] = std::exp(static_cast<double>(scores[i]) - m);
    z += e[i];
  }
  LossResult r;
  r.loss = std::log(z) - (static_cast<double>(scores[answer_idx]) - m);
  for (std::size_t i = 0; i < 4; ++i) r.grad[i] = e[i] / z - (i == answer_idx ? 1.0 : 0.0);
  return r;
}

template LossResult softmax_cross_entropy<float>(std::span<const float, 4>, std::size_t);
template LossResult softmax_cross_entropy<double>(std::span<const double, 4>, std::size_t);

}  // namespace fiq::trainer
