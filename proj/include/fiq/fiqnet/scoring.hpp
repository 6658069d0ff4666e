// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "fiq/fiqnet/layers.hpp"

namespace fiq::fiqnet {

/// score = tanh(mean_rows(x_mix) * P + b) * w
template <typename T>
class ScoringHead {
 public:
  struct Cache {
    std::size_t rows = 0;
    Matrix<T> pooled;  // 1 x D
    Matrix<T> hidden;  // 1 x D, after tanh
  };

  ScoringHead(ParamStore<T>& store, const std::string& prefix, std::size_t dim);

  T forward(const Matrix<T>& x_mix, Cache* cache) const;
  /// Returns d(x_mix) for an upstream d(score).
  Matrix<T> backward(const Cache& cache, T d_score);

 private:
  Param<T>* proj_w_;
  Param<T>* proj_b_;
  Param<T>* score_w_;
};

/// Index of the highest score; ties resolve to the lowest index. Throws
/// InferenceError on non-finite input.
template <typename T>
std::size_t predict(std::span<const T> scores);

}  // namespace fiq::fiqnet
