// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fiq/numkit/matrix.hpp"
#include "fiq/numkit/ops.hpp"
#include "fiq/numkit/param.hpp"

// Building blocks with hand-derived backward passes. Each block binds to
// parameters in a ParamStore by name, so the same layout can be bound to a
// float store for training and a double store for gradient checks.
// backward() accumulates into Param::grad and returns input gradients.

namespace fiq::fiqnet {

using numkit::Matrix;
using numkit::Param;
using numkit::ParamStore;

template <typename T>
class LayerNorm {
 public:
  struct Cache {
    numkit::LayerNormCache<T> stats;
  };

  LayerNorm(ParamStore<T>& store, const std::string& prefix, std::size_t dim, double eps);

  Matrix<T> forward(const Matrix<T>& x, Cache* cache) const;
  Matrix<T> backward(const Cache& cache, const Matrix<T>& d_out);

  Param<T>& gain() noexcept { return *gain_; }
  Param<T>& bias() noexcept { return *bias_; }

 private:
  Param<T>* gain_;
  Param<T>* bias_;
  T eps_;
};

/// Scaled dot-product attention with H heads over D = H * (D/H) columns.
/// Queries come from `query`, keys and values from `memory`.
template <typename T>
class MultiHeadAttention {
 public:
  struct Cache {
    Matrix<T> query_in;
    Matrix<T> memory_in;
    Matrix<T> q, k, v;
    Matrix<T> concat;
    std::vector<Matrix<T>> weights;  // one rows(query) x rows(memory) per head
  };
  struct Grads {
    Matrix<T> d_query;
    Matrix<T> d_memory;
  };

  MultiHeadAttention(ParamStore<T>& store, const std::string& prefix, std::size_t dim,
                     std::size_t heads);

  Matrix<T> forward(const Matrix<T>& query, const Matrix<T>& memory, Cache* cache) const;
  Grads backward(const Cache& cache, const Matrix<T>& d_out);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t heads() const noexcept { return heads_; }
  Param<T>& output_projection() noexcept { return *w_o_; }

 private:
  Param<T>* w_q_;
  Param<T>* w_k_;
  Param<T>* w_v_;
  Param<T>* w_o_;
  std::size_t dim_;
  std::size_t heads_;
};

/// Linear(D, mult*D) -> GELU -> Linear(mult*D, D).
template <typename T>
class FeedForward {
 public:
  struct Cache {
    Matrix<T> x;
    Matrix<T> pre;   // pre-activation
    Matrix<T> act;   // GELU(pre)
  };

  FeedForward(ParamStore<T>& store, const std::string& prefix, std::size_t dim,
              std::size_t multiplier);

  Matrix<T> forward(const Matrix<T>& x, Cache* cache) const;
  Matrix<T> backward(const Cache& cache, const Matrix<T>& d_out);

  Param<T>& output_weight() noexcept { return *w2_; }
  Param<T>& output_bias() noexcept { return *b2_; }

 private:
  Param<T>* w1_;
  Param<T>* b1_;
  Param<T>* w2_;
  Param<T>* b2_;
};

}  // namespace fiq::fiqnet
