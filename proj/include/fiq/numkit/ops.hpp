// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <vector>

#include "fiq/numkit/matrix.hpp"
#include "fiq/numkit/param.hpp"
#include "fiq/numkit/rng.hpp"

namespace fiq::numkit {

// Shape checks throw DimensionError naming both operands.

/// a * b. Checked mode accumulates each entry sequentially over k,
/// matching a naive triple loop bit for bit.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b);
/// transpose(a) * b
template <typename T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b);
/// a * transpose(b)
template <typename T>
Matrix<T> matmul_nt(const Matrix<T>& a, const Matrix<T>& b);

template <typename T>
Matrix<T> transpose(const Matrix<T>& m);

template <typename T>
Matrix<T> add(const Matrix<T>& a, const Matrix<T>& b);
template <typename T>
Matrix<T> sub(const Matrix<T>& a, const Matrix<T>& b);
template <typename T>
Matrix<T> hadamard(const Matrix<T>& a, const Matrix<T>& b);
template <typename T>
Matrix<T> scale(const Matrix<T>& a, T s);
/// dst += alpha * src
template <typename T>
void axpy(Matrix<T>& dst, const Matrix<T>& src, T alpha = T{1});

/// m + 1 * row, where row is 1 x m.cols
template <typename T>
Matrix<T> add_row_broadcast(const Matrix<T>& m, const Matrix<T>& row);
/// 1 x cols sum over rows
template <typename T>
Matrix<T> col_sum(const Matrix<T>& m);
/// 1 x cols mean over rows
template <typename T>
Matrix<T> mean_rows(const Matrix<T>& m);

template <typename T>
Matrix<T> slice_cols(const Matrix<T>& m, std::size_t begin, std::size_t count);
template <typename T>
void assign_cols(Matrix<T>& dst, std::size_t begin, const Matrix<T>& src);
template <typename T>
Matrix<T> head_rows(const Matrix<T>& m, std::size_t count);

/// Row-wise softmax with max subtraction.
template <typename T>
Matrix<T> softmax_rows(const Matrix<T>& m);
/// Gradient through softmax_rows given its output y.
template <typename T>
Matrix<T> softmax_rows_backward(const Matrix<T>& y, const Matrix<T>& dy);

template <typename T>
struct LayerNormCache {
  Matrix<T> normalized;  // xhat
  std::vector<T> inv_std;
};

inline constexpr double kLayerNormEps = 1e-5;

/// y = (x - mean) / sqrt(var + eps) * gain + bias, per row, biased variance.
template <typename T>
Matrix<T> layer_norm(const Matrix<T>& m, const Matrix<T>& gain, const Matrix<T>& bias, T eps,
                     LayerNormCache<T>* cache = nullptr);
template <typename T>
Matrix<T> layer_norm(const Matrix<T>& m, const Param<T>& gain, const Param<T>& bias,
                     T eps = static_cast<T>(kLayerNormEps));
/// Returns dx; accumulates into dgain and dbias.
template <typename T>
Matrix<T> layer_norm_backward(const LayerNormCache<T>& cache, const Matrix<T>& gain,
                              const Matrix<T>& dy, Matrix<T>& dgain, Matrix<T>& dbias);

/// tanh-approximated GELU.
template <typename T>
Matrix<T> gelu(const Matrix<T>& x);
template <typename T>
Matrix<T> gelu_backward(const Matrix<T>& x, const Matrix<T>& dy);

template <typename T>
Matrix<T> tanh(const Matrix<T>& x);

/// Inverted dropout mask: entries are 0 with probability rate, otherwise
/// 1 / (1 - rate).
template <typename T>
Matrix<T> dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng);

}  // namespace fiq::numkit
