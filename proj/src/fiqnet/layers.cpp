// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/fiqnet/layers.hpp"

#include <cmath>

namespace fiq::fiqnet {

using numkit::Init;

namespace {

template <typename T>
void require_width(const char* block, const Matrix<T>& x, std::size_t dim) {
  if (x.cols() != dim) {
    throw DimensionError(std::string(block) + ": input " + x.shape_string() + " has width " +
                         std::to_string(x.cols()) + ", expected " + std::to_string(dim));
  }
}

}  // namespace

// LayerNorm -----------------------------------------------------------------

template <typename T>
LayerNorm<T>::LayerNorm(ParamStore<T>& store, const std::string& prefix, std::size_t dim,
                        double eps)
    : gain_(&store.get_or_add(prefix + ".gain", 1, dim, Init::ones())),
      bias_(&store.get_or_add(prefix + ".bias", 1, dim, Init::zeros())),
      eps_(static_cast<T>(eps)) {}

template <typename T>
Matrix<T> LayerNorm<T>::forward(const Matrix<T>& x, Cache* cache) const {
  return numkit::layer_norm(x, gain_->value, bias_->value, eps_,
                            cache != nullptr ? &cache->stats : nullptr);
}

template <typename T>
Matrix<T> LayerNorm<T>::backward(const Cache& cache, const Matrix<T>& d_out) {
  return numkit::layer_norm_backward(cache.stats, gain_->value, d_out, gain_->grad, bias_->grad);
}

// MultiHeadAttention -------------------------------------------------------

template <typename T>
MultiHeadAttention<T>::MultiHeadAttention(ParamStore<T>& store, const std::string& prefix,
                                          std::size_t dim, std::size_t heads)
    : w_q_(&store.get_or_add(prefix + ".w_q", dim, dim, Init::uniform_fan_in(dim))),
      w_k_(&store.get_or_add(prefix + ".w_k", dim, dim, Init::uniform_fan_in(dim))),
      w_v_(&store.get_or_add(prefix + ".w_v", dim, dim, Init::uniform_fan_in(dim))),
      w_o_(&store.get_or_add(prefix + ".w_o", dim, dim, Init::uniform_fan_in(dim))),
      dim_(dim),
      heads_(heads) {
  if (heads == 0 || dim % heads != 0) {
    throw ConfigError("attention width " + std::to_string(dim) + " is not divisible by " +
                      std::to_string(heads) + " heads");
  }
}

template <typename T>
Matrix<T> MultiHeadAttention<T>::forward(const Matrix<T>& query, const Matrix<T>& memory,
                                         Cache* cache) const {
  require_width("attention query", query, dim_);
  require_width("attention memory", memory, dim_);
  if (memory.rows() == 0) throw DimensionError("attention memory has no rows");

  const std::size_t dh = dim_ / heads_;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
  Matrix<T> q = numkit::matmul(query, w_q_->value);
  Matrix<T> k = numkit::matmul(memory, w_k_->value);
  Matrix<T> v = numkit::matmul(memory, w_v_->value);
  Matrix<T> concat(query.rows(), dim_);
  std::vector<Matrix<T>> weights;
  weights.reserve(heads_);
  for (std::size_t h = 0; h < heads_; ++h) {
    const Matrix<T> qh = numkit::slice_cols(q, h * dh, dh);
    const Matrix<T> kh = numkit::slice_cols(k, h * dh, dh);
    const Matrix<T> vh = numkit::slice_cols(v, h * dh, dh);
    Matrix<T> a = numkit::softmax_rows(numkit::scale(numkit::matmul_nt(qh, kh), scale));
    numkit::assign_cols(concat, h * dh, numkit::matmul(a, vh));
    weights.push_back(std::move(a));
  }
  Matrix<T> out = numkit::matmul(concat, w_o_->value);
  if (cache != nullptr) {
    cache->query_in = query;
    cache->memory_in = memory;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->concat = std::move(concat);
    cache->weights = std::move(weights);
  }
  return out;
}

template <typename T>
typename MultiHeadAttention<T>::Grads MultiHeadAttention<T>::backward(const Cache& cache,
                                                                      const Matrix<T>& d_out) {
  const std::size_t dh = dim_ / heads_;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

  numkit::axpy(w_o_->grad, numkit::matmul_tn(cache.concat, d_out));
  const Matrix<T> d_concat = numkit::matmul_nt(d_out, w_o_->value);

  Matrix<T> dq(cache.q.rows(), dim_);
  Matrix<T> dk(cache.k.rows(), dim_);
  Matrix<T> dv(cache.v.rows(), dim_);
  for (std::size_t h = 0; h < heads_; ++h) {
    const Matrix<T>& a = cache.weights[h];
    const Matrix<T> qh = numkit::slice_cols(cache.q, h * dh, dh);
    const Matrix<T> kh = numkit::slice_cols(cache.k, h * dh, dh);
    const Matrix<T> vh = numkit::slice_cols(cache.v, h * dh, dh);
    const Matrix<T> d_oh = numkit::slice_cols(d_concat, h * dh, dh);

    const Matrix<T> d_a = numkit::matmul_nt(d_oh, vh);
    numkit::assign_cols(dv, h * dh, numkit::matmul_tn(a, d_oh));
    const Matrix<T> d_s = numkit::scale(numkit::softmax_rows_backward(a, d_a), scale);
    numkit::assign_cols(dq, h * dh, numkit::matmul(d_s, kh));
    numkit::assign_cols(dk, h * dh, numkit::matmul_tn(d_s, qh));
  }

  numkit::axpy(w_q_->grad, numkit::matmul_tn(cache.query_in, dq));
  numkit::axpy(w_k_->grad, numkit::matmul_tn(cache.memory_in, dk));
  numkit::axpy(w_v_->grad, numkit::matmul_tn(cache.memory_in, dv));

  Grads grads;
  grads.d_query = numkit::matmul_nt(dq, w_q_->value);
  grads.d_memory = numkit::add(numkit::matmul_nt(dk, w_k_->value), numkit::matmul_nt(dv, w_v_->value));
  return grads;
}

// FeedForward ---------------------------------------------------------------

template <typename T>
FeedForward<T>::FeedForward(ParamStore<T>& store, const std::string& prefix, std::size_t dim,
                            std::size_t multiplier)
    : w1_(&store.get_or_add(prefix + ".w1", dim, multiplier * dim, Init::uniform_fan_in(dim))),
      b1_(&store.get_or_add(prefix + ".b1", 1, multiplier * dim, Init::zeros())),
      w2_(&store.get_or_add(prefix + ".w2", multiplier * dim, dim,
                            Init::uniform_fan_in(multiplier * dim))),
      b2_(&store.get_or_add(prefix + ".b2", 1, dim, Init::zeros())) {}

template <typename T>
Matrix<T> FeedForward<T>::forward(const Matrix<T>& x, Cache* cache) const {
  require_width("feed-forward", x, w1_->rows());
  Matrix<T> pre = numkit::add_row_broadcast(numkit::matmul(x, w1_->value), b1_->value);
  Matrix<T> act = numkit::gelu(pre);
  Matrix<T> out = numkit::add_row_broadcast(numkit::matmul(act, w2_->value), b2_->value);
  if (cache != nullptr) {
    cache->x = x;
    cache->pre = std::move(pre);
    cache->act = std::move(act);
  }
  return out;
}

template <typename T>
Matrix<T> FeedForward<T>::backward(const Cache& cache, const Matrix<T>& d_out) {
  numkit::axpy(w2_->grad, numkit::matmul_tn(cache.act, d_out));
  numkit::axpy(b2_->grad, numkit::col_sum(d_out));
  const Matrix<T> d_act = numkit::matmul_nt(d_out, w2_->value);
  const Matrix<T> d_pre = numkit::gelu_backward(cache.pre, d_act);
  numkit::axpy(w1_->grad, numkit::matmul_tn(cache.x, d_pre));
  numkit::axpy(b1_->grad, numkit::col_sum(d_pre));
  return numkit::matmul_nt(d_pre, w1_->value);
}

template class LayerNorm<float>;
template class LayerNorm<double>;
template class MultiHeadAttention<float>;
template class MultiHeadAttention<double>;
template class FeedForward<float>;
template class FeedForward<double>;

}  // namespace fiq::fiqnet
