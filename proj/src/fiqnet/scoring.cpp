// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/fiqnet/scoring.hpp"

#include <cmath>

namespace fiq::fiqnet {

using numkit::Init;

template <typename T>
ScoringHead<T>::ScoringHead(ParamStore<T>& store, const std::string& prefix, std::size_t dim)
    : proj_w_(&store.get_or_add(prefix + ".proj.w", dim, dim, Init::uniform_fan_in(dim))),
      proj_b_(&store.get_or_add(prefix + ".proj.b", 1, dim, Init::zeros())),
      score_w_(&store.get_or_add(prefix + ".score.w", dim, 1, Init::uniform_fan_in(dim))) {}

template <typename T>
T ScoringHead<T>::forward(const Matrix<T>& x_mix, Cache* cache) const {
  if (x_mix.cols() != proj_w_->rows()) {
    throw DimensionError("scoring head expects width " + std::to_string(proj_w_->rows()) +
                         ", got " + x_mix.shape_string());
  }
  Matrix<T> pooled = numkit::mean_rows(x_mix);
  Matrix<T> hidden =
      numkit::tanh(numkit::add_row_broadcast(numkit::matmul(pooled, proj_w_->value), proj_b_->value));
  const T score = numkit::matmul(hidden, score_w_->value)(0, 0);
  if (cache != nullptr) {
    cache->rows = x_mix.rows();
    cache->pooled = std::move(pooled);
    cache->hidden = std::move(hidden);
  }
  return score;
}

template <typename T>
Matrix<T> ScoringHead<T>::backward(const Cache& cache, T d_score) {
  const std::size_t dim = cache.hidden.cols();
  // score = hidden . w
  Matrix<T> d_hidden(1, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    score_w_->grad(j, 0) += cache.hidden(0, j) * d_score;
    d_hidden(0, j) = score_w_->value(j, 0) * d_score;
  }
  Matrix<T> d_pre(1, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const T h = cache.hidden(0, j);
    d_pre(0, j) = d_hidden(0, j) * (T{1} - h * h);
  }
  numkit::axpy(proj_w_->grad, numkit::matmul_tn(cache.pooled, d_pre));
  numkit::axpy(proj_b_->grad, d_pre);
  const Matrix<T> d_pooled = numkit::matmul_nt(d_pre, proj_w_->value);
  Matrix<T> d_mix(cache.rows, dim);
  const T inv = T{1} / static_cast<T>(cache.rows);
  for (std::size_t i = 0; i < cache.rows; ++i)
    for (std::size_t j = 0; j < dim; ++j) d_mix(i, j) = d_pooled(0, j) * inv;
  return d_mix;
}

template <typename T>
std::size_t predict(std::span<const T> scores) {
  if (scores.empty()) throw InferenceError("predict: no scores");
  std::size_t best = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw InferenceError("predict: score " + std::to_string(i) + " is not finite");
    }
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

template class ScoringHead<float>;
template class ScoringHead<double>;
template std::size_t predict<float>(std::span<const float>);
template std::size_t predict<double>(std::span<const double>);

}  // namespace fiq::fiqnet
