// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/fiqnet/fusion.hpp"

namespace fiq::fiqnet {

using numkit::Init;

// PositionalEmbedding ------------------------------------------------------

template <typename T>
PositionalEmbedding<T>::PositionalEmbedding(ParamStore<T>& store, const std::string& name,
                                            std::size_t max_frames, std::size_t dim)
    : table_(&store.get_or_add(name, max_frames, dim, Init::zeros())) {}

template <typename T>
Matrix<T> PositionalEmbedding<T>::forward(const Matrix<T>& x_vis) const {
  if (x_vis.rows() > table_->rows()) {
    throw CapacityError("video has " + std::to_string(x_vis.rows()) +
                        " frames but the positional embedding holds " +
                        std::to_string(table_->rows()));
  }
  if (x_vis.cols() != table_->cols()) {
    throw DimensionError("positional embedding width " + std::to_string(table_->cols()) +
                         " does not match frames " + x_vis.shape_string());
  }
  Matrix<T> out = x_vis;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += table_->value(i, j);
  return out;
}

template <typename T>
void PositionalEmbedding<T>::backward(const Matrix<T>& d_out) {
  for (std::size_t i = 0; i < d_out.rows(); ++i)
    for (std::size_t j = 0; j < d_out.cols(); ++j) table_->grad(i, j) += d_out(i, j);
}

// FusionLayer ----------------------------------------------------------------

template <typename T>
FusionLayer<T>::FusionLayer(ParamStore<T>& store, const std::string& prefix,
                            const ModelConfig& config)
    : ln1_(store, prefix + ".ln1", config.dim, config.ln_eps),
      ln2_(store, prefix + ".ln2", config.dim, config.ln_eps),
      ln3_(store, prefix + ".ln3", config.dim, config.ln_eps),
      self_attn_(store, prefix + ".self_attn", config.dim, config.heads),
      cross_attn_(store, prefix + ".cross_attn", config.dim, config.heads),
      ffn_(store, prefix + ".ffn", config.dim, config.ffn_multiplier),
      dim_(config.dim),
      dropout_(config.dropout) {}

namespace {

template <typename T>
Matrix<T> apply_dropout(const Matrix<T>& x, Mode mode, double rate, numkit::Rng* rng,
                        Matrix<T>* mask_out) {
  if (mode == Mode::kEval || rate == 0.0) return x;
  if (rng == nullptr) throw ConfigError("train-mode dropout requires an rng");
  Matrix<T> mask = numkit::dropout_mask<T>(x.rows(), x.cols(), rate, *rng);
  Matrix<T> out = numkit::hadamard(x, mask);
  if (mask_out != nullptr) *mask_out = std::move(mask);
  return out;
}

template <typename T>
Matrix<T> through_mask(const Matrix<T>& d, const Matrix<T>& mask) {
  return mask.empty() ? d : numkit::hadamard(d, mask);
}

}  // namespace

template <typename T>
Matrix<T> FusionLayer<T>::forward(const Matrix<T>& x, const Matrix<T>& memory, Mode mode,
                                  numkit::Rng* rng, Cache* cache) const {
  if (x.cols() != dim_ || memory.cols() != dim_) {
    throw DimensionError("fusion layer expects width " + std::to_string(dim_) + ", got " +
                         x.shape_string() + " and " + memory.shape_string());
  }
  Cache local;
  Cache& c = cache != nullptr ? *cache : local;

  const Matrix<T> n1 = ln1_.forward(x, &c.ln1);
  const Matrix<T> sa = self_attn_.forward(n1, n1, &c.self_attn);
  Matrix<T> s = numkit::add(x, apply_dropout(sa, mode, dropout_, rng, &c.mask1));

  const Matrix<T> n2 = ln2_.forward(s, &c.ln2);
  const Matrix<T> ca = cross_attn_.forward(n2, memory, &c.cross_attn);
  Matrix<T> cr = numkit::add(s, apply_dropout(ca, mode, dropout_, rng, &c.mask2));

  const Matrix<T> n3 = ln3_.forward(cr, &c.ln3);
  const Matrix<T> ff = ffn_.forward(n3, &c.ffn);
  Matrix<T> out = numkit::add(cr, apply_dropout(ff, mode, dropout_, rng, &c.mask3));

  if (cache != nullptr) {
    c.after_self = std::move(s);
    c.after_cross = std::move(cr);
  }
  return out;
}

template <typename T>
typename FusionLayer<T>::Grads FusionLayer<T>::backward(const Cache& cache, const Matrix<T>& d_out) {
  // FFN branch
  Matrix<T> d_cross = d_out;
  {
    const Matrix<T> d_ff = through_mask(d_out, cache.mask3);
    const Matrix<T> d_n3 = ffn_.backward(cache.ffn, d_ff);
    numkit::axpy(d_cross, ln3_.backward(cache.ln3, d_n3));
  }
  // cross-attention branch
  Grads grads;
  Matrix<T> d_self = d_cross;
  {
    const Matrix<T> d_ca = through_mask(d_cross, cache.mask2);
    auto g = cross_attn_.backward(cache.cross_attn, d_ca);
    numkit::axpy(d_self, ln2_.backward(cache.ln2, g.d_query));
    grads.d_memory = std::move(g.d_memory);
  }
  // self-attention branch; query and memory are the same normalized input
  grads.d_x = d_self;
  {
    const Matrix<T> d_sa = through_mask(d_self, cache.mask1);
    auto g = self_attn_.backward(cache.self_attn, d_sa);
    const Matrix<T> d_n1 = numkit::add(g.d_query, g.d_memory);
    numkit::axpy(grads.d_x, ln1_.backward(cache.ln1, d_n1));
  }
  return grads;
}

template <typename T>
void FusionLayer<T>::zero_output_projections() {
  self_attn_.output_projection().value.fill(T{0});
  cross_attn_.output_projection().value.fill(T{0});
  ffn_.output_weight().value.fill(T{0});
  ffn_.output_bias().value.fill(T{0});
}

// TransDecoder --------------------------------------------------------------

template <typename T>
TransDecoder<T>::TransDecoder(ParamStore<T>& store, const std::string& prefix,
                              const ModelConfig& config) {
  layers_.reserve(config.decoder_layers);
  for (std::size_t i = 0; i < config.decoder_layers; ++i) {
    layers_.emplace_back(store, prefix + "." + std::to_string(i), config);
  }
}

template <typename T>
Matrix<T> TransDecoder<T>::forward(const Matrix<T>& x_c, const Matrix<T>& x_vis, Mode mode,
                                   numkit::Rng* rng, Cache* cache) const {
  if (cache != nullptr) cache->layers.assign(layers_.size(), {});
  Matrix<T> x = x_c;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].forward(x, x_vis, mode, rng, cache != nullptr ? &cache->layers[i] : nullptr);
  }
  return x;
}

template <typename T>
typename TransDecoder<T>::Grads TransDecoder<T>::backward(const Cache& cache,
                                                          const Matrix<T>& d_out) {
  Grads total;
  Matrix<T> d = d_out;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    auto g = layers_[i].backward(cache.layers[i], d);
    d = std::move(g.d_x);
    if (total.d_memory.empty()) {
      total.d_memory = std::move(g.d_memory);
    } else {
      numkit::axpy(total.d_memory, g.d_memory);
    }
  }
  total.d_x = std::move(d);
  return total;
}

// fuse_mix --------------------------------------------------------------------

template <typename T>
Matrix<T> fuse_mix(const Matrix<T>& x_fused, const Matrix<T>& x_ctd) {
  if (x_fused.cols() != x_ctd.cols()) {
    throw DimensionError("fuse_mix: widths differ, " + x_fused.shape_string() + " and " +
                         x_ctd.shape_string());
  }
  return numkit::add_row_broadcast(x_fused, numkit::mean_rows(x_ctd));
}

template <typename T>
FuseMixGrads<T> fuse_mix_backward(const Matrix<T>& d_mix, std::size_t ctd_rows) {
  FuseMixGrads<T> g;
  g.d_fused = d_mix;
  const Matrix<T> col = numkit::col_sum(d_mix);
  g.d_ctd = Matrix<T>(ctd_rows, d_mix.cols());
  const T inv = T{1} / static_cast<T>(ctd_rows);
  for (std::size_t i = 0; i < ctd_rows; ++i)
    for (std::size_t j = 0; j < d_mix.cols(); ++j) g.d_ctd(i, j) = col(0, j) * inv;
  return g;
}

template class PositionalEmbedding<float>;
template class PositionalEmbedding<double>;
template class FusionLayer<float>;
template class FusionLayer<double>;
template class TransDecoder<float>;
template class TransDecoder<double>;
template Matrix<float> fuse_mix(const Matrix<float>&, const Matrix<float>&);
template Matrix<double> fuse_mix(const Matrix<double>&, const Matrix<double>&);
template FuseMixGrads<float> fuse_mix_backward(const Matrix<float>&, std::size_t);
template FuseMixGrads<double> fuse_mix_backward(const Matrix<double>&, std::size_t);

}  // namespace fiq::fiqnet
