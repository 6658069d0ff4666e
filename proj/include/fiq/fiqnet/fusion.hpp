// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fiq/fiqnet/config.hpp"
#include "fiq/fiqnet/layers.hpp"
#include "fiq/numkit/rng.hpp"

namespace fiq::fiqnet {

/// Learnable frame positions: x_vpe = x_vis + e_pos[0..N).
template <typename T>
class PositionalEmbedding {
 public:
  PositionalEmbedding(ParamStore<T>& store, const std::string& name, std::size_t max_frames,
                      std::size_t dim);

  Matrix<T> forward(const Matrix<T>& x_vis) const;
  /// Accumulates d_out into the first rows of e_pos.
  void backward(const Matrix<T>& d_out);

  std::size_t capacity() const noexcept { return table_->rows(); }
  Param<T>& table() noexcept { return *table_; }

 private:
  Param<T>* table_;
};

/// Pre-norm sublayer stack shared by VQ-CAlign and each Trans-Decoder
/// layer:
///   s = x + Drop(SelfAttn(LN1(x)))
///   c = s + Drop(CrossAttn(LN2(s), memory))
///   y = c + Drop(FFN(LN3(c)))
/// With zero output projections the block is the identity on x.
template <typename T>
class FusionLayer {
 public:
  struct Cache {
    typename LayerNorm<T>::Cache ln1, ln2, ln3;
    typename MultiHeadAttention<T>::Cache self_attn, cross_attn;
    typename FeedForward<T>::Cache ffn;
    Matrix<T> mask1, mask2, mask3;  // empty in eval mode
    Matrix<T> after_self;   // s
    Matrix<T> after_cross;  // c
  };
  struct Grads {
    Matrix<T> d_x;
    Matrix<T> d_memory;
  };

  FusionLayer(ParamStore<T>& store, const std::string& prefix, const ModelConfig& config);

  /// rng is required in train mode when dropout is nonzero.
  Matrix<T> forward(const Matrix<T>& x, const Matrix<T>& memory, Mode mode, numkit::Rng* rng,
                    Cache* cache) const;
  Grads backward(const Cache& cache, const Matrix<T>& d_out);

  MultiHeadAttention<T>& self_attention() noexcept { return self_attn_; }
  MultiHeadAttention<T>& cross_attention() noexcept { return cross_attn_; }
  FeedForward<T>& feed_forward() noexcept { return ffn_; }

  /// Zeroes W_o of both attentions and the FFN output weight and bias.
  void zero_output_projections();

 private:
  LayerNorm<T> ln1_, ln2_, ln3_;
  MultiHeadAttention<T> self_attn_;
  MultiHeadAttention<T> cross_attn_;
  FeedForward<T> ffn_;
  std::size_t dim_;
  double dropout_;
};

/// x_fused = VQ-CAlign(x_vpe, x_q): frames attend to themselves, then to
/// question tokens, then pass through the FFN.
template <typename T>
class VQCAlign {
 public:
  using Cache = typename FusionLayer<T>::Cache;
  using Grads = typename FusionLayer<T>::Grads;

  VQCAlign(ParamStore<T>& store, const std::string& prefix, const ModelConfig& config)
      : layer_(store, prefix, config) {}

  Matrix<T> forward(const Matrix<T>& x_vpe, const Matrix<T>& x_q, Mode mode, numkit::Rng* rng,
                    Cache* cache) const {
    return layer_.forward(x_vpe, x_q, mode, rng, cache);
  }
  Grads backward(const Cache& cache, const Matrix<T>& d_out) { return layer_.backward(cache, d_out); }

  FusionLayer<T>& layer() noexcept { return layer_; }

 private:
  FusionLayer<T> layer_;
};

/// x_ctd = TransDecoder(x_c, x_vis): candidate tokens attend to themselves
/// and then to the video frames, repeated config.decoder_layers times.
template <typename T>
class TransDecoder {
 public:
  struct Cache {
    std::vector<typename FusionLayer<T>::Cache> layers;
  };
  using Grads = typename FusionLayer<T>::Grads;

  TransDecoder(ParamStore<T>& store, const std::string& prefix, const ModelConfig& config);

  Matrix<T> forward(const Matrix<T>& x_c, const Matrix<T>& x_vis, Mode mode, numkit::Rng* rng,
                    Cache* cache) const;
  Grads backward(const Cache& cache, const Matrix<T>& d_out);

  std::vector<FusionLayer<T>>& layers() noexcept { return layers_; }

 private:
  std::vector<FusionLayer<T>> layers_;
};

/// x_mix = x_fused + broadcast(mean over tokens of x_ctd).
template <typename T>
Matrix<T> fuse_mix(const Matrix<T>& x_fused, const Matrix<T>& x_ctd);

template <typename T>
struct FuseMixGrads {
  Matrix<T> d_fused;
  Matrix<T> d_ctd;
};

template <typename T>
FuseMixGrads<T> fuse_mix_backward(const Matrix<T>& d_mix, std::size_t ctd_rows);

}  // namespace fiq::fiqnet
