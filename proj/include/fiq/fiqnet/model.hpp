// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fiq/fiqnet/config.hpp"
#include "fiq/fiqnet/fusion.hpp"
#include "fiq/fiqnet/scoring.hpp"

namespace fiq::fiqnet {

inline constexpr std::size_t kOptionCount = 4;

template <typename T>
struct ScoringInputs {
  const Matrix<T>* video = nullptr;     // x_vis, N x D
  const Matrix<T>* question = nullptr;  // x_q, T_q x D
  std::vector<const Matrix<T>*> candidates;  // x_c per option, T_i x D
};

/// The full scoring network. The parameter layout is declared in (or bound
/// from) `store`, which must outlive the network and must not be copied
/// while the network is in use.
///
/// Per question: x_vpe = x_vis + e_pos, x_fused = VQCAlign(x_vpe, x_q).
/// Per candidate: x_ctd = TransDecoder(x_c, x_vis), x_mix = fuse_mix,
/// score = ScoringHead(x_mix).
template <typename T>
class FiqNet {
 public:
  struct Cache {
    Matrix<T> x_vpe;
    Matrix<T> pos_mask;
    typename VQCAlign<T>::Cache align;
    Matrix<T> x_fused;
    std::array<typename TransDecoder<T>::Cache, kOptionCount> decoder;
    std::array<Matrix<T>, kOptionCount> x_ctd;
    std::array<typename ScoringHead<T>::Cache, kOptionCount> head;
  };

  FiqNet(const ModelConfig& config, ParamStore<T>& store);

  /// Returns one pre-softmax logit per candidate. Throws FormatError when
  /// the candidate count is not 4.
  std::array<T, kOptionCount> score_candidates(const ScoringInputs<T>& inputs, Mode mode,
                                               numkit::Rng* rng, Cache* cache) const;

  /// Accumulates parameter gradients for upstream d(scores).
  void backward(const Cache& cache, std::span<const T, kOptionCount> d_scores);

  const ModelConfig& config() const noexcept { return config_; }
  PositionalEmbedding<T>& positional() noexcept { return positional_; }
  VQCAlign<T>& align() noexcept { return align_; }
  TransDecoder<T>& decoder() noexcept { return decoder_; }
  ScoringHead<T>& head() noexcept { return head_; }

 private:
  ModelConfig config_;
  PositionalEmbedding<T> positional_;
  VQCAlign<T> align_;
  TransDecoder<T> decoder_;
  ScoringHead<T> head_;
};

/// Declares every parameter of the network in `store` (declaration order
/// is the checkpoint and initialization order).
template <typename T>
void declare_parameters(const ModelConfig& config, ParamStore<T>& store);

}  // namespace fiq::fiqnet
