// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/fiqnet/model.hpp"

#include <sstream>

namespace fiq::fiqnet {

void ModelConfig::validate() const {
  if (dim == 0) throw ConfigError("model.dim must be positive");
  if (heads == 0 || dim % heads != 0) {
    throw ConfigError("model.dim (" + std::to_string(dim) + ") must be divisible by model.heads (" +
                      std::to_string(heads) + ")");
  }
  if (frames() == 0) throw ConfigError("model.clips * model.frames_per_clip must be positive");
  if (frames() > max_frames) {
    throw ConfigError("model.clips * model.frames_per_clip (" + std::to_string(frames()) +
                      ") exceeds model.max_frames (" + std::to_string(max_frames) + ")");
  }
  if (ffn_multiplier == 0) throw ConfigError("model.ffn_multiplier must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("model.dropout must be in [0, 1)");
  if (!(ln_eps > 0.0)) throw ConfigError("model.ln_eps must be positive");
}

std::string ModelConfig::canonical() const {
  std::ostringstream out;
  out.precision(17);
  out << "dim=" << dim << ";heads=" << heads << ";clips=" << clips
      << ";frames_per_clip=" << frames_per_clip << ";max_frames=" << max_frames
      << ";decoder_layers=" << decoder_layers << ";ffn_multiplier=" << ffn_multiplier
      << ";dropout=" << dropout << ";ln_eps=" << ln_eps << ";";
  return out.str();
}

ModelConfig ModelConfig::toy() {
  ModelConfig c;
  c.dim = 8;
  c.heads = 2;
  c.clips = 1;
  c.frames_per_clip = 4;
  c.max_frames = 4;
  c.decoder_layers = 2;
  return c;
}

template <typename T>
FiqNet<T>::FiqNet(const ModelConfig& config, ParamStore<T>& store)
    : config_((config.validate(), config)),
      positional_(store, "pos.e_pos", config.max_frames, config.dim),
      align_(store, "vq", config),
      decoder_(store, "td", config),
      head_(store, "head", config.dim) {}

template <typename T>
std::array<T, kOptionCount> FiqNet<T>::score_candidates(const ScoringInputs<T>& inputs, Mode mode,
                                                        numkit::Rng* rng, Cache* cache) const {
  if (inputs.candidates.size() != kOptionCount) {
    throw FormatError("options", "expected " + std::to_string(kOptionCount) +
                                     " candidates, got " + std::to_string(inputs.candidates.size()));
  }
  if (inputs.video == nullptr || inputs.question == nullptr) {
    throw ConfigError("score_candidates: missing video or question features");
  }
  const bool drop = mode == Mode::kTrain && config_.dropout > 0.0;
  if (drop && rng == nullptr) throw ConfigError("train-mode forward requires an rng");

  Cache local;
  Cache& c = cache != nullptr ? *cache : local;

  c.x_vpe = positional_.forward(*inputs.video);
  if (drop) {
    c.pos_mask = numkit::dropout_mask<T>(c.x_vpe.rows(), c.x_vpe.cols(), config_.dropout, *rng);
    c.x_vpe = numkit::hadamard(c.x_vpe, c.pos_mask);
  } else {
    c.pos_mask = Matrix<T>();
  }
  c.x_fused = align_.forward(c.x_vpe, *inputs.question, mode, rng, &c.align);

  std::array<T, kOptionCount> scores{};
  for (std::size_t i = 0; i < kOptionCount; ++i) {
    const Matrix<T>* cand = inputs.candidates[i];
    if (cand == nullptr) throw ConfigError("score_candidates: missing candidate features");
    c.x_ctd[i] = decoder_.forward(*cand, *inputs.video, mode, rng, &c.decoder[i]);
    const Matrix<T> x_mix = fuse_mix(c.x_fused, c.x_ctd[i]);
    scores[i] = head_.forward(x_mix, &c.head[i]);
  }
  return scores;
}

template <typename T>
void FiqNet<T>::backward(const Cache& cache, std::span<const T, kOptionCount> d_scores) {
  Matrix<T> d_fused(cache.x_fused.rows(), cache.x_fused.cols());
  for (std::size_t i = 0; i < kOptionCount; ++i) {
    const Matrix<T> d_mix = head_.backward(cache.head[i], d_scores[i]);
    auto g = fuse_mix_backward(d_mix, cache.x_ctd[i].rows());
    numkit::axpy(d_fused, g.d_fused);
    decoder_.backward(cache.decoder[i], g.d_ctd);
  }
  auto g = align_.backward(cache.align, d_fused);
  Matrix<T> d_vpe = std::move(g.d_x);
  if (!cache.pos_mask.empty()) d_vpe = numkit::hadamard(d_vpe, cache.pos_mask);
  positional_.backward(d_vpe);
}

template <typename T>
void declare_parameters(const ModelConfig& config, ParamStore<T>& store) {
  FiqNet<T> net(config, store);
  (void)net;
}

template class FiqNet<float>;
template class FiqNet<double>;
template void declare_parameters(const ModelConfig&, ParamStore<float>&);
template void declare_parameters(const ModelConfig&, ParamStore<double>&);

}  // namespace fiq::fiqnet
