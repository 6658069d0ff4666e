// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <string>

namespace fiq::fiqnet {

enum class Mode { kTrain, kEval };

struct ModelConfig {
  std::size_t dim = 512;
  std::size_t heads = 16;
  std::size_t clips = 8;
  std::size_t frames_per_clip = 16;
  /// Rows of the learnable positional embedding (maximum sequence length).
  std::size_t max_frames = 128;
  std::size_t decoder_layers = 2;
  std::size_t ffn_multiplier = 4;
  double dropout = 0.2;
  double ln_eps = 1e-5;

  std::size_t frames() const noexcept { return clips * frames_per_clip; }
  std::size_t head_dim() const noexcept { return dim / heads; }

  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  /// Canonical "key=value;" rendering used for checkpoint config hashes.
  std::string canonical() const;

  /// N=4 frames, D=8, H=2: the shapes used by gradient checks.
  static ModelConfig toy();
};

}  // namespace fiq::fiqnet
