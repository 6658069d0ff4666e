// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fiq/fiqnet/config.hpp"
#include "fiq/numkit/grad_check.hpp"

namespace fiq::fiqnet {

struct GradientSuiteOptions {
  ModelConfig config = ModelConfig::toy();
  std::size_t frames = 4;             // N
  std::size_t question_tokens = 5;    // T for x_q
  std::size_t candidate_tokens = 5;   // T for each x_c
  std::uint64_t seed = 7;
  double step = 1e-4;
  /// Train mode runs with dropout active; masks are redrawn from the same
  /// seed on every evaluation so the objective stays deterministic.
  Mode mode = Mode::kTrain;
  /// Negative control: adds 1.0 to the first analytic gradient entry of
  /// this parameter before comparison. Empty disables.
  std::string corrupt_param;
};

struct BlockCheckResult {
  std::string block;
  numkit::GradCheckReport report;
  double seconds = 0.0;
};

/// Blocks covered by the suite, in run order: layer_norm, self_attention,
/// cross_attention, feed_forward, scoring_head, trans_decoder_layer,
/// vq_calign, full_model.
const std::vector<std::string>& gradient_suite_blocks();

/// Central-difference check of one block in 64-bit. Block-level objectives
/// are <output, R> for a fixed random R and include input gradients as
/// pseudo-parameters named "input.*"; the full model uses softmax
/// cross-entropy over the four candidate scores.
BlockCheckResult check_block(const std::string& block, const GradientSuiteOptions& options);

std::vector<BlockCheckResult> run_gradient_suite(const GradientSuiteOptions& options);

}  // namespace fiq::fiqnet
