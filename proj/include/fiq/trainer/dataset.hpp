// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <array>
#include <memory>
#include <vector>

#include "fiq/encoders/features.hpp"
#include "fiq/fiqnet/config.hpp"
#include "fiq/qagen/records.hpp"

namespace fiq::trainer {

/// A record with its features resolved. Matrices are shared between
/// examples that reference the same video or text.
struct Example {
  qagen::QARecord record;
  std::shared_ptr<const numkit::MatrixF> video;     // N x D
  std::shared_ptr<const numkit::MatrixF> question;  // T_q x D
  std::array<std::shared_ptr<const numkit::MatrixF>, qagen::kOptionCount> options;
};

/// Resolves every record before returning. Records whose video, question or
/// option features are unavailable are collected and reported together in
/// a MissingFeaturesError (in input order). Feature shapes are checked
/// against the model config (DimensionError naming the record).
std::vector<Example> resolve_examples(const std::vector<qagen::QARecord>& records,
                                      const encoders::FeatureSource& source,
                                      const fiqnet::ModelConfig& config);

}  // namespace fiq::trainer
