// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstdint>
#include <vector>

#include "fiq/encoders/features.hpp"
#include "fiq/fiqnet/config.hpp"
#include "fiq/qagen/records.hpp"
#include "fiq/trainer/config.hpp"

namespace fiq::acceptance {

/// A small synthetic multi-choice set with a network and schedule sized so
/// the set can be memorized on a laptop.
struct OverfitFixture {
  std::vector<qagen::QARecord> records;
  encoders::SyntheticSettings features;
  fiqnet::ModelConfig model;
  trainer::TrainConfig train;
};

/// `count` records over count/4 videos, tasks cycling B F R C I A, answer
/// positions drawn from the seed, four distinct options per record.
OverfitFixture overfit_fixture(std::size_t count = 32, std::uint64_t seed = 1);

/// Descriptions used by the generation checks: traffic scenes with counts,
/// existence statements, locations and a few long sentences.
std::vector<qagen::Description> generation_fixture();

}  // namespace fiq::acceptance
