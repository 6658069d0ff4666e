// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "fiq/fiqnet/config.hpp"
#include "fiq/numkit/param.hpp"

namespace fiq::fiqnet {

inline constexpr int kCheckpointVersion = 1;

/// A checkpoint directory:
///
///   manifest.json            names, shapes, files, model config and its hash
///   params/<name>.value.fiqf
///   params/<name>.ema.fiqf
///   extras/<key>.fiqf        optimizer state and other named matrices
struct Checkpoint {
  ModelConfig config;
  numkit::ParamStore<float> params;
  std::map<std::string, numkit::MatrixF> extras;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
};

/// SHA-1 hex of ModelConfig::canonical().
std::string config_hash(const ModelConfig& config);

nlohmann::ordered_json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const nlohmann::ordered_json& j);

/// Writes the directory, replacing any previous contents of its params/
/// and extras/ subdirectories. Output bytes depend only on the inputs.
void save_checkpoint(const std::string& dir, const Checkpoint& checkpoint);

/// Loads and verifies every file. Throws FormatError for a malformed
/// manifest or feature file and ConfigError when the stored hash does not
/// match the stored config.
Checkpoint load_checkpoint(const std::string& dir);

/// Copies values and EMA shadows into `store` by name. Throws ConfigError
/// when the config hashes differ or a parameter is missing, DimensionError
/// on a shape mismatch.
void restore_parameters(const Checkpoint& checkpoint, const ModelConfig& expected,
                        numkit::ParamStore<float>& store);

}  // namespace fiq::fiqnet
