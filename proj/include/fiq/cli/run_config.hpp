// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fiq/encoders/features.hpp"
#include "fiq/fiqnet/config.hpp"
#include "fiq/qagen/lm_client.hpp"
#include "fiq/qagen/pipeline.hpp"
#include "fiq/trainer/config.hpp"

namespace fiq::cli {

struct PathsConfig {
  std::string descriptions;   // description JSONL (gen-qa input)
  std::string dataset;        // QA records JSONL (train/eval/validate input)
  std::string original;       // QA records for merge
  std::string generated;      // gen-qa output, merge input
  std::string merged;         // merge output
  std::string feature_root;   // FeatureStore root
  std::string checkpoint;     // checkpoint directory
  std::string train_log;      // per-epoch JSONL
  std::string skip_report;    // gen-qa skip JSONL
  std::string eval_dataset;   // optional held-out records scored each epoch
};

enum class FeatureSourceKind { kStore, kSynthetic };

struct FeaturesConfig {
  FeatureSourceKind source = FeatureSourceKind::kStore;
  std::uint64_t seed = 0;  // synthetic encoders
};

struct RunConfig {
  PathsConfig paths;
  qagen::LmSettings lm;
  qagen::GenQaOptions qagen;
  fiqnet::ModelConfig model;
  trainer::TrainConfig train;
  FeaturesConfig features;
  std::uint64_t seed = 0;
  bool checked_mode = false;

  /// Applies `seed` to qagen, train and synthetic features.
  void set_seed(std::uint64_t s);
  encoders::SyntheticSettings synthetic_settings() const;
};

/// Parses an INI file (sections paths, lm, qagen, model, train, features,
/// run). Unknown sections or keys raise ConfigError naming them; relative
/// paths resolve against the file's directory.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& ini_text, const std::string& base_dir = ".");

/// Throws ConfigError when a required path is unset or does not exist.
void require_input(const std::string& path, const std::string& key);

}  // namespace fiq::cli
