// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "fiq/encoders/feature_file.hpp"

namespace fiq::encoders {

struct VideoFeatures {
  std::string video_id;
  MatrixF frames;  // N x D
};

struct TextFeatures {
  std::string text;
  MatrixF tokens;  // T x D, 1 <= T <= 77
};

/// Token standing in for the empty string.
inline constexpr std::string_view kEmptyTextToken = "<empty>";

/// Per-token embedding from a seeded hash of (token, position), expanded to
/// D values in [-1, 1) with integer arithmetic only. The text is cut at the
/// proxy-token limit; empty text encodes kEmptyTextToken.
TextFeatures synthetic_text_encoder(std::string_view text, std::size_t dim,
                                    std::uint64_t seed = 0);

/// Frame t is a seeded hash of (video_id, t), expanded like text tokens.
VideoFeatures synthetic_video_encoder(std::string_view video_id, std::size_t frames,
                                      std::size_t dim, std::uint64_t seed = 0);

/// Source of features for the trainer.
class FeatureSource {
 public:
  virtual ~FeatureSource() = default;
  virtual bool has_video(const std::string& video_id) const = 0;
  virtual bool has_text(const std::string& text) const = 0;
  virtual VideoFeatures video(const std::string& video_id) const = 0;
  virtual TextFeatures text(const std::string& text) const = 0;
};

struct SyntheticSettings {
  std::uint64_t seed = 0;
  std::size_t frames = 128;
  std::size_t dim = 512;
};

class SyntheticSource final : public FeatureSource {
 public:
  explicit SyntheticSource(SyntheticSettings settings) : settings_(settings) {}

  bool has_video(const std::string&) const override { return true; }
  bool has_text(const std::string&) const override { return true; }
  VideoFeatures video(const std::string& video_id) const override;
  TextFeatures text(const std::string& text) const override;

 private:
  SyntheticSettings settings_;
};

/// Feature files under `<root>/video/<video_id>.fiqf` and
/// `<root>/text/<sha1(text) hex>.fiqf`. Loads are read-only.
class FeatureStore final : public FeatureSource {
 public:
  explicit FeatureStore(std::string root) : root_(std::move(root)) {}

  const std::string& root() const noexcept { return root_; }

  /// Throws ConfigError for ids that are empty or would escape the
  /// video directory.
  std::string video_path(const std::string& video_id) const;
  std::string text_path(const std::string& text) const;

  bool has_video(const std::string& video_id) const override;
  bool has_text(const std::string& text) const override;
  /// Throws FormatError("id") when the stored id differs from the request.
  VideoFeatures video(const std::string& video_id) const override;
  TextFeatures text(const std::string& text) const override;

  void put_video(const VideoFeatures& features) const;
  void put_text(const TextFeatures& features) const;

 private:
  std::string root_;
};

/// Lowercase hex SHA-1 of the UTF-8 bytes.
std::string sha1_hex(std::string_view bytes);

}  // namespace fiq::encoders
