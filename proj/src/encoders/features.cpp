// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/encoders/features.hpp"

#include <openssl/sha.h>

#include <filesystem>

#include "fiq/error.hpp"
#include "fiq/numkit/rng.hpp"
#include "fiq/qagen/text.hpp"

namespace fiq::encoders {
namespace {

constexpr std::uint64_t kTextDomain = 0x7465787400000000ull;   // "text"
constexpr std::uint64_t kVideoDomain = 0x766964656f000000ull;  // "video"

// 24 high bits of a splitmix64 stream mapped to k / 2^23 - 1, exact in f32.
void expand(std::uint64_t key, std::span<float> out) {
  std::uint64_t state = key;
  for (auto& v : out) {
    const std::uint64_t bits = numkit::splitmix64(state) >> 40;
    v = static_cast<float>(static_cast<std::int64_t>(bits) - (1 << 23)) * 0x1.0p-23f;
  }
}

}  // namespace

TextFeatures synthetic_text_encoder(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ConfigError("synthetic text encoder needs dim >= 1");
  auto tokens = qagen::proxy_tokenize(text);
  if (tokens.size() > qagen::kTokenLimit) tokens.resize(qagen::kTokenLimit);
  if (tokens.empty()) tokens.emplace_back(kEmptyTextToken);
  TextFeatures f{std::string(text), MatrixF(tokens.size(), dim)};
  const std::uint64_t base = numkit::hash_combine(seed, kTextDomain);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto key = numkit::hash_combine(numkit::hash_combine(base, numkit::fnv1a64(tokens[t])), t);
    expand(key, f.tokens.row(t));
  }
  return f;
}

VideoFeatures synthetic_video_encoder(std::string_view video_id, std::size_t frames,
                                      std::size_t dim, std::uint64_t seed) {
  if (frames == 0 || dim == 0) throw ConfigError("synthetic video encoder needs N, D >= 1");
  VideoFeatures f{std::string(video_id), MatrixF(frames, dim)};
  const std::uint64_t base =
      numkit::hash_combine(numkit::hash_combine(seed, kVideoDomain), numkit::fnv1a64(video_id));
  for (std::size_t t = 0; t < frames; ++t) expand(numkit::hash_combine(base, t), f.frames.row(t));
  return f;
}

VideoFeatures SyntheticSource::video(const std::string& video_id) const {
  return synthetic_video_encoder(video_id, settings_.frames, settings_.dim, settings_.seed);
}

TextFeatures SyntheticSource::text(const std::string& text) const {
  return synthetic_text_encoder(text, settings_.dim, settings_.seed);
}

std::string sha1_hex(std::string_view bytes) {
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * SHA_DIGEST_LENGTH);
  for (unsigned char b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

std::string FeatureStore::video_path(const std::string& video_id) const {
  if (video_id.empty() || video_id == "." || video_id == ".." ||
      video_id.find_first_of("/\\") != std::string::npos || video_id.find('\0') != std::string::npos) {
    throw ConfigError("video id '" + video_id + "' is not usable as a file name");
  }
  return (std::filesystem::path(root_) / "video" / (video_id + ".fiqf")).string();
}

std::string FeatureStore::text_path(const std::string& text) const {
  return (std::filesystem::path(root_) / "text" / (sha1_hex(text) + ".fiqf")).string();
}

bool FeatureStore::has_video(const std::string& video_id) const {
  return std::filesystem::is_regular_file(video_path(video_id));
}

bool FeatureStore::has_text(const std::string& text) const {
  return std::filesystem::is_regular_file(text_path(text));
}

VideoFeatures FeatureStore::video(const std::string& video_id) const {
  auto blob = load_feature_file(video_path(video_id));
  if (blob.id != video_id) {
    throw FormatError("id", "feature file for '" + video_id + "' carries id '" + blob.id + "'");
  }
  return {video_id, std::move(blob.matrix)};
}

TextFeatures FeatureStore::text(const std::string& text) const {
  auto blob = load_feature_file(text_path(text));
  if (blob.id != text) {
    throw FormatError("id", "feature file for text digest " + sha1_hex(text) + " carries other text");
  }
  if (blob.matrix.rows() == 0 || blob.matrix.rows() > qagen::kTokenLimit) {
    throw FormatError("rows", "text features must have 1..77 rows, got " +
                                  std::to_string(blob.matrix.rows()));
  }
  return {text, std::move(blob.matrix)};
}

void FeatureStore::put_video(const VideoFeatures& features) const {
  save_feature_file(video_path(features.video_id), features.video_id, features.frames);
}

void FeatureStore::put_text(const TextFeatures& features) const {
  save_feature_file(text_path(features.text), features.text, features.tokens);
}

}  // namespace fiq::encoders
