// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "fiq/encoders/feature_file.hpp"
#include "fiq/encoders/features.hpp"
#include "fiq/error.hpp"
#include "fiq/numkit/rng.hpp"

using namespace fiq;
using namespace fiq::encoders;

namespace {

MatrixF random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  numkit::Rng rng(seed);
  MatrixF m(rows, cols);
  for (auto& v : m.data()) v = static_cast<float>(rng.uniform(-10.0, 10.0));
  return m;
}

bool bitwise_equal(const MatrixF& a, const MatrixF& b) {
  if (!a.same_shape(b)) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

std::string field_of(const std::string& bytes) {
  try {
    decode_feature_file(bytes);
  } catch (const FormatError& e) {
    return e.field();
  }
  return "";
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("fiq_enc_" + std::to_string(numkit::Rng(reinterpret_cast<std::uintptr_t>(this))()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST(Crc32, StandardCheckValue) {
  EXPECT_EQ(crc32_bytes("123456789"), 0xCBF43926u);
  EXPECT_EQ(crc32_bytes(""), 0u);
}

TEST(FeatureFile, HandBuiltLayout) {
  const auto m = MatrixF::from_rows({{1.0f, -2.0f}});
  const std::string bytes = encode_feature_file("ab", m);
  const std::string payload("\x00\x00\x80\x3f\x00\x00\x00\xc0", 8);
  std::string expected("FIQF", 4);
  expected += std::string("\x01\x00", 2);          // version
  expected += std::string("\x00", 1);              // dtype
  expected += std::string("\x01\x00\x00\x00", 4);  // rows
  expected += std::string("\x02\x00\x00\x00", 4);  // cols
  expected += std::string("\x02\x00", 2);          // id_len
  expected += "ab" + payload;
  const auto crc = crc32_bytes(payload);
  for (int i = 0; i < 4; ++i) expected.push_back(static_cast<char>((crc >> (8 * i)) & 0xff));
  EXPECT_EQ(bytes, expected);
}

TEST(FeatureFile, RoundTripIsBitExact) {
  const auto m = random_matrix(128, 512, 5);
  const auto blob = decode_feature_file(encode_feature_file("video_0001", m));
  EXPECT_EQ(blob.id, "video_0001");
  EXPECT_TRUE(bitwise_equal(blob.matrix, m));
}

TEST(FeatureFile, RoundTripKeepsSpecialValues) {
  MatrixF m(1, 6);
  m(0, 0) = -0.0f;
  m(0, 1) = std::numeric_limits<float>::denorm_min();
  m(0, 2) = std::numeric_limits<float>::max();
  m(0, 3) = std::numeric_limits<float>::lowest();
  m(0, 4) = std::numeric_limits<float>::epsilon();
  m(0, 5) = 1.0f / 3.0f;
  EXPECT_TRUE(bitwise_equal(decode_feature_file(encode_feature_file("", m)).matrix, m));
  const auto empty = decode_feature_file(encode_feature_file("z", MatrixF(0, 7)));
  EXPECT_EQ(empty.matrix.rows(), 0u);
  EXPECT_EQ(empty.matrix.cols(), 7u);
}

TEST(FeatureFile, TruncationIsAlwaysDetected) {
  const std::string bytes = encode_feature_file("id", random_matrix(3, 4, 1));
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    EXPECT_THROW(decode_feature_file(bytes.substr(0, len)), FormatError) << len;
  }
  const std::size_t payload_end = kFeatureHeaderSize + 2 + 4 * 12;
  EXPECT_EQ(field_of(bytes.substr(0, payload_end - 1)), "payload");
  EXPECT_EQ(field_of(bytes.substr(0, 3)), "magic");
}

TEST(FeatureFile, HeaderFieldsNamed) {
  const std::string good = encode_feature_file("id", random_matrix(2, 2, 2));
  std::string b = good;
  b[0] = 'X';
  EXPECT_EQ(field_of(b), "magic");
  b = good;
  b[4] = 2;
  EXPECT_EQ(field_of(b), "version");
  b = good;
  b[6] = 1;
  EXPECT_EQ(field_of(b), "dtype");
  b = good;
  b[kFeatureHeaderSize + 2 + 5] ^= 0x10;
  EXPECT_EQ(field_of(b), "checksum");
  b = good;
  b[b.size() - 1] ^= 0x01;
  EXPECT_EQ(field_of(b), "checksum");
  EXPECT_EQ(field_of(good + "x"), "trailing");
  EXPECT_EQ(field_of(good), "");
}

TEST(FeatureFile, SaveAndLoadFromDisk) {
  TempDir dir;
  const auto m = random_matrix(4, 3, 9);
  const std::string path = dir.str() + "/nested/a.fiqf";
  save_feature_file(path, "a", m);
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  const auto blob = load_feature_file(path);
  EXPECT_TRUE(bitwise_equal(blob.matrix, m));
  EXPECT_THROW(load_feature_file(dir.str() + "/missing.fiqf"), ConfigError);
}

TEST(SyntheticText, DeterministicAndPositionDependent) {
  const auto a = synthetic_text_encoder("a red car", 16, 3);
  EXPECT_EQ(a.tokens, synthetic_text_encoder("a red car", 16, 3).tokens);
  EXPECT_EQ(a.tokens.rows(), 3u);
  EXPECT_NE(synthetic_text_encoder("a b", 16).tokens, synthetic_text_encoder("b a", 16).tokens);
  EXPECT_NE(a.tokens, synthetic_text_encoder("a red car", 16, 4).tokens);
  // same token at the same position encodes the same row
  const auto b = synthetic_text_encoder("a blue truck", 16, 3);
  EXPECT_EQ(std::vector<float>(a.tokens.row(0).begin(), a.tokens.row(0).end()),
            std::vector<float>(b.tokens.row(0).begin(), b.tokens.row(0).end()));
}

TEST(SyntheticText, CappedAtTokenLimit) {
  std::string text;
  for (int i = 0; i < 100; ++i) text += "w" + std::to_string(i) + " ";
  const auto f = synthetic_text_encoder(text, 8);
  EXPECT_EQ(f.tokens.rows(), 77u);
}

TEST(SyntheticText, EmptyTextIsOneSpecialToken) {
  const auto f = synthetic_text_encoder("", 8);
  EXPECT_EQ(f.tokens.rows(), 1u);
  EXPECT_EQ(f.tokens, synthetic_text_encoder("   ", 8).tokens);
  EXPECT_THROW(synthetic_text_encoder("x", 0), ConfigError);
}

TEST(SyntheticText, ValuesOnTheDyadicGrid) {
  const auto f = synthetic_text_encoder("grid check of values", 64, 1);
  for (float v : f.tokens.data()) {
    EXPECT_GE(v, -1.0f);
    EXPECT_LT(v, 1.0f);
    const double scaled = static_cast<double>(v) * 8388608.0;
    EXPECT_EQ(scaled, std::floor(scaled));
  }
}

TEST(SyntheticVideo, ShapeAndFrameDependence) {
  const auto f = synthetic_video_encoder("vid", 128, 512);
  EXPECT_EQ(f.frames.rows(), 128u);
  EXPECT_EQ(f.frames.cols(), 512u);
  for (std::size_t t = 0; t + 1 < 128; ++t) {
    EXPECT_FALSE(std::equal(f.frames.row(t).begin(), f.frames.row(t).end(),
                            f.frames.row(t + 1).begin()));
  }
  EXPECT_EQ(f.frames, synthetic_video_encoder("vid", 128, 512).frames);
  EXPECT_THROW(synthetic_video_encoder("vid", 0, 4), ConfigError);
}

TEST(SyntheticVideo, NoCollisionsOverThousandIds) {
  std::set<std::vector<float>> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto f = synthetic_video_encoder("video_" + std::to_string(i), 4, 16);
    std::vector<float> flat(f.frames.data().begin(), f.frames.data().end());
    EXPECT_TRUE(seen.insert(flat).second) << i;
  }
}

TEST(FeatureStore, LayoutAndRoundTrip) {
  TempDir dir;
  FeatureStore store(dir.str());
  EXPECT_EQ(store.text_path("abc"),
            dir.str() + "/text/a9993e364706816aba3e25717850c26c9cd0d89d.fiqf");
  EXPECT_EQ(store.video_path("v1"), dir.str() + "/video/v1.fiqf");
  EXPECT_FALSE(store.has_video("v1"));

  const auto v = synthetic_video_encoder("v1", 8, 4);
  const auto t = synthetic_text_encoder("a red car", 4);
  store.put_video(v);
  store.put_text(t);
  EXPECT_TRUE(store.has_video("v1"));
  EXPECT_TRUE(store.has_text("a red car"));
  EXPECT_TRUE(bitwise_equal(store.video("v1").frames, v.frames));
  EXPECT_TRUE(bitwise_equal(store.text("a red car").tokens, t.tokens));
}

TEST(FeatureStore, RejectsMismatchedIdsAndBadNames) {
  TempDir dir;
  FeatureStore store(dir.str());
  save_feature_file(store.video_path("v2"), "other", MatrixF(1, 1));
  try {
    store.video("v2");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.field(), "id");
  }
  EXPECT_THROW(store.video_path("../x"), ConfigError);
  EXPECT_THROW(store.video_path(""), ConfigError);
  save_feature_file(store.text_path("t"), "t", MatrixF(78, 2));
  EXPECT_THROW(store.text("t"), FormatError);
}

TEST(SyntheticSource, MatchesFreeFunctions) {
  SyntheticSource src({7, 6, 5});
  EXPECT_EQ(src.video("v").frames, synthetic_video_encoder("v", 6, 5, 7).frames);
  EXPECT_EQ(src.text("hi there").tokens, synthetic_text_encoder("hi there", 5, 7).tokens);
}
