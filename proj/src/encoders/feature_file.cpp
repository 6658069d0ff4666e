// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/encoders/feature_file.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "fiq/error.hpp"

namespace fiq::encoders {
namespace {

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffu));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename U>
  U get_le(const char* field) {
    need(sizeof(U), field);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return static_cast<U>(v);
  }

  std::string_view take(std::size_t n, const char* field) {
    need(n, field);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* field) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(field, std::string("feature file truncated in ") + field);
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32_bytes(std::string_view bytes) noexcept {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t left = bytes.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string encode_feature_file(std::string_view id, const MatrixF& matrix) {
  if (id.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw FormatError("id", "feature id longer than 65535 bytes");
  }
  if (matrix.rows() > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError("rows", "row count exceeds u32");
  }
  if (matrix.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError("cols", "column count exceeds u32");
  }
  std::string out;
  out.reserve(kFeatureHeaderSize + id.size() + 4 * matrix.size() + 4);
  out.append(kFeatureMagic.data(), kFeatureMagic.size());
  put_le<std::uint16_t>(out, kFeatureVersion);
  put_le<std::uint8_t>(out, kDtypeF32);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(matrix.rows()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(matrix.cols()));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
  out.append(id);
  const std::size_t payload_begin = out.size();
  for (float v : matrix.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  const auto crc = crc32_bytes(std::string_view(out).substr(payload_begin));
  put_le<std::uint32_t>(out, crc);
  return out;
}

FeatureBlob decode_feature_file(std::string_view bytes) {
  Reader r(bytes);
  const auto magic = r.take(4, "magic");
  if (magic != std::string_view(kFeatureMagic.data(), kFeatureMagic.size())) {
    throw FormatError("magic", "not a feature file (bad magic)");
  }
  const auto version = r.get_le<std::uint16_t>("version");
  if (version != kFeatureVersion) {
    throw FormatError("version", "unsupported feature file version " + std::to_string(version));
  }
  const auto dtype = r.get_le<std::uint8_t>("dtype");
  if (dtype != kDtypeF32) {
    throw FormatError("dtype", "unsupported dtype " + std::to_string(dtype));
  }
  const std::size_t rows = r.get_le<std::uint32_t>("rows");
  const std::size_t cols = r.get_le<std::uint32_t>("cols");
  const std::size_t id_len = r.get_le<std::uint16_t>("id_len");
  FeatureBlob blob;
  blob.id = std::string(r.take(id_len, "id"));

  const std::size_t count = rows * cols;
  if (r.remaining() < 4 || (r.remaining() - 4) / 4 < count) {
    throw FormatError("payload", "payload shorter than " + std::to_string(rows) + "x" +
                                     std::to_string(cols) + " floats");
  }
  const auto payload = r.take(4 * count, "payload");
  const auto stored = r.get_le<std::uint32_t>("checksum");
  if (r.remaining() != 0) throw FormatError("trailing", "bytes after checksum");
  if (crc32_bytes(payload) != stored) throw FormatError("checksum", "payload checksum mismatch");

  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(payload[4 * i + b])) << (8 * b);
    }
    data[i] = std::bit_cast<float>(bits);
  }
  // Non-finite payloads are representable on disk; callers decide.
  numkit::CheckedModeGuard unchecked(false);
  blob.matrix = MatrixF(rows, cols, std::move(data));
  return blob;
}

void write_feature_file(std::ostream& out, std::string_view id, const MatrixF& matrix) {
  const auto bytes = encode_feature_file(id, matrix);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing feature file");
}

FeatureBlob read_feature_file(std::istream& in) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_feature_file(bytes);
}

void save_feature_file(const std::string& path, std::string_view id, const MatrixF& matrix) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
    write_feature_file(out, id, matrix);
  }
  fs::rename(tmp, target);
}

FeatureBlob load_feature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open feature file '" + path + "'");
  return read_feature_file(in);
}

}  // namespace fiq::encoders
