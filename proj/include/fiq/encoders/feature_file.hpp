// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "fiq/numkit/matrix.hpp"

namespace fiq::encoders {

using numkit::MatrixF;

/// Binary container for one embedding matrix. Little-endian layout:
///
///   offset  size        field
///   0       4           magic "FIQF"
///   4       2           version (u16, currently 1)
///   6       1           dtype   (u8, 0 = f32)
///   7       4           rows    (u32)
///   11      4           cols    (u32)
///   15      2           id_len  (u16)
///   17      id_len      id      (UTF-8)
///   ...     4*rows*cols payload (f32, row-major)
///   ...     4           checksum (u32, CRC-32 of the payload bytes)
inline constexpr std::array<char, 4> kFeatureMagic = {'F', 'I', 'Q', 'F'};
inline constexpr std::uint16_t kFeatureVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 0;
inline constexpr std::size_t kFeatureHeaderSize = 17;

struct FeatureBlob {
  std::string id;
  MatrixF matrix;
};

/// Serialized bytes of a feature file. Throws FormatError("id") when the id
/// does not fit in a u16 length and FormatError("rows"/"cols") on overflow.
std::string encode_feature_file(std::string_view id, const MatrixF& matrix);

/// Parses bytes produced by encode_feature_file. The FormatError field is
/// one of magic, version, dtype, rows, cols, id_len, id, payload, checksum,
/// trailing.
FeatureBlob decode_feature_file(std::string_view bytes);

void write_feature_file(std::ostream& out, std::string_view id, const MatrixF& matrix);
FeatureBlob read_feature_file(std::istream& in);

/// Writes through a temporary sibling and renames it into place.
void save_feature_file(const std::string& path, std::string_view id, const MatrixF& matrix);
FeatureBlob load_feature_file(const std::string& path);

std::uint32_t crc32_bytes(std::string_view bytes) noexcept;

}  // namespace fiq::encoders
