// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include "fiq/qagen/records.hpp"

namespace fiq::qagen {

/// Drops repeated sentences (compared lowercased with whitespace collapsed)
/// and sentences where more than half of the word tokens are numbers.
/// Order is preserved. Throws EmptyDescriptionError when nothing survives.
Description filter_descriptions(const Description& raw);

/// Share of word tokens that are numerals or number words.
double numeric_ratio(const std::string& sentence);

}  // namespace fiq::qagen
