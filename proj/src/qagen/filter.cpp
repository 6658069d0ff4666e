// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/qagen/filter.hpp"

#include <set>

#include "fiq/error.hpp"
#include "fiq/qagen/text.hpp"

namespace fiq::qagen {

double numeric_ratio(const std::string& sentence) {
  std::size_t words = 0;
  std::size_t numeric = 0;
  for (const auto& tok : proxy_tokenize(sentence)) {
    if (!is_word_token(tok)) continue;
    ++words;
    if (number_value(to_lower(tok)) >= 0) ++numeric;
  }
  return words == 0 ? 0.0 : static_cast<double>(numeric) / static_cast<double>(words);
}

Description filter_descriptions(const Description& raw) {
  Description out;
  out.video_id = raw.video_id;
  std::set<std::string> seen;
  for (const auto& sentence : raw.sentences) {
    const std::string key = normalize_whitespace_lower(sentence);
    if (key.empty()) continue;
    if (!seen.insert(key).second) continue;
    if (numeric_ratio(sentence) > 0.5) continue;
    out.sentences.push_back(sentence);
  }
  if (out.sentences.empty()) {
    throw EmptyDescriptionError("description for video '" + raw.video_id +
                                "' has no usable sentences");
  }
  return out;
}

}  // namespace fiq::qagen
