// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fiq/qagen/records.hpp"

namespace fiq::qagen {

/// Word classes of the closed-class lexicon plus the open-class noun and
/// adjective lists. Lookups take lowercase tokens.
namespace lexicon {
bool is_determiner(std::string_view w);
bool is_preposition(std::string_view w);
bool is_locative_preposition(std::string_view w);
bool is_auxiliary(std::string_view w);
bool is_negator(std::string_view w);
bool is_conjunction(std::string_view w);
bool is_pronoun(std::string_view w);
bool is_adjective(std::string_view w);
/// Accepts singular or plural; `plural` reports which.
bool is_noun(std::string_view w, bool* plural = nullptr);
/// Plural nouns that double as third-person verbs ("stops", "turns").
bool is_verb_like_plural(std::string_view w);
/// Anything listed above, or a number.
bool is_closed_class(std::string_view w);
/// Plural spelling for a singular lexicon noun.
std::string pluralize(std::string_view singular);
}  // namespace lexicon

/// One chunk found by `determiner? number? adjective* noun+`.
struct Chunk {
  std::size_t begin = 0;  // first token, determiner included
  std::size_t end = 0;    // one past the last noun
  std::optional<std::size_t> determiner;
  std::optional<std::size_t> number;
  std::optional<std::size_t> preposition;  // token right before `begin`
  bool negated = false;                    // "no" determiner or an earlier negator
  bool plural = false;
  bool entity = false;                     // capitalized run away from sentence start
};

struct SentenceAnalysis {
  std::vector<std::string> tokens;  // proxy tokens of the sentence
  std::vector<std::string> lower;
  std::vector<Chunk> chunks;        // in sentence order, non-overlapping

  /// Chunk starting the sentence, if any.
  const Chunk* subject() const noexcept;
  const Chunk* chunk_at(std::size_t begin) const noexcept;
  /// Tokens before any trailing . ! ? run.
  std::size_t body_end() const noexcept;
};

SentenceAnalysis analyze_sentence(std::string_view sentence);

struct ExtractOptions {
  /// Object classes checked for absence; each absent one yields a count
  /// candidate "zero". Empty by default.
  std::vector<std::string> zero_lexicon;
};

/// Count candidates for numbers, one noun-phrase or named-entity candidate
/// per chunk, one boolean for the first asserted entity, and "zero" counts
/// for absent lexicon classes. Duplicate (category, text) pairs are dropped.
std::vector<CandidateAnswer> extract_candidates(std::string_view sentence,
                                                const ExtractOptions& options = {});

}  // namespace fiq::qagen
