// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <string>

#include "fiq/qagen/lm_client.hpp"
#include "fiq/qagen/records.hpp"

namespace fiq::qagen {

inline constexpr double kDefaultF1Threshold = 0.54;

/// Which string the round-trip answer is scored against.
enum class Comparand {
  kCandidate,       // token_f1(roundtrip, candidate.text)
  kSourceSentence,  // token_f1(candidate.text, source_sentence)
};

struct ValidationOptions {
  double threshold = kDefaultF1Threshold;
  Comparand comparand = Comparand::kCandidate;
  /// Map number words to numerals before scoring.
  bool normalize_numerals = false;
};

struct ValidationResult {
  bool accepted = false;
  double score = 0.0;
  std::string roundtrip;
};

/// Accept iff score >= threshold.
bool passes_threshold(double score, double threshold) noexcept;

/// Longest answer the round trip may return for this candidate.
std::size_t answer_budget(const CandidateAnswer& candidate);

/// Asks the LM to answer `question` from the candidate's source sentence and
/// scores the reply. LM failures propagate to the caller.
ValidationResult validate_pair(const std::string& question, const CandidateAnswer& candidate,
                               LMClient& lm, const ValidationOptions& options = {});

/// Offline answerer used by TemplateClient. Yes/no questions get "no" when
/// the context contains a negator and "yes" otherwise; "how many" questions
/// whose noun is absent from the context get "zero"; every other question
/// gets the longest run of context words the question does not mention,
/// cut to `max_tokens`.
std::string template_answer(const std::string& question, const std::string& context,
                            std::size_t max_tokens);

}  // namespace fiq::qagen
