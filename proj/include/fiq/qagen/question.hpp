// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fiq/qagen/lm_client.hpp"
#include "fiq/qagen/records.hpp"

namespace fiq::qagen {

/// Prompt sent to the LM. An instruction line followed by structured
/// `key: value` lines (sentence, answer, category, span, class) that the
/// template client reads back.
std::string build_question_prompt(const CandidateAnswer& candidate);

/// Inverse of build_question_prompt; nullopt if any required line is missing.
std::optional<CandidateAnswer> parse_question_prompt(std::string_view prompt);

/// Template table:
///   count        "How many N VP?"          subject count, or object count with do-support
///   boolean yes  "Is/Are there NP V-ing …?"
///   boolean no   "Is/Are there any N …?"
///   subject NP   "What VP?"
///   locative NP  "Where is/are SUBJ V-ing …?"
///   object NP    "What does/do SUBJ V …?"
/// Anything else is rewritten in place with what / where / how many.
std::string template_question(const CandidateAnswer& candidate);

/// First line of an LM reply, trimmed of quotes and whitespace, ending in
/// "?", and cut at a word boundary to fit in kTokenLimit proxy tokens.
std::string finalize_question(std::string_view raw);

/// Runs the LM on the prompt and finalizes the reply. An empty reply raises
/// Error("lm-output").
std::string generate_question(const CandidateAnswer& candidate, LMClient& lm);

/// Inflection helpers for regular English verbs.
std::string gerund(std::string_view verb);
/// Base form and whether the input looked like past tense.
std::string base_form(std::string_view verb, bool* past = nullptr);

}  // namespace fiq::qagen
