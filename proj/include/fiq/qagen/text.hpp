// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fiq::qagen {

/// Token budget for questions and options.
inline constexpr std::size_t kTokenLimit = 77;

/// Proxy tokenizer used for every length limit in the toolkit. A maximal run
/// of ASCII letters, digits and non-ASCII bytes is one token; every other
/// non-space character is a token by itself. Counts are never lower than a
/// byte-pair tokenizer would give for ordinary English text.
std::vector<std::string> proxy_tokenize(std::string_view text);

std::size_t proxy_token_count(std::string_view text);

/// Cuts `text` after its first `limit` proxy tokens, keeping the original
/// spelling and spacing of the kept prefix. Trailing whitespace is dropped.
std::string truncate_tokens(std::string_view text, std::size_t limit);

/// Joins proxy tokens back into text: no space before closing punctuation,
/// none after an apostrophe or hyphen.
std::string detokenize(const std::vector<std::string>& tokens);

bool is_word_token(std::string_view token) noexcept;
bool is_numeral(std::string_view token) noexcept;

std::string to_lower(std::string_view text);

/// Lowercase and collapse runs of whitespace to one space; trims both ends.
std::string normalize_whitespace_lower(std::string_view text);

/// Tokens compared by token_f1: lowercase, ASCII punctuation deleted,
/// split on whitespace.
std::vector<std::string> f1_tokens(std::string_view text);

/// Rewrites number words zero..twenty to numerals ("two" -> "2").
std::vector<std::string> normalize_numerals(std::vector<std::string> tokens);

/// Token-level F1 over multisets. Both sides empty gives 1, exactly one
/// empty gives 0.
double token_f1(std::string_view predicted, std::string_view gold, bool numerals = false);

/// Parsing helpers for the number vocabulary.
bool is_number_word(std::string_view lower_token) noexcept;
/// Value of a numeral or number word, or -1.
long number_value(std::string_view lower_token) noexcept;

}  // namespace fiq::qagen
