// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/qagen/text.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace fiq::qagen {

namespace {

bool word_byte(unsigned char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool space_byte(unsigned char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool ascii_punct(unsigned char c) noexcept {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

constexpr std::array<std::string_view, 21> kNumberWords = {
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen", "twenty"};

// Calls visit(begin, end) for every proxy token in text.
template <typename Visit>
void scan_tokens(std::string_view text, Visit&& visit) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (space_byte(c)) {
      ++i;
    } else if (word_byte(c)) {
      std::size_t j = i;
      while (j < text.size() && word_byte(static_cast<unsigned char>(text[j]))) ++j;
      if (!visit(i, j)) return;
      i = j;
    } else {
      if (!visit(i, i + 1)) return;
      ++i;
    }
  }
}

}  // namespace

std::vector<std::string> proxy_tokenize(std::string_view text) {
  std::vector<std::string> out;
  scan_tokens(text, [&](std::size_t b, std::size_t e) {
    out.emplace_back(text.substr(b, e - b));
    return true;
  });
  return out;
}

std::size_t proxy_token_count(std::string_view text) {
  std::size_t n = 0;
  scan_tokens(text, [&](std::size_t, std::size_t) {
    ++n;
    return true;
  });
  return n;
}

std::string truncate_tokens(std::string_view text, std::size_t limit) {
  std::size_t n = 0;
  std::size_t cut = 0;
  scan_tokens(text, [&](std::size_t, std::size_t e) {
    if (n == limit) return false;
    ++n;
    cut = e;
    return true;
  });
  return std::string(text.substr(0, cut));
}

std::string detokenize(const std::vector<std::string>& tokens) {
  static const std::string_view kNoSpaceBefore = ".,?!;:)]}%'-";
  static const std::string_view kNoSpaceAfter = "([{$'-";
  std::string out;
  bool glue_next = true;
  for (const auto& tok : tokens) {
    const bool closing = tok.size() == 1 && kNoSpaceBefore.find(tok[0]) != std::string_view::npos;
    if (!out.empty() && !glue_next && !closing) out += ' ';
    out += tok;
    glue_next = tok.size() == 1 && kNoSpaceAfter.find(tok[0]) != std::string_view::npos;
  }
  return out;
}

bool is_word_token(std::string_view token) noexcept {
  return !token.empty() && word_byte(static_cast<unsigned char>(token[0]));
}

bool is_numeral(std::string_view token) noexcept {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string normalize_whitespace_lower(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (space_byte(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return out;
}

std::vector<std::string> f1_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (space_byte(u)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else if (!ascii_punct(u)) {
      cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_number_word(std::string_view lower_token) noexcept {
  return std::find(kNumberWords.begin(), kNumberWords.end(), lower_token) != kNumberWords.end();
}

long number_value(std::string_view lower_token) noexcept {
  if (is_numeral(lower_token)) {
    if (lower_token.size() > 9) return -1;
    long v = 0;
    for (char c : lower_token) v = v * 10 + (c - '0');
    return v;
  }
  const auto it = std::find(kNumberWords.begin(), kNumberWords.end(), lower_token);
  return it == kNumberWords.end() ? -1 : static_cast<long>(it - kNumberWords.begin());
}

std::vector<std::string> normalize_numerals(std::vector<std::string> tokens) {
  for (auto& t : tokens) {
    if (is_number_word(t)) t = std::to_string(number_value(t));
  }
  return tokens;
}

double token_f1(std::string_view predicted, std::string_view gold, bool numerals) {
  auto pred = f1_tokens(predicted);
  auto ref = f1_tokens(gold);
  if (numerals) {
    pred = normalize_numerals(std::move(pred));
    ref = normalize_numerals(std::move(ref));
  }
  if (pred.empty() && ref.empty()) return 1.0;
  if (pred.empty() || ref.empty()) return 0.0;
  std::map<std::string, long> counts;
  for (const auto& t : ref) ++counts[t];
  long overlap = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  // 2PR/(P+R) reduced to a single rounding
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(pred.size() + ref.size());
}

}  // namespace fiq::qagen
