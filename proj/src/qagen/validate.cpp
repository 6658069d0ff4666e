// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/qagen/validate.hpp"

#include <set>
#include <vector>

#include "fiq/qagen/extract.hpp"
#include "fiq/qagen/text.hpp"

namespace fiq::qagen {

namespace {

bool vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string stem(std::string w) {
  w = to_lower(w);
  if (w.size() > 4 && w.ends_with("ing")) {
    w.resize(w.size() - 3);
  } else if (w.size() > 3 && w.ends_with("ed")) {
    w.resize(w.size() - 2);
  } else if (w.size() > 3 && w.ends_with("es")) {
    w.resize(w.size() - 2);
  } else if (w.size() > 2 && w.ends_with("s") && !w.ends_with("ss")) {
    w.resize(w.size() - 1);
  }
  if (w.size() > 3 && w.back() == 'e') w.pop_back();
  const std::size_t n = w.size();
  if (n > 2 && w[n - 1] == w[n - 2] && !vowel(w[n - 1])) w.pop_back();
  return w;
}

}  // namespace

bool passes_threshold(double score, double threshold) noexcept { return score >= threshold; }

std::size_t answer_budget(const CandidateAnswer& candidate) {
  return proxy_token_count(candidate.text) + 2;
}

ValidationResult validate_pair(const std::string& question, const CandidateAnswer& candidate,
                               LMClient& lm, const ValidationOptions& options) {
  ValidationResult r;
  if (options.comparand == Comparand::kCandidate) {
    r.roundtrip = lm.answer(question, candidate.source_sentence, answer_budget(candidate));
    r.score = token_f1(r.roundtrip, candidate.text, options.normalize_numerals);
  } else {
    r.score = token_f1(candidate.text, candidate.source_sentence, options.normalize_numerals);
  }
  r.accepted = passes_threshold(r.score, options.threshold);
  return r;
}

std::string template_answer(const std::string& question, const std::string& context,
                            std::size_t max_tokens) {
  std::vector<std::string> q;
  for (const auto& t : proxy_tokenize(question)) {
    if (is_word_token(t)) q.push_back(to_lower(t));
  }
  const auto ctx = proxy_tokenize(context);
  if (q.empty() || max_tokens == 0) return {};

  if (lexicon::is_auxiliary(q[0])) {
    for (const auto& t : ctx) {
      if (lexicon::is_negator(to_lower(t))) return "no";
    }
    return "yes";
  }

  std::set<std::string> ctx_stems;
  for (const auto& t : ctx) {
    if (is_word_token(t)) ctx_stems.insert(stem(t));
  }
  for (std::size_t i = 0; i + 2 < q.size(); ++i) {
    if (q[i] == "how" && q[i + 1] == "many" && ctx_stems.count(stem(q[i + 2])) == 0) return "zero";
  }

  std::set<std::string> covered;
  for (const auto& w : q) covered.insert(stem(w));
  std::size_t best_begin = 0, best_len = 0;
  for (std::size_t i = 0; i < ctx.size();) {
    if (!is_word_token(ctx[i]) || covered.count(stem(ctx[i])) != 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < ctx.size() && is_word_token(ctx[j]) && covered.count(stem(ctx[j])) == 0) ++j;
    if (j - i > best_len) {
      best_begin = i;
      best_len = j - i;
    }
    i = j;
  }
  const std::size_t len = std::min(best_len, max_tokens);
  return detokenize(std::vector<std::string>(ctx.begin() + static_cast<std::ptrdiff_t>(best_begin),
                                             ctx.begin() + static_cast<std::ptrdiff_t>(best_begin + len)));
}

}  // namespace fiq::qagen
