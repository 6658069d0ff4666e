// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/qagen/question.hpp"

#include <sstream>
#include <vector>

#include "fiq/error.hpp"
#include "fiq/qagen/extract.hpp"
#include "fiq/qagen/text.hpp"

namespace fiq::qagen {

namespace {

using Tokens = std::vector<std::string>;

bool vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// consonant-vowel-consonant ending of a short word: stop, run, sit
bool doubles_final(const std::string& w) {
  if (w.size() < 3 || w.size() > 4) return false;
  const char a = w[w.size() - 3], b = w[w.size() - 2], c = w.back();
  return !vowel(a) && vowel(b) && !vowel(c) && c != 'w' && c != 'x' && c != 'y';
}

std::string strip_third_person(const std::string& w) {
  if (w.size() > 3 && w.ends_with("ies")) return w.substr(0, w.size() - 3) + "y";
  for (const char* suffix : {"sses", "shes", "ches", "xes", "zes", "oes"}) {
    if (w.ends_with(suffix)) return w.substr(0, w.size() - 2);
  }
  if (w.size() > 2 && w.ends_with("s") && !w.ends_with("ss")) return w.substr(0, w.size() - 1);
  return w;
}

bool verb_like(const SentenceAnalysis& a, std::size_t i) {
  if (i >= a.body_end() || !is_word_token(a.tokens[i])) return false;
  const auto& w = a.lower[i];
  const bool participle = w.ends_with("ed") || w.ends_with("ing");
  return !lexicon::is_closed_class(w) && (participle || !lexicon::is_adjective(w)) &&
         !a.chunk_at(i);
}

void append(Tokens& out, const Tokens& src, std::size_t b, std::size_t e) {
  for (std::size_t i = b; i < e && i < src.size(); ++i) out.push_back(src[i]);
}

// tokens [b, e) with the first one lowercased when it opens the sentence
Tokens phrase(const SentenceAnalysis& a, std::size_t b, std::size_t e) {
  Tokens out;
  for (std::size_t i = b; i < e; ++i) {
    const Chunk* c = a.chunk_at(0);
    const bool keep_case = c && c->entity && !c->determiner;
    out.push_back(i == 0 && !keep_case ? a.lower[i] : a.tokens[i]);
  }
  return out;
}

std::string finish(Tokens toks) {
  while (!toks.empty() && (toks.back() == "," || toks.back() == ";" || toks.back() == ":")) {
    toks.pop_back();
  }
  std::string s = detokenize(toks);
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s + "?";
}

const Chunk* chunk_containing(const SentenceAnalysis& a, std::size_t token) {
  for (const auto& c : a.chunks) {
    if (token >= c.begin && token < c.end) return &c;
  }
  return nullptr;
}

// Verb phrase after a chunk for existence questions: "crosses the road"
// becomes "crossing the road"; an auxiliary gets "that".
Tokens existence_tail(const SentenceAnalysis& a, std::size_t from) {
  Tokens out;
  const std::size_t end = a.body_end();
  if (from >= end) return out;
  if (lexicon::is_auxiliary(a.lower[from])) {
    out.push_back("that");
    append(out, a.tokens, from, end);
  } else if (verb_like(a, from)) {
    out.push_back(gerund(a.lower[from]));
    append(out, a.tokens, from + 1, end);
  } else {
    append(out, a.tokens, from, end);
  }
  return out;
}

std::string count_question(const SentenceAnalysis& a, const CandidateAnswer& cand) {
  const std::size_t end = a.body_end();
  if (cand.text == "zero" && !cand.object_class.empty()) {
    return finish({"How", "many", lexicon::pluralize(cand.object_class), "are", "there"});
  }
  const std::size_t k = cand.token_begin;
  const Chunk* c = chunk_containing(a, k);
  if (!c) {
    Tokens out;
    append(out, a.tokens, 0, k);
    out.insert(out.end(), {"how", "many"});
    append(out, a.tokens, k + 1, end);
    return finish(out);
  }
  Tokens out{"How", "many"};
  if (c->begin == 0) {
    append(out, a.tokens, k + 1, end);
    return finish(out);
  }
  const Chunk* s = a.subject();
  if (s && verb_like(a, s->end) && c->begin == s->end + 1) {
    bool past = false;
    const std::string base = base_form(a.lower[s->end], &past);
    append(out, a.tokens, k + 1, c->end);
    out.push_back(past ? "did" : (s->plural ? "do" : "does"));
    const Tokens subj = phrase(a, 0, s->end);
    out.insert(out.end(), subj.begin(), subj.end());
    out.push_back(base);
    append(out, a.tokens, c->end, end);
    return finish(out);
  }
  Tokens inplace = phrase(a, 0, c->begin);
  inplace.insert(inplace.end(), {"how", "many"});
  append(inplace, a.tokens, k + 1, end);
  return finish(inplace);
}

std::string boolean_question(const SentenceAnalysis& a, const CandidateAnswer& cand) {
  const Chunk* c = a.chunk_at(cand.token_begin);
  if (!c) return finish({"Is", "there", "anything", "here"});
  Tokens out{c->plural ? "Are" : "Is", "there"};
  if (cand.text == "no") {
    out.push_back("any");
    append(out, a.tokens, c->determiner ? *c->determiner + 1 : c->begin, c->end);
  } else {
    // existence takes an indefinite article: "the van" -> "a van"
    std::size_t from = c->begin;
    if (c->determiner) {
      const std::string& det = a.lower[*c->determiner];
      if (det == "the" || det == "this" || det == "that" || det == "these" || det == "those") {
        from = *c->determiner + 1;
        if (!c->plural && !c->number && from < c->end) {
          out.push_back(std::string_view("aeiou").find(a.lower[from][0]) != std::string_view::npos
                            ? "an"
                            : "a");
        }
      }
    }
    const Tokens np = phrase(a, from, c->end);
    out.insert(out.end(), np.begin(), np.end());
  }
  const Tokens tail = existence_tail(a, c->end);
  out.insert(out.end(), tail.begin(), tail.end());
  return finish(out);
}

std::string phrase_question(const SentenceAnalysis& a, const CandidateAnswer& cand) {
  const std::size_t end = a.body_end();
  const Chunk* c = a.chunk_at(cand.token_begin);
  const std::size_t b = cand.token_begin;
  const std::size_t e = cand.token_end;
  if (!c || c->begin == 0) {
    Tokens out{"What"};
    append(out, a.tokens, e, end);
    return finish(out);
  }
  const Chunk* s = a.subject();
  const bool locative = c->preposition && lexicon::is_locative_preposition(a.lower[*c->preposition]);
  if (s && s->end < end) {
    const std::size_t v = s->end;
    const Tokens subj = phrase(a, 0, s->end);
    if (locative && *c->preposition > v) {
      Tokens out{"Where"};
      if (lexicon::is_auxiliary(a.lower[v])) {
        out.push_back(a.lower[v]);
        out.insert(out.end(), subj.begin(), subj.end());
        append(out, a.tokens, v + 1, *c->preposition);
      } else if (verb_like(a, v)) {
        out.push_back(s->plural ? "are" : "is");
        out.insert(out.end(), subj.begin(), subj.end());
        out.push_back(gerund(a.lower[v]));
        append(out, a.tokens, v + 1, *c->preposition);
      } else {
        out.clear();
      }
      if (!out.empty()) {
        append(out, a.tokens, e, end);
        return finish(out);
      }
    }
    if (b == v + 1 && verb_like(a, v)) {
      bool past = false;
      const std::string base = base_form(a.lower[v], &past);
      Tokens out{"What", past ? "did" : (s->plural ? "do" : "does")};
      out.insert(out.end(), subj.begin(), subj.end());
      out.push_back(base);
      append(out, a.tokens, e, end);
      return finish(out);
    }
  }
  // "There is a car on the road." -> "Where is there a car?"
  if (locative && a.tokens.size() > 2 && a.lower[0] == "there" && lexicon::is_auxiliary(a.lower[1]) &&
      *c->preposition > 1) {
    Tokens out{"Where", a.lower[1], "there"};
    append(out, a.tokens, 2, *c->preposition);
    append(out, a.tokens, e, end);
    return finish(out);
  }
  Tokens out;
  if (locative) {
    out = phrase(a, 0, *c->preposition);
    out.push_back("where");
  } else {
    out = phrase(a, 0, b);
    out.push_back("what");
  }
  append(out, a.tokens, e, end);
  return finish(out);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"'`");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"'`");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string gerund(std::string_view verb) {
  std::string w = to_lower(verb);
  if (w.ends_with("ing") && w.size() > 4) return w;
  if (w.size() > 3 && w.ends_with("ied")) return w.substr(0, w.size() - 3) + "ying";
  if (w.size() > 3 && w.ends_with("ed")) return w.substr(0, w.size() - 2) + "ing";
  w = strip_third_person(w);
  if (w.ends_with("ie")) return w.substr(0, w.size() - 2) + "ying";
  if (w.size() > 2 && w.back() == 'e' && !w.ends_with("ee")) return w.substr(0, w.size() - 1) + "ing";
  if (doubles_final(w)) return w + w.back() + "ing";
  return w + "ing";
}

std::string base_form(std::string_view verb, bool* past) {
  std::string w = to_lower(verb);
  if (past) *past = false;
  if (w.size() > 3 && w.ends_with("ed")) {
    if (past) *past = true;
    if (w.ends_with("ied")) return w.substr(0, w.size() - 3) + "y";
    std::string stem = w.substr(0, w.size() - 2);
    const std::size_t n = stem.size();
    if (n >= 2 && stem[n - 1] == stem[n - 2] && !vowel(stem[n - 1]) && stem[n - 1] != 's' &&
        stem[n - 1] != 'l' && stem[n - 1] != 'f' && stem[n - 1] != 'z') {
      stem.pop_back();
    } else if (n >= 2 && !vowel(stem[n - 2]) && (stem[n - 1] == 'v' || stem[n - 1] == 'c' ||
                                                   stem[n - 1] == 'g' || stem[n - 1] == 'u')) {
      stem += 'e';
    } else if (w.ends_with("ided") || w.ends_with("ated") || w.ends_with("ized") ||
               w.ends_with("oved") || w.ends_with("ived")) {
      stem += 'e';
    }
    return stem;
  }
  return strip_third_person(w);
}

std::string build_question_prompt(const CandidateAnswer& c) {
  std::ostringstream os;
  os << "Rewrite the sentence as one question whose answer is the given answer. "
        "Reply with the question only.\n";
  os << "sentence: " << c.source_sentence << '\n';
  os << "answer: " << c.text << '\n';
  os << "category: " << category_name(c.category) << '\n';
  os << "span: " << c.token_begin << ' ' << c.token_end << '\n';
  if (!c.object_class.empty()) os << "class: " << c.object_class << '\n';
  return os.str();
}

std::optional<CandidateAnswer> parse_question_prompt(std::string_view prompt) {
  CandidateAnswer c;
  bool have_sentence = false, have_answer = false, have_category = false, have_span = false;
  std::istringstream in{std::string(prompt)};
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    const std::string value = line.substr(colon + 2);
    if (key == "sentence") {
      c.source_sentence = value;
      have_sentence = true;
    } else if (key == "answer") {
      c.text = value;
      have_answer = true;
    } else if (key == "category") {
      try {
        c.category = parse_category(value);
      } catch (const FormatError&) {
        return std::nullopt;
      }
      have_category = true;
    } else if (key == "span") {
      std::istringstream sp(value);
      if (!(sp >> c.token_begin >> c.token_end)) return std::nullopt;
      have_span = true;
    } else if (key == "class") {
      c.object_class = value;
    }
  }
  if (!(have_sentence && have_answer && have_category && have_span)) return std::nullopt;
  return c;
}

std::string template_question(const CandidateAnswer& candidate) {
  const SentenceAnalysis a = analyze_sentence(candidate.source_sentence);
  switch (candidate.category) {
    case Category::kCount: return count_question(a, candidate);
    case Category::kBoolean: return boolean_question(a, candidate);
    case Category::kNounPhrase:
    case Category::kNamedEntity: return phrase_question(a, candidate);
  }
  return phrase_question(a, candidate);
}

std::string finalize_question(std::string_view raw) {
  std::string text(raw);
  if (const auto nl = text.find('\n'); nl != std::string::npos) text.resize(nl);
  text = trim(text);
  while (!text.empty() && (text.back() == '.' || text.back() == '!' || text.back() == '?' ||
                           text.back() == ' ')) {
    text.pop_back();
  }
  if (text.empty()) return {};
  // one token is reserved for the question mark
  if (proxy_token_count(text) + 1 > kTokenLimit) {
    text = truncate_tokens(text, kTokenLimit - 1);
    while (!text.empty() && !is_word_token(std::string_view(&text.back(), 1))) text.pop_back();
  }
  return text + "?";
}

std::string generate_question(const CandidateAnswer& candidate, LMClient& lm) {
  const std::string prompt = build_question_prompt(candidate);
  const std::string question = finalize_question(lm.generate(prompt));
  if (question.empty()) throw Error("lm-output", "language model returned an empty question");
  return question;
}

}  // namespace fiq::qagen
