// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/qagen/extract.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "fiq/qagen/text.hpp"

namespace fiq::qagen {

namespace lexicon {

namespace {

using WordSet = std::unordered_set<std::string_view>;

const WordSet& determiners() {
  static const WordSet s = {"a",     "an",    "the",     "this",    "that",    "these", "those",
                            "some",  "any",   "another", "each",    "every",   "its",   "his",
                            "her",   "their", "my",      "our",     "your",    "several",
                            "many",  "few",   "no",      "both",    "all"};
  return s;
}

const WordSet& locative_prepositions() {
  static const WordSet s = {"at",      "in",     "on",      "near",   "behind", "beside",
                            "under",   "over",   "across",  "along",  "inside", "outside",
                            "above",   "below",  "between", "around", "by",     "into",
                            "onto",    "through", "beneath", "opposite", "alongside"};
  return s;
}

const WordSet& other_prepositions() {
  static const WordSet s = {"of",     "for",     "with",  "without", "to",     "from",
                            "toward", "towards", "past",  "after",   "before", "during",
                            "down",   "up",      "off",   "against", "like",   "than",
                            "via",    "upon",    "among", "until"};
  return s;
}

const WordSet& auxiliaries() {
  static const WordSet s = {"is",   "are",   "was",    "were",   "be",    "been",  "being",
                            "has",  "have",  "had",    "does",   "do",    "did",   "can",
                            "could", "will", "would",  "should", "may",   "might", "must",
                            "am"};
  return s;
}

const WordSet& negators() {
  static const WordSet s = {"not",  "no",    "never", "nobody", "nothing", "none",
                            "isn",  "aren",  "wasn",  "weren",  "doesn",   "don",
                            "didn", "cannot", "won",  "hasn",   "haven",   "hadn",
                            "neither", "nor", "without"};
  return s;
}

const WordSet& conjunctions() {
  static const WordSet s = {"and", "or", "but", "while", "as", "then", "when", "because",
                            "so",  "if", "although", "whereas", "after", "before", "until"};
  return s;
}

const WordSet& pronouns() {
  static const WordSet s = {"it",   "they",  "he",    "she",   "there", "which", "who",
                            "whom", "whose", "them",  "him",   "we",    "you",   "i",
                            "one",  "what",  "where", "how",   "why",   "something",
                            "someone", "everything", "everyone", "itself", "themselves"};
  return s;
}

const WordSet& adjectives() {
  static const WordSet s = {
      "red",     "blue",    "green",    "yellow",  "white",    "black",   "gray",
      "grey",    "silver",  "orange",   "brown",   "pink",     "purple",  "gold",
      "dark",    "bright",  "big",      "large",   "small",    "little",  "tall",
      "short",   "long",    "wide",     "narrow",  "heavy",    "busy",    "empty",
      "wet",     "dry",     "crowded",  "parked",  "moving",   "stopped", "old",
      "new",     "fast",    "slow",     "left",    "right",    "front",   "rear",
      "main",    "other",   "oncoming", "multiple", "single",  "double",  "nearby",
      "distant", "local",   "public",   "private", "sunny",   "rainy",
      "snowy",   "foggy",   "cloudy",   "marked",  "unmarked", "damaged", "broken",
      "wooden",  "metal",   "concrete", "open",    "closed",   "first",   "second",
      "third",   "last",    "next",     "same",    "different", "blurry",  "clear"};
  return s;
}

const WordSet& nouns() {
  static const WordSet s = {
      "car",        "truck",      "bus",       "van",        "vehicle",   "motorcycle",
      "motorbike",  "bike",       "bicycle",   "scooter",    "taxi",      "cab",
      "pedestrian", "person",     "man",       "woman",      "child",     "kid",
      "people",     "driver",     "cyclist",   "rider",      "motorcyclist", "police",
      "officer",    "ambulance",  "road",      "street",     "lane",      "intersection",
      "crossing",   "crosswalk",  "junction",  "highway",    "freeway",   "bridge",
      "tunnel",     "sidewalk",   "pavement",  "traffic",    "light",     "signal",
      "sign",       "tree",       "building",  "camera",     "accident",  "collision",
      "corner",     "parking",   "lot",        "roundabout", "median",
      "barrier",    "pole",       "wall",      "curb",       "day",       "night",
      "rain",       "snow",       "weather",   "side",       "shop",      "store",
      "trailer",    "lorry",      "jeep",      "suv",        "sedan",     "wheel",
      "helmet",     "umbrella",   "dog",       "cat",        "crowd",     "group",
      "line",       "queue",      "area",      "city",       "town",      "morning",
      "evening",    "afternoon",  "time",      "video",      "scene",     "view",
      "fire",       "engine",     "tram",      "train",      "rail",
      "station",    "stop",       "gas",       "fence",      "grass",     "field",
      "house",      "window",     "door",      "roof",       "shoulder",  "exit",
      "entrance",   "ramp",       "overpass",  "underpass",  "direction", "middle",
      "center",     "edge",       "front",     "back",       "rear",      "motorist",
      "passenger",  "worker",     "cone",      "hydrant",    "lamp",      "streetlight",
      "billboard",  "boy",       "girl",       "student",   "tractor",
      "minivan",    "pickup",     "cart",      "wagon",      "horse",     "zebra",
      "arrow",      "marking",    "pothole",    "puddle",    "hill"};
  return s;
}

const std::unordered_map<std::string_view, std::string_view>& irregular_plurals() {
  static const std::unordered_map<std::string_view, std::string_view> m = {
      {"people", "person"}, {"men", "man"},       {"women", "woman"},
      {"children", "child"}, {"feet", "foot"},    {"police", "police"},
      {"traffic", "traffic"}, {"geese", "goose"}};
  return m;
}

bool contains(const WordSet& s, std::string_view w) { return s.find(w) != s.end(); }

// -s forms that read as verbs when they follow another noun: "the car stops"
const WordSet& verb_like_plurals() {
  static const WordSet s = {"stops", "turns", "signals", "lines", "tracks", "parks", "exits",
                            "fires", "signs", "sides", "walls", "rains", "snows", "views",
                            "queues", "crossings", "lights", "wheels"};
  return s;
}

}  // namespace

bool is_verb_like_plural(std::string_view w) { return contains(verb_like_plurals(), w); }

bool is_determiner(std::string_view w) { return contains(determiners(), w); }
bool is_locative_preposition(std::string_view w) { return contains(locative_prepositions(), w); }
bool is_preposition(std::string_view w) {
  return is_locative_preposition(w) || contains(other_prepositions(), w);
}
bool is_auxiliary(std::string_view w) { return contains(auxiliaries(), w); }
bool is_negator(std::string_view w) { return contains(negators(), w); }
bool is_conjunction(std::string_view w) { return contains(conjunctions(), w); }
bool is_pronoun(std::string_view w) { return contains(pronouns(), w); }
bool is_adjective(std::string_view w) { return contains(adjectives(), w); }

bool is_noun(std::string_view w, bool* plural) {
  if (plural) *plural = false;
  if (w.empty()) return false;
  if (auto it = irregular_plurals().find(w); it != irregular_plurals().end()) {
    if (plural) *plural = it->first != "traffic";
    return true;
  }
  if (contains(nouns(), w)) return true;
  auto singular = [&](std::string_view stem) {
    if (contains(nouns(), stem)) {
      if (plural) *plural = true;
      return true;
    }
    return false;
  };
  const std::string word(w);
  if (word.size() > 3 && word.ends_with("ies") && singular(word.substr(0, word.size() - 3) + "y")) {
    return true;
  }
  if (word.size() > 2 && word.ends_with("es") && singular(std::string_view(word).substr(0, word.size() - 2))) {
    return true;
  }
  if (word.size() > 1 && word.ends_with("s") && singular(std::string_view(word).substr(0, word.size() - 1))) {
    return true;
  }
  return false;
}

bool is_closed_class(std::string_view w) {
  return is_determiner(w) || is_preposition(w) || is_auxiliary(w) || is_negator(w) ||
         is_conjunction(w) || is_pronoun(w) || number_value(w) >= 0;
}

std::string pluralize(std::string_view singular) {
  for (const auto& [pl, sg] : irregular_plurals()) {
    if (sg == singular) return std::string(pl);
  }
  std::string s(singular);
  auto vowel = [](char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; };
  if (s.ends_with("s") || s.ends_with("x") || s.ends_with("ch") || s.ends_with("sh") ||
      s.ends_with("z")) {
    return s + "es";
  }
  if (s.size() > 1 && s.back() == 'y' && !vowel(s[s.size() - 2])) {
    return s.substr(0, s.size() - 1) + "ies";
  }
  return s + "s";
}

}  // namespace lexicon

namespace {

bool capitalized(std::string_view tok) { return !tok.empty() && tok[0] >= 'A' && tok[0] <= 'Z'; }

bool clause_break(std::string_view lower) {
  return lower == "," || lower == ";" || lower == ":" || lexicon::is_conjunction(lower);
}

}  // namespace

const Chunk* SentenceAnalysis::subject() const noexcept {
  return chunk_at(0);
}

const Chunk* SentenceAnalysis::chunk_at(std::size_t begin) const noexcept {
  for (const auto& c : chunks) {
    if (c.begin == begin) return &c;
  }
  return nullptr;
}

std::size_t SentenceAnalysis::body_end() const noexcept {
  std::size_t end = tokens.size();
  while (end > 0 && (tokens[end - 1] == "." || tokens[end - 1] == "!" || tokens[end - 1] == "?")) {
    --end;
  }
  return end;
}

SentenceAnalysis analyze_sentence(std::string_view sentence) {
  SentenceAnalysis a;
  a.tokens = proxy_tokenize(sentence);
  a.lower.reserve(a.tokens.size());
  for (const auto& t : a.tokens) a.lower.push_back(to_lower(t));
  const std::size_t n = a.tokens.size();
  const auto& w = a.lower;

  std::vector<char> taken(n, 0);
  std::vector<Chunk> found;

  // Named entities first: capitalized word runs that do not open the sentence.
  for (std::size_t i = 1; i < n;) {
    if (!is_word_token(a.tokens[i]) || !capitalized(a.tokens[i]) ||
        lexicon::is_closed_class(w[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_word_token(a.tokens[j]) && capitalized(a.tokens[j]) &&
           !lexicon::is_closed_class(w[j])) {
      ++j;
    }
    Chunk c;
    c.begin = i;
    c.end = j;
    c.entity = true;
    if (i > 0 && lexicon::is_determiner(w[i - 1]) && !taken[i - 1]) {
      c.determiner = i - 1;
      c.begin = i - 1;
    }
    bool pl = false;
    lexicon::is_noun(w[j - 1], &pl);
    c.plural = pl;
    for (std::size_t k = c.begin; k < c.end; ++k) taken[k] = 1;
    found.push_back(c);
    i = j;
  }

  for (std::size_t i = 0; i < n;) {
    if (taken[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    Chunk c;
    c.begin = i;
    if (lexicon::is_determiner(w[j])) c.determiner = j++;
    if (j < n && !taken[j] && number_value(w[j]) >= 0) c.number = j++;
    const std::size_t adj_begin = j;
    while (j < n && !taken[j] && lexicon::is_adjective(w[j]) && !lexicon::is_noun(w[j])) ++j;
    const std::size_t noun_begin = j;
    bool plural = false;
    bool pl = false;
    while (j < n && !taken[j] && lexicon::is_noun(w[j], &pl)) {
      if (j > noun_begin && lexicon::is_verb_like_plural(w[j]) && w[j - 1] != "traffic" &&
          w[j - 1] != "street" && w[j - 1] != "brake") {
        break;
      }
      plural = pl;
      ++j;
    }
    const bool have_noun = j > noun_begin;
    const bool have_lead = c.determiner.has_value() || c.number.has_value();
    if (have_noun && !have_lead && noun_begin == i && i > 0 && taken[i - 1] &&
        lexicon::is_verb_like_plural(w[i])) {
      ++i;  // "the car | stops"
      continue;
    }
    if (!have_noun) {
      if (have_lead && noun_begin < n && !taken[noun_begin] && is_word_token(a.tokens[noun_begin]) &&
          !lexicon::is_closed_class(w[noun_begin]) && !lexicon::is_adjective(w[noun_begin])) {
        // unknown head word after a determiner or number
        j = noun_begin + 1;
        plural = w[noun_begin].size() > 3 && w[noun_begin].back() == 's' &&
                 !w[noun_begin].ends_with("ss");
      } else if (c.determiner.has_value() && noun_begin > adj_begin) {
        j = noun_begin;  // adjective used as head: "the left"
      } else {
        ++i;
        continue;
      }
    }
    c.end = j;
    c.plural = plural;
    if (c.number && number_value(w[*c.number]) > 1) c.plural = true;
    if (c.number && number_value(w[*c.number]) == 1) c.plural = false;
    for (std::size_t k = c.begin; k < c.end; ++k) taken[k] = 1;
    found.push_back(c);
    i = j;
  }

  std::sort(found.begin(), found.end(),
            [](const Chunk& x, const Chunk& y) { return x.begin < y.begin; });
  for (auto& c : found) {
    if (c.begin > 0 && lexicon::is_preposition(w[c.begin - 1])) c.preposition = c.begin - 1;
    if (c.determiner && w[*c.determiner] == "no") {
      c.negated = true;
    } else {
      for (std::size_t k = c.begin; k-- > 0;) {
        if (clause_break(w[k])) break;
        if (lexicon::is_negator(w[k])) {
          c.negated = true;
          break;
        }
      }
    }
  }
  a.chunks = std::move(found);
  return a;
}

namespace {

// Candidate surface text: chunk tokens minus the count, with the sentence's
// first word lowercased unless it is part of a name.
std::string chunk_text(const SentenceAnalysis& a, const Chunk& c) {
  std::vector<std::string> toks;
  for (std::size_t k = c.begin; k < c.end; ++k) {
    if (c.number && k == *c.number) continue;
    if (k == 0 && !(c.entity && !c.determiner)) {
      toks.push_back(a.lower[k]);
    } else {
      toks.push_back(a.tokens[k]);
    }
  }
  return detokenize(toks);
}

}  // namespace

std::vector<CandidateAnswer> extract_candidates(std::string_view sentence,
                                                const ExtractOptions& options) {
  const SentenceAnalysis a = analyze_sentence(sentence);
  std::vector<CandidateAnswer> out;
  std::set<std::pair<int, std::string>> seen;
  auto emit = [&](CandidateAnswer c) {
    if (c.text.empty()) return;
    if (!seen.emplace(static_cast<int>(c.category), to_lower(c.text)).second) return;
    c.source_sentence = std::string(sentence);
    out.push_back(std::move(c));
  };

  for (const auto& c : a.chunks) {
    if (c.number) {
      CandidateAnswer count;
      count.text = a.lower[*c.number];
      count.category = Category::kCount;
      count.token_begin = *c.number;
      count.token_end = *c.number + 1;
      emit(std::move(count));
    }
    if (c.determiner && a.lower[*c.determiner] == "no") continue;
    CandidateAnswer np;
    np.text = chunk_text(a, c);
    np.category = c.entity ? Category::kNamedEntity : Category::kNounPhrase;
    np.token_begin = c.begin;
    np.token_end = c.end;
    emit(std::move(np));
  }

  const Chunk* asserted = nullptr;
  const Chunk* denied = nullptr;
  for (const auto& c : a.chunks) {
    if (!c.negated && !asserted) asserted = &c;
    if (c.determiner && a.lower[*c.determiner] == "no" && !denied) denied = &c;
  }
  if (asserted || denied) {
    const Chunk& c = asserted ? *asserted : *denied;
    CandidateAnswer b;
    b.text = asserted ? "yes" : "no";
    b.category = Category::kBoolean;
    b.token_begin = c.begin;
    b.token_end = c.end;
    emit(std::move(b));
  }

  for (const auto& cls : options.zero_lexicon) {
    const std::string singular = to_lower(cls);
    const std::string plural = lexicon::pluralize(singular);
    const bool present = std::any_of(a.lower.begin(), a.lower.end(), [&](const std::string& t) {
      return t == singular || t == plural;
    });
    if (present) continue;
    CandidateAnswer z;
    z.text = "zero";
    z.category = Category::kCount;
    z.object_class = singular;
    z.token_begin = z.token_end = 0;
    // zero candidates are distinct per class
    if (!seen.emplace(100, singular).second) continue;
    z.source_sentence = std::string(sentence);
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace fiq::qagen
