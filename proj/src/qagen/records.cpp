// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/qagen/records.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "fiq/error.hpp"
#include "fiq/qagen/text.hpp"

namespace fiq::qagen {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw FormatError(name, std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(name, std::string("field '") + name + "': " + e.what());
  }
}

nlohmann::json parse_object(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("json", e.what());
  }
  if (!j.is_object()) throw FormatError("json", "expected a JSON object");
  return j;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return in;
}

template <typename T, typename Parse>
std::vector<T> read_lines(std::istream& in, Parse&& parse) {
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(lineno),
                        "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string_view category_name(Category c) noexcept {
  switch (c) {
    case Category::kNounPhrase: return "noun_phrase";
    case Category::kNamedEntity: return "named_entity";
    case Category::kBoolean: return "boolean";
    case Category::kCount: return "count";
  }
  return "noun_phrase";
}

Category parse_category(std::string_view name) {
  for (Category c : {Category::kNounPhrase, Category::kNamedEntity, Category::kBoolean,
                     Category::kCount}) {
    if (category_name(c) == name) return c;
  }
  throw FormatError("category", "unknown category '" + std::string(name) + "'");
}

std::string_view task_name(TaskType t) noexcept {
  switch (t) {
    case TaskType::kB: return "B";
    case TaskType::kF: return "F";
    case TaskType::kR: return "R";
    case TaskType::kC: return "C";
    case TaskType::kI: return "I";
    case TaskType::kA: return "A";
    case TaskType::kGen: return "GEN";
  }
  return "GEN";
}

TaskType parse_task(std::string_view name) {
  for (TaskType t : {TaskType::kB, TaskType::kF, TaskType::kR, TaskType::kC, TaskType::kI,
                     TaskType::kA, TaskType::kGen}) {
    if (task_name(t) == name) return t;
  }
  throw FormatError("task_type", "unknown task type '" + std::string(name) + "'");
}

std::string_view provenance_name(Provenance p) noexcept {
  return p == Provenance::kOriginal ? "original" : "generated";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "original") return Provenance::kOriginal;
  if (name == "generated") return Provenance::kGenerated;
  throw FormatError("provenance", "unknown provenance '" + std::string(name) + "'");
}

std::vector<std::string> record_violations(const QARecord& r) {
  std::vector<std::string> v;
  if (r.record_id.empty()) v.push_back("empty record_id");
  if (r.video_id.empty()) v.push_back("empty video_id");
  if (r.answer_idx >= kOptionCount) v.push_back("answer_idx out of range");
  for (std::size_t i = 0; i < kOptionCount; ++i) {
    for (std::size_t j = i + 1; j < kOptionCount; ++j) {
      if (r.options[i] == r.options[j]) {
        v.push_back("options " + std::to_string(i) + " and " + std::to_string(j) + " are equal");
      }
    }
  }
  if (proxy_token_count(r.question) > kTokenLimit) v.push_back("question exceeds token limit");
  for (std::size_t i = 0; i < kOptionCount; ++i) {
    if (proxy_token_count(r.options[i]) > kTokenLimit) {
      v.push_back("option " + std::to_string(i) + " exceeds token limit");
    }
  }
  return v;
}

std::string record_to_json(const QARecord& r) {
  ordered_json j;
  j["record_id"] = r.record_id;
  j["video_id"] = r.video_id;
  j["question"] = r.question;
  j["options"] = r.options;
  j["answer_idx"] = r.answer_idx;
  j["task_type"] = task_name(r.task_type);
  j["provenance"] = provenance_name(r.provenance);
  return j.dump();
}

QARecord record_from_json(std::string_view line) {
  const auto j = parse_object(line);
  QARecord r;
  r.record_id = field<std::string>(j, "record_id");
  r.video_id = field<std::string>(j, "video_id");
  r.question = field<std::string>(j, "question");
  const auto options = field<std::vector<std::string>>(j, "options");
  if (options.size() != kOptionCount) {
    throw FormatError("options", "expected 4 options, got " + std::to_string(options.size()));
  }
  std::copy(options.begin(), options.end(), r.options.begin());
  const auto idx = field<long long>(j, "answer_idx");
  if (idx < 0 || idx >= static_cast<long long>(kOptionCount)) {
    throw FormatError("answer_idx", "answer_idx out of range");
  }
  r.answer_idx = static_cast<std::size_t>(idx);
  r.task_type = parse_task(field<std::string>(j, "task_type"));
  r.provenance = j.contains("provenance") ? parse_provenance(field<std::string>(j, "provenance"))
                                          : Provenance::kOriginal;
  return r;
}

std::string description_to_json(const Description& d) {
  ordered_json j;
  j["video_id"] = d.video_id;
  j["sentences"] = d.sentences;
  return j.dump();
}

Description description_from_json(std::string_view line) {
  const auto j = parse_object(line);
  Description d;
  d.video_id = field<std::string>(j, "video_id");
  d.sentences = field<std::vector<std::string>>(j, "sentences");
  if (d.video_id.empty()) throw FormatError("video_id", "empty video_id");
  return d;
}

std::vector<QARecord> read_records(std::istream& in) {
  return read_lines<QARecord>(in, record_from_json);
}

std::vector<QARecord> read_records_file(const std::string& path) {
  auto in = open_input(path);
  return read_records(in);
}

std::vector<Description> read_descriptions(std::istream& in) {
  return read_lines<Description>(in, description_from_json);
}

std::vector<Description> read_descriptions_file(const std::string& path) {
  auto in = open_input(path);
  return read_descriptions(in);
}

void write_records(std::ostream& out, const std::vector<QARecord>& records) {
  for (const auto& r : records) out << record_to_json(r) << '\n';
}

void write_records_file(const std::string& path, const std::vector<QARecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_records(out, records);
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace fiq::qagen
