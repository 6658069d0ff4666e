// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fiq::qagen {

struct Description {
  std::string video_id;
  std::vector<std::string> sentences;
};

enum class Category { kNounPhrase, kNamedEntity, kBoolean, kCount };

std::string_view category_name(Category c) noexcept;
Category parse_category(std::string_view name);

struct CandidateAnswer {
  std::string text;
  Category category = Category::kNounPhrase;
  std::string source_sentence;
  /// Proxy-token span of the phrase the candidate was read from, [begin, end).
  /// For booleans this is the noun phrase whose existence is asserted.
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
  /// For a "zero" count, the lexicon class that is absent from the sentence.
  std::string object_class;
};

/// Six reasoning categories of the source benchmark plus generated items.
enum class TaskType { kB, kF, kR, kC, kI, kA, kGen };

inline constexpr std::array<TaskType, 6> kBenchmarkTasks = {TaskType::kB, TaskType::kF,
                                                            TaskType::kR, TaskType::kC,
                                                            TaskType::kI, TaskType::kA};

std::string_view task_name(TaskType t) noexcept;
TaskType parse_task(std::string_view name);

enum class Provenance { kOriginal, kGenerated };

std::string_view provenance_name(Provenance p) noexcept;
Provenance parse_provenance(std::string_view name);

inline constexpr std::size_t kOptionCount = 4;

struct QARecord {
  std::string record_id;
  std::string video_id;
  std::string question;
  std::array<std::string, kOptionCount> options;
  std::size_t answer_idx = 0;
  TaskType task_type = TaskType::kGen;
  Provenance provenance = Provenance::kOriginal;

  bool operator==(const QARecord&) const = default;
};

/// Violations of the record invariants; empty when the record is valid.
/// Checks: nonempty ids, pairwise-distinct options, answer index in range,
/// question and every option within the proxy-token limit.
std::vector<std::string> record_violations(const QARecord& record);

/// One JSON object, fields in declaration order, no trailing newline.
std::string record_to_json(const QARecord& record);
QARecord record_from_json(std::string_view line);

std::string description_to_json(const Description& d);
Description description_from_json(std::string_view line);

/// JSON Lines readers. Blank lines are skipped; a malformed line raises
/// FormatError naming "line N".
std::vector<QARecord> read_records(std::istream& in);
std::vector<QARecord> read_records_file(const std::string& path);
std::vector<Description> read_descriptions(std::istream& in);
std::vector<Description> read_descriptions_file(const std::string& path);

void write_records(std::ostream& out, const std::vector<QARecord>& records);
void write_records_file(const std::string& path, const std::vector<QARecord>& records);

}  // namespace fiq::qagen
