// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/qagen/assemble.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "fiq/error.hpp"
#include "fiq/qagen/text.hpp"

namespace fiq::qagen {

void AnswerPool::add(const std::string& video_id, const std::string& answer) {
  if (video_id.empty() || answer.empty()) return;
  auto [it, inserted] = answers_.try_emplace(video_id);
  if (inserted) ids_.push_back(video_id);
  auto& list = it->second;
  if (std::find(list.begin(), list.end(), answer) == list.end()) list.push_back(answer);
}

void AnswerPool::add_record(const QARecord& record) {
  if (record.answer_idx < kOptionCount) add(record.video_id, record.options[record.answer_idx]);
}

const std::vector<std::string>& AnswerPool::answers(const std::string& video_id) const {
  static const std::vector<std::string> kNone;
  const auto it = answers_.find(video_id);
  return it == answers_.end() ? kNone : it->second;
}

QARecord assemble_multichoice(const CandidateAnswer& positive, const std::string& question,
                              const std::string& video_id, const AnswerPool& pool,
                              numkit::Rng& rng, const AssembleOptions& options) {
  std::vector<std::string> foreign;
  for (const auto& id : pool.video_ids()) {
    if (id != video_id && !pool.answers(id).empty()) foreign.push_back(id);
  }
  if (foreign.size() < kOptionCount - 1) {
    throw AssemblyError("answer pool has " + std::to_string(foreign.size()) +
                        " other videos with answers; 3 are needed");
  }

  const std::string positive_text = truncate_tokens(positive.text, kTokenLimit);
  std::set<std::string> used{normalize_whitespace_lower(positive_text)};
  std::vector<std::string> negatives;
  std::string last_collision;

  // partial Fisher-Yates: each step moves a fresh random video into place
  std::size_t next = 0;
  while (negatives.size() < kOptionCount - 1) {
    if (next == foreign.size()) {
      throw AssemblyError("cannot find a distinct negative; last colliding answer '" +
                          last_collision + "'");
    }
    const std::size_t pick = next + static_cast<std::size_t>(rng.below(foreign.size() - next));
    std::swap(foreign[next], foreign[pick]);
    const auto& answers = pool.answers(foreign[next]);
    ++next;
    for (std::size_t attempt = 0; attempt < options.max_retries; ++attempt) {
      const std::string text =
          truncate_tokens(answers[static_cast<std::size_t>(rng.below(answers.size()))], kTokenLimit);
      if (used.insert(normalize_whitespace_lower(text)).second) {
        negatives.push_back(text);
        break;
      }
      last_collision = text;
    }
  }

  std::array<std::size_t, kOptionCount> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  QARecord r;
  r.video_id = video_id;
  r.question = question;
  for (std::size_t slot = 0; slot < kOptionCount; ++slot) {
    const std::size_t src = order[slot];
    r.options[slot] = src == 0 ? positive_text : negatives[src - 1];
    if (src == 0) r.answer_idx = slot;
  }
  r.task_type = TaskType::kGen;
  r.provenance = Provenance::kGenerated;
  return r;
}

std::vector<QARecord> merge_dataset(const std::vector<QARecord>& original,
                                    const std::vector<QARecord>& generated) {
  std::set<std::string> ids;
  std::vector<QARecord> out;
  out.reserve(original.size() + generated.size());
  for (const auto& r : original) {
    if (!ids.insert(r.record_id).second) {
      throw MergeError("duplicate record_id '" + r.record_id + "' in original dataset");
    }
    out.push_back(r);
  }
  std::set<std::string> generated_ids;
  for (const auto& r : generated) {
    if (!generated_ids.insert(r.record_id).second) {
      throw MergeError("duplicate record_id '" + r.record_id + "' in generated dataset");
    }
    QARecord copy = r;
    copy.record_id = kGeneratedIdPrefix + r.record_id;
    if (!ids.insert(copy.record_id).second) {
      throw MergeError("record_id '" + copy.record_id + "' collides after namespacing");
    }
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace fiq::qagen
