// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fiq/numkit/rng.hpp"
#include "fiq/qagen/records.hpp"

namespace fiq::qagen {

/// Answer strings per video, used as the source of negatives. Videos keep
/// insertion order; duplicate answers within a video are ignored.
class AnswerPool {
 public:
  void add(const std::string& video_id, const std::string& answer);
  void add_record(const QARecord& record);  // adds the positive option

  const std::vector<std::string>& video_ids() const noexcept { return ids_; }
  const std::vector<std::string>& answers(const std::string& video_id) const;
  std::size_t video_count() const noexcept { return ids_.size(); }

 private:
  std::vector<std::string> ids_;
  std::map<std::string, std::vector<std::string>> answers_;
};

struct AssembleOptions {
  /// Draws per negative video before that video is swapped for another.
  std::size_t max_retries = 8;
};

/// Builds a generated multi-choice record: three negatives, one from each of
/// three distinct videos other than `video_id`, none textually equal
/// (lowercased, whitespace collapsed) to the positive or to each other. The
/// four options are shuffled with `rng`. record_id is left for the caller.
QARecord assemble_multichoice(const CandidateAnswer& positive, const std::string& question,
                              const std::string& video_id, const AnswerPool& pool,
                              numkit::Rng& rng, const AssembleOptions& options = {});

inline constexpr const char* kGeneratedIdPrefix = "gen:";

/// Originals in order, then generated records with ids prefixed "gen:".
std::vector<QARecord> merge_dataset(const std::vector<QARecord>& original,
                                    const std::vector<QARecord>& generated);

}  // namespace fiq::qagen
