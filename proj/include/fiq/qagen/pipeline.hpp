// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fiq/qagen/assemble.hpp"
#include "fiq/qagen/extract.hpp"
#include "fiq/qagen/lm_client.hpp"
#include "fiq/qagen/records.hpp"
#include "fiq/qagen/validate.hpp"

namespace fiq::qagen {

struct GenQaOptions {
  ExtractOptions extract;
  ValidationOptions validation;
  AssembleOptions assemble;
  std::uint64_t seed = 0;
  /// Concurrent LM calls. Output order does not depend on it.
  std::size_t max_in_flight = 1;
};

struct SkipEntry {
  std::string video_id;
  std::string candidate;
  std::string stage;  // "generate" or "validate"
  std::string message;
};

struct GenQaReport {
  std::size_t descriptions = 0;
  std::size_t sentences = 0;  // after filtering
  std::size_t extracted = 0;
  std::size_t generated = 0;
  std::size_t rejected_below_threshold = 0;
  std::size_t skipped = 0;  // LM failures
  std::size_t emitted = 0;
  std::vector<SkipEntry> skips;
};

struct GenQaResult {
  std::vector<QARecord> records;
  GenQaReport report;
};

/// filter -> extract -> generate -> validate -> assemble. Negatives come from
/// the accepted answers of other videos plus `extra_pool` when given. The
/// result is a pure function of the inputs and the seed for a deterministic
/// client. Record ids are "<video_id>:<n>". A "zero" count is proposed once
/// per description for each lexicon class absent from all its sentences,
/// and repeated questions within a video are emitted once.
GenQaResult run_gen_qa(const std::vector<Description>& descriptions, LMClient& lm,
                       const GenQaOptions& options, const AnswerPool* extra_pool = nullptr);

/// {"descriptions":…,"sentences":…,"extracted":…,"generated":…,
///  "rejected_below_0.54":…,"skipped":…,"emitted":…}
std::string report_counts_json(const GenQaReport& report);
std::string skip_report_json(const GenQaReport& report);

}  // namespace fiq::qagen
