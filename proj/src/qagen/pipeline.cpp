// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/qagen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <json.hpp>

#include "fiq/error.hpp"
#include "fiq/qagen/filter.hpp"
#include "fiq/qagen/question.hpp"
#include "fiq/qagen/text.hpp"

namespace fiq::qagen {

namespace {

struct WorkItem {
  std::string video_id;
  CandidateAnswer candidate;
  // filled by the LM stage
  std::optional<std::string> question;
  ValidationResult validation;
  std::optional<SkipEntry> skip;
};

void run_lm_stage(WorkItem& item, LMClient& lm, const ValidationOptions& options) {
  const char* stage = "generate";
  try {
    item.question = generate_question(item.candidate, lm);
    stage = "validate";
    item.validation = validate_pair(*item.question, item.candidate, lm, options);
  } catch (const LmTransportError& e) {
    item.skip = SkipEntry{item.video_id, item.candidate.text, stage, e.what()};
  } catch (const Error& e) {
    if (e.code() != "lm-output") throw;
    item.skip = SkipEntry{item.video_id, item.candidate.text, stage, e.what()};
  }
}

}  // namespace

GenQaResult run_gen_qa(const std::vector<Description>& descriptions, LMClient& lm,
                       const GenQaOptions& options, const AnswerPool* extra_pool) {
  if (descriptions.empty()) throw EmptyDescriptionError("no descriptions to process");
  GenQaResult result;
  auto& report = result.report;
  report.descriptions = descriptions.size();

  // "zero" counts are decided per description, not per sentence
  ExtractOptions per_sentence = options.extract;
  per_sentence.zero_lexicon.clear();

  std::vector<WorkItem> items;
  for (const auto& raw : descriptions) {
    const Description d = filter_descriptions(raw);
    report.sentences += d.sentences.size();
    std::set<std::string> words;
    for (const auto& sentence : d.sentences) {
      for (const auto& t : proxy_tokenize(sentence)) words.insert(to_lower(t));
      for (auto& c : extract_candidates(sentence, per_sentence)) {
        items.push_back(WorkItem{d.video_id, std::move(c), std::nullopt, {}, std::nullopt});
      }
    }
    for (const auto& cls : options.extract.zero_lexicon) {
      const std::string singular = to_lower(cls);
      if (words.count(singular) || words.count(lexicon::pluralize(singular))) continue;
      CandidateAnswer z;
      z.text = "zero";
      z.category = Category::kCount;
      z.source_sentence = d.sentences.front();
      z.object_class = singular;
      items.push_back(WorkItem{d.video_id, std::move(z), std::nullopt, {}, std::nullopt});
    }
  }
  report.extracted = items.size();

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.max_in_flight, items.size()));
  if (workers == 1) {
    for (auto& item : items) run_lm_stage(item, lm, options.validation);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = cursor++; i < items.size(); i = cursor++) {
          try {
            run_lm_stage(items[i], lm, options.validation);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  AnswerPool pool;
  if (extra_pool) {
    for (const auto& id : extra_pool->video_ids()) {
      for (const auto& a : extra_pool->answers(id)) pool.add(id, a);
    }
  }
  std::vector<const WorkItem*> accepted;
  std::set<std::pair<std::string, std::string>> asked;  // (video, question)
  for (const auto& item : items) {
    if (item.skip) {
      ++report.skipped;
      report.skips.push_back(*item.skip);
      continue;
    }
    ++report.generated;
    if (!item.validation.accepted) {
      ++report.rejected_below_threshold;
      continue;
    }
    if (!asked.emplace(item.video_id, normalize_whitespace_lower(*item.question)).second) continue;
    accepted.push_back(&item);
    pool.add(item.video_id, truncate_tokens(item.candidate.text, kTokenLimit));
  }

  numkit::Rng rng(options.seed);
  std::map<std::string, std::size_t> per_video;
  for (const WorkItem* item : accepted) {
    QARecord r = assemble_multichoice(item->candidate, *item->question, item->video_id, pool, rng,
                                      options.assemble);
    r.record_id = item->video_id + ":" + std::to_string(per_video[item->video_id]++);
    result.records.push_back(std::move(r));
  }
  report.emitted = result.records.size();
  return result;
}

std::string report_counts_json(const GenQaReport& r) {
  nlohmann::ordered_json j;
  j["descriptions"] = r.descriptions;
  j["sentences"] = r.sentences;
  j["extracted"] = r.extracted;
  j["generated"] = r.generated;
  j["rejected_below_0.54"] = r.rejected_below_threshold;
  j["skipped"] = r.skipped;
  j["emitted"] = r.emitted;
  return j.dump();
}

std::string skip_report_json(const GenQaReport& r) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& s : r.skips) {
    j.push_back({{"video_id", s.video_id},
                 {"candidate", s.candidate},
                 {"stage", s.stage},
                 {"message", s.message}});
  }
  return j.dump();
}

}  // namespace fiq::qagen
