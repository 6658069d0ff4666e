// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/trainer/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <thread>

#include "fiq/error.hpp"
#include "fiq/fiqnet/model.hpp"
#include "fiq/fiqnet/scoring.hpp"
#include "fiq/numkit/rng.hpp"

namespace fiq::trainer {

using qagen::TaskType;

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json per_task = nlohmann::ordered_json::object();
  for (const auto& [task, stat] : tasks) {
    per_task[std::string(qagen::task_name(task))] = {
        {"correct", stat.correct}, {"total", stat.total}, {"accuracy", stat.accuracy()}};
  }
  return {{"tasks", per_task},
          {"average", tasks_averaged == 0 ? nlohmann::ordered_json() : nlohmann::ordered_json(average)},
          {"tasks_averaged", tasks_averaged},
          {"overall", {{"correct", overall.correct},
                       {"total", overall.total},
                       {"accuracy", overall.accuracy()}}}};
}

std::string EvalReport::table() const {
  std::ostringstream head, row;
  char buf[32];
  auto cell = [&](std::string_view name, const TaskStat* s) {
    std::snprintf(buf, sizeof buf, "%8.*s", static_cast<int>(name.size()), name.data());
    head << buf;
    if (s != nullptr) {
      std::snprintf(buf, sizeof buf, "%8.1f", 100.0 * s->accuracy());
    } else {
      std::snprintf(buf, sizeof buf, "%8s", "-");
    }
    row << buf;
  };
  for (TaskType t : qagen::kBenchmarkTasks) {
    auto it = tasks.find(t);
    cell(qagen::task_name(t), it == tasks.end() ? nullptr : &it->second);
  }
  std::snprintf(buf, sizeof buf, "%8s", "Avg");
  head << buf;
  if (tasks_averaged == 0) {
    std::snprintf(buf, sizeof buf, "%8s", "-");
  } else {
    std::snprintf(buf, sizeof buf, "%8.1f", 100.0 * average);
  }
  row << buf;
  auto gen = tasks.find(TaskType::kGen);
  cell("GEN", gen == tasks.end() ? nullptr : &gen->second);
  return head.str() + "\n" + row.str() + "\n";
}

EvalReport build_report(const std::vector<qagen::QARecord>& records,
                        const std::vector<std::size_t>& predictions) {
  if (records.size() != predictions.size()) {
    throw DimensionError("build_report: " + std::to_string(records.size()) + " records but " +
                         std::to_string(predictions.size()) + " predictions");
  }
  EvalReport r;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& stat = r.tasks[records[i].task_type];
    const bool hit = predictions[i] == records[i].answer_idx;
    ++stat.total;
    ++r.overall.total;
    if (hit) {
      ++stat.correct;
      ++r.overall.correct;
    }
  }
  double sum = 0.0;
  for (TaskType t : qagen::kBenchmarkTasks) {
    auto it = r.tasks.find(t);
    if (it == r.tasks.end()) continue;
    sum += it->second.accuracy();
    ++r.tasks_averaged;
  }
  r.average = r.tasks_averaged == 0 ? 0.0 : sum / static_cast<double>(r.tasks_averaged);
  return r;
}

std::vector<std::size_t> predict_examples(const fiqnet::ModelConfig& config,
                                          const numkit::ParamStore<float>& params,
                                          const std::vector<Example>& examples, bool use_ema) {
  numkit::ParamStore<float> store = params;
  if (use_ema) store.load_ema_into_values();
  const fiqnet::FiqNet<float> net(config, store);

  std::vector<std::size_t> out(examples.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& ex = examples[i];
      fiqnet::ScoringInputs<float> in;
      in.video = ex.video.get();
      in.question = ex.question.get();
      for (const auto& o : ex.options) in.candidates.push_back(o.get());
      const auto scores = net.score_candidates(in, fiqnet::Mode::kEval, nullptr, nullptr);
      out[i] = fiqnet::predict<float>(scores);
    }
  };

  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = numkit::checked_mode() ? 1 : std::min<std::size_t>(hw, examples.size());
  if (workers <= 1) {
    run(0, examples.size());
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (examples.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        run(std::min(examples.size(), w * chunk), std::min(examples.size(), (w + 1) * chunk));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

EvalReport evaluate(const fiqnet::ModelConfig& config, const numkit::ParamStore<float>& params,
                    const std::vector<Example>& examples, bool use_ema) {
  std::vector<qagen::QARecord> records;
  records.reserve(examples.size());
  for (const auto& ex : examples) records.push_back(ex.record);
  return build_report(records, predict_examples(config, params, examples, use_ema));
}

double random_baseline_accuracy(const std::vector<qagen::QARecord>& records, std::uint64_t seed,
                                std::size_t draws) {
  if (records.empty() || draws == 0) return 0.0;
  numkit::Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t d = 0; d < draws; ++d) {
    for (const auto& r : records) {
      std::array<double, 4> scores{};
      for (auto& s : scores) s = rng.uniform();
      if (fiqnet::predict<double>(scores) == r.answer_idx) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(draws * records.size());
}

}  // namespace fiq::trainer
